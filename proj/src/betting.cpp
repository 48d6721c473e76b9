#include "ewfs/betting.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace ewfs {

namespace {

constexpr double kDegenerateTol = 1e-12;

const SystemLabel kS{"S", 2};
const SystemLabel kF{"F", 3};

void check_setup(const BetSetup& s) {
  if (std::abs(std::norm(s.alpha) + std::norm(s.beta) - 1.0) > kNormTol)
    throw std::invalid_argument("|alpha|^2 + |beta|^2 must be 1");
  if (std::abs(std::norm(s.gamma) + std::norm(s.delta) - 1.0) > kNormTol)
    throw std::invalid_argument("|gamma|^2 + |delta|^2 must be 1");
}

EugeneSetting required_setting(TicketKind kind) {
  switch (kind) {
    case TicketKind::G1:
    case TicketKind::G01:
      return EugeneSetting::PopAndAsk;
    case TicketKind::G2:
      return EugeneSetting::ReverseAndMeasure;
    case TicketKind::G0:
      break;
  }
  throw std::invalid_argument(
      "ticket pays on the friend's own measurement; no setting of Eugene's "
      "settles it");
}

Operator friend_dilation() {
  return dilate_measurement({basis_state({kS}, 0), basis_state({kS}, 1)}, kF);
}

StateVector phi2_state(const BetSetup& s) {
  CVec v(2);
  v << s.gamma, s.delta;
  return StateVector({kS}, v);
}

}  // namespace

int WalletRegister::index_of(double value) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == value) return static_cast<int>(i);
  return -1;
}

double price_ticket(const Ticket& t, const Perspective& p, const BetSetup& s,
                    EugeneSetting x) {
  check_setup(s);
  if (t.kind != TicketKind::G0 && required_setting(t.kind) != x)
    throw std::invalid_argument("ticket measurement does not match the setting");

  const bool internal = p.kind == Perspective::Kind::InternalAfterOutcome;
  if (internal && (p.c < 0 || p.c > 1))
    throw std::invalid_argument("internal perspective needs an outcome c");

  switch (t.kind) {
    case TicketKind::G0:
    case TicketKind::G1:
    case TicketKind::G01:
      // Interrogation-side events: the Born price outside, certainty inside.
      return internal ? (p.c == 0 ? t.payoff : 0.0) : t.payoff * s.p0();
    case TicketKind::G2: {
      if (!internal) return t.payoff * s.p2();
      const double d = std::abs(s.p2_given(0) - s.p2_given(1));
      // When the wallet cannot distinguish the branches, the situation is
      // externally equivalent to not having bet inside: price p2.
      if (d < kDegenerateTol) return t.payoff * s.p2();
      return t.payoff * s.p2_given(p.c);
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<double> protocol_prices(const Ticket& t, Perspective::Kind kind,
                                    const BetSetup& s, EugeneSetting x) {
  if (kind == Perspective::Kind::External)
    return {price_ticket(t, Perspective::external(), s, x)};
  return {price_ticket(t, Perspective::internal(0), s, x),
          price_ticket(t, Perspective::internal(1), s, x)};
}

WalletRegister make_wallet(const std::vector<double>& prices) {
  WalletRegister w;
  w.labels.push_back(0.0);
  for (double p : prices)
    if (w.index_of(-p) < 0) w.labels.push_back(-p);
  w.reg = SystemLabel{"C", static_cast<int>(w.labels.size())};
  return w;
}

StateVector bet_initial_state(const BetSetup& s, const WalletRegister& wallet) {
  check_setup(s);
  CVec phi(2);
  phi << s.alpha, s.beta;
  StateVector st = tensor(StateVector({kS}, phi), basis_state({kF}, 0));
  st = apply(friend_dilation(), st);
  return tensor(st, basis_state({wallet.reg}, 0));
}

StateVector apply_bet(const StateVector& state, const Ticket& t,
                      Perspective::Kind kind, const std::vector<double>& prices,
                      const WalletRegister& wallet) {
  const int dc = wallet.reg.dim;
  auto swap_to = [&](double price) {
    const int idx = wallet.index_of(-price);
    if (idx < 0)
      throw std::invalid_argument("price " + std::to_string(price) +
                                  " is not among the wallet's value labels");
    CMat m = CMat::Identity(dc, dc);
    if (idx != 0) {
      m(0, 0) = m(idx, idx) = 0.0;
      m(0, idx) = m(idx, 0) = 1.0;
    }
    return m;
  };

  if (kind == Perspective::Kind::External) {
    if (prices.size() != 1)
      throw std::invalid_argument("external bet takes a single price");
    return apply(Operator({wallet.reg}, swap_to(prices[0])), state);
  }

  if (prices.size() != 2)
    throw std::invalid_argument("internal bet takes one price per outcome");
  (void)t;
  // |R><R| (x) I plus |O_c><O_c| (x) debit_c: unitary on F (x) C.
  CMat u = CMat::Zero(3 * dc, 3 * dc);
  u.block(0, 0, dc, dc) = CMat::Identity(dc, dc);
  u.block(dc, dc, dc, dc) = swap_to(prices[0]);
  u.block(2 * dc, 2 * dc, dc, dc) = swap_to(prices[1]);
  return apply(Operator({kF, wallet.reg}, u), state);
}

namespace {

using Joint = std::vector<SettlementReport::Outcome>;

// Joint (wallet label, hit) distribution by simultaneous projective readout.
Joint joint_simultaneous(const StateVector& st, const Operator& hit_proj,
                         const WalletRegister& wallet) {
  Joint joint;
  for (std::size_t w = 0; w < wallet.labels.size(); ++w) {
    CMat pw = CMat::Zero(wallet.reg.dim, wallet.reg.dim);
    pw(w, w) = 1.0;
    const Operator wallet_proj({wallet.reg}, pw);
    const double p_hit = born(st, tensor(hit_proj, wallet_proj));
    const double p_w = born(st, Operator({wallet.reg}, pw));
    joint.push_back({wallet.labels[w], true, p_hit, 0.0});
    joint.push_back({wallet.labels[w], false, p_w - p_hit, 0.0});
  }
  return joint;
}

// Sequential readout: wallet collapse first, then the payoff projector.
Joint joint_wallet_first(const StateVector& st, const Operator& hit_proj,
                         const WalletRegister& wallet) {
  std::vector<StateVector> cash_basis;
  for (int w = 0; w < wallet.reg.dim; ++w)
    cash_basis.push_back(basis_state({wallet.reg}, w));
  Joint joint;
  int w = 0;
  for (const auto& branch : collapse(st, cash_basis)) {
    const double label = wallet.labels[w++];
    if (branch.zero_probability) {
      joint.push_back({label, true, 0.0, 0.0});
      joint.push_back({label, false, 0.0, 0.0});
      continue;
    }
    const double hit = born(branch.state, hit_proj);
    joint.push_back({label, true, branch.probability * hit, 0.0});
    joint.push_back({label, false, branch.probability * (1.0 - hit), 0.0});
  }
  return joint;
}

// Sequential readout: payoff measurement first, wallet afterwards.
Joint joint_measurement_first(const StateVector& st, const Operator& hit_proj,
                              const WalletRegister& wallet) {
  const long dim = hit_proj.dim();
  const Operator miss(hit_proj.factors(),
                      CMat::Identity(dim, dim) - hit_proj.matrix());
  Joint joint;
  for (const bool hit : {true, false}) {
    const Operator& proj = hit ? hit_proj : miss;
    const double p = born(st, proj);
    if (p < 1e-15) {
      for (double label : wallet.labels) joint.push_back({label, hit, 0.0, 0.0});
      continue;
    }
    StateVector projected = apply(proj, st, /*require_unitary=*/false);
    projected = StateVector(projected.factors(),
                            projected.amps() / projected.norm());
    for (std::size_t w = 0; w < wallet.labels.size(); ++w) {
      CMat pw = CMat::Zero(wallet.reg.dim, wallet.reg.dim);
      pw(w, w) = 1.0;
      joint.push_back({wallet.labels[w], hit,
                       p * born(projected, Operator({wallet.reg}, pw)), 0.0});
    }
  }
  return joint;
}

SettlementReport finalize(Joint joint, const Ticket& t, SettleOrder order) {
  SettlementReport rep;
  rep.order = order;
  std::map<double, double> gains;
  double expected = 0.0;
  for (auto& o : joint) {
    o.gain = o.wallet_label + (o.hit ? t.payoff : 0.0);
    expected += o.probability * o.gain;
    if (o.probability > 0.0) gains[o.gain] += o.probability;
  }
  rep.joint = std::move(joint);
  for (const auto& [g, p] : gains) rep.gains.emplace_back(g, p);
  rep.expected_gain = expected;
  return rep;
}

}  // namespace

SettlementReport settle(const StateVector& bet_state, EugeneSetting x,
                        const Ticket& t, SettleOrder order, const BetSetup& s,
                        const WalletRegister& wallet) {
  check_setup(s);
  if (t.kind == TicketKind::G0)
    throw std::invalid_argument(
        "the friend's own-measurement ticket cannot be settled from outside "
        "the bubble");
  if (required_setting(t.kind) != x) {
    if (!t.refund_if_unmeasured)
      throw std::invalid_argument(
          "ticket measurement was not performed and the ticket carries no "
          "refund clause");
    // Price returned; the gamble is off regardless of the quantum state.
    SettlementReport rep;
    rep.order = order;
    rep.refunded = true;
    rep.joint.push_back({0.0, false, 1.0, 0.0});
    rep.gains.emplace_back(0.0, 1.0);
    rep.expected_gain = 0.0;
    return rep;
  }

  if (x == EugeneSetting::PopAndAsk) {
    if (order == SettleOrder::WalletBeforeReversal)
      throw std::invalid_argument(
          "wallet-before-reversal applies to the reversal setting only");
    CMat o0 = CMat::Zero(3, 3);
    o0(1, 1) = 1.0;
    const Operator hit({kF}, o0);
    Joint joint;
    switch (order) {
      case SettleOrder::WalletFirst:
        joint = joint_wallet_first(bet_state, hit, wallet);
        break;
      case SettleOrder::MeasurementFirst:
        joint = joint_measurement_first(bet_state, hit, wallet);
        break;
      default:
        joint = joint_simultaneous(bet_state, hit, wallet);
    }
    return finalize(std::move(joint), t, order);
  }

  // Reversal setting: undo the friend's measurement, then read phi2 and the
  // wallet in the requested order.
  const Operator u1 = friend_dilation();
  const Operator hit = projector_onto(phi2_state(s));
  Joint joint;
  if (order == SettleOrder::WalletBeforeReversal) {
    std::vector<StateVector> cash_basis;
    for (int w = 0; w < wallet.reg.dim; ++w)
      cash_basis.push_back(basis_state({wallet.reg}, w));
    int w = 0;
    for (const auto& branch : collapse(bet_state, cash_basis)) {
      const double label = wallet.labels[w++];
      if (branch.zero_probability) {
        joint.push_back({label, true, 0.0, 0.0});
        joint.push_back({label, false, 0.0, 0.0});
        continue;
      }
      const StateVector reversed = apply(adjoint(u1), branch.state);
      const double h = born(reversed, hit);
      joint.push_back({label, true, branch.probability * h, 0.0});
      joint.push_back({label, false, branch.probability * (1.0 - h), 0.0});
    }
  } else {
    const StateVector reversed = apply(adjoint(u1), bet_state);
    switch (order) {
      case SettleOrder::WalletFirst:
        joint = joint_wallet_first(reversed, hit, wallet);
        break;
      case SettleOrder::MeasurementFirst:
        joint = joint_measurement_first(reversed, hit, wallet);
        break;
      default:
        joint = joint_simultaneous(reversed, hit, wallet);
    }
  }
  return finalize(std::move(joint), t, order);
}

double minimum_sale_price(const Ticket& t, const Perspective& p,
                          const BetSetup& s, EugeneSetting x) {
  // Eugene's floor tracks the information he takes Franz to have: the Born
  // price outside, the branch price inside.
  return price_ticket(t, p, s, x);
}

SettlementReport run_protocol(const Ticket& t, Perspective::Kind kind,
                              const BetSetup& s, EugeneSetting x,
                              SettleOrder order,
                              bool enforce_minimum_sale_price) {
  const EugeneSetting pricing_setting =
      t.kind == TicketKind::G0 ? x : required_setting(t.kind);
  const std::vector<double> prices = protocol_prices(t, kind, s, pricing_setting);
  if (enforce_minimum_sale_price) {
    for (std::size_t c = 0; c < prices.size(); ++c) {
      const Perspective p = kind == Perspective::Kind::External
                                ? Perspective::external()
                                : Perspective::internal(static_cast<int>(c));
      if (prices[c] < minimum_sale_price(t, p, s, pricing_setting) - 1e-12)
        throw std::invalid_argument("offered price is below Eugene's floor");
    }
  }
  const WalletRegister wallet = make_wallet(prices);
  const StateVector st0 = bet_initial_state(s, wallet);
  const StateVector bet = apply_bet(st0, t, kind, prices, wallet);
  return settle(bet, x, t, order, s, wallet);
}

AuditReport total_probability_audit(const BetSetup& s) {
  check_setup(s);
  AuditReport rep;
  rep.p0 = s.p0();
  rep.p2 = s.p2();
  rep.p2_0 = s.p2_given(0);
  rep.p2_1 = s.p2_given(1);

  const double diff = std::abs(rep.p2_0 - rep.p2_1);
  rep.wallet_uninformative = diff < kDegenerateTol;
  rep.near_degenerate = !rep.wallet_uninformative && diff < 1e-6;
  rep.special_case_tension =
      rep.wallet_uninformative && std::abs(rep.p2 - rep.p2_0) > kDegenerateTol;

  // Interrogation side: internal certainties recombine to the Born price.
  rep.external_x1 = rep.p0;
  rep.internal_marginal_x1 = 1.0 * rep.p0 + 0.0 * (1.0 - rep.p0);
  rep.gap_x1 = std::abs(rep.external_x1 - rep.internal_marginal_x1);

  // Reversal side: the act of betting inside changes the statistics.
  rep.external_x2 = rep.p2;
  rep.internal_marginal_x2 = rep.p2_0 * rep.p0 + rep.p2_1 * (1.0 - rep.p0);
  rep.gap_x2 = std::abs(rep.external_x2 - rep.internal_marginal_x2);

  // Decoherence diagnosis: pointer-basis coherence of S,F with C ignored.
  rep.offdiag_no_bet = std::abs(s.alpha * std::conj(s.beta));
  const Ticket g2 = Ticket::g2();
  const std::vector<double> prices = protocol_prices(
      g2, Perspective::Kind::InternalAfterOutcome, s,
      EugeneSetting::ReverseAndMeasure);
  const WalletRegister wallet = make_wallet(prices);
  const StateVector bet = apply_bet(bet_initial_state(s, wallet), g2,
                                    Perspective::Kind::InternalAfterOutcome,
                                    prices, wallet);
  const DensityOperator rho = partial_trace(bet, {"S", "F"});
  rep.offdiag_internal_bet = std::abs(rho.matrix()(0 * 3 + 1, 1 * 3 + 2));
  return rep;
}

Eigen::MatrixXd joint_ticket_value(const BetSetup& s, EugeneSetting x) {
  check_setup(s);
  if (x != EugeneSetting::PopAndAsk)
    throw std::domain_error(
        "no external joint distribution P(a,c) exists for the reversal "
        "setting: it would presuppose an absolute friend outcome, which the "
        "Local Friendliness analysis forbids");
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(2, 2);
  joint(0, 0) = s.p0();
  joint(1, 1) = 1.0 - s.p0();
  return joint;
}

}  // namespace ewfs
