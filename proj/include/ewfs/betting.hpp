#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ewfs/qcore.hpp"

namespace ewfs {

// Qubit instance of the gambling protocol: the friend measures
// phi0 = alpha|0> + beta|1> inside the bubble; the superobserver either
// interrogates the pointer or reverses and measures the projector onto
// phi2 = gamma|0> + delta|1>.
struct BetSetup {
  cdouble alpha, beta;
  cdouble gamma, delta;

  double p0() const { return std::norm(alpha); }
  double p2() const {
    return std::norm(std::conj(gamma) * alpha + std::conj(delta) * beta);
  }
  double p2_given(int c) const { return c == 0 ? std::norm(gamma) : std::norm(delta); }
};

enum class TicketKind { G0, G1, G2, G01 };

// Unit-payoff contract on an observable event. G0 pays on the friend's own
// measurement (settleable only inside the bubble); G1/G01 pay on the pointer
// interrogation, G2 on the post-reversal measurement. G1, G2 and G01 refund
// when their measurement is not the one performed.
struct Ticket {
  TicketKind kind = TicketKind::G1;
  double payoff = 1.0;
  bool refund_if_unmeasured = true;

  static Ticket g0() { return {TicketKind::G0, 1.0, false}; }
  static Ticket g1() { return {TicketKind::G1, 1.0, true}; }
  static Ticket g2() { return {TicketKind::G2, 1.0, true}; }
  static Ticket g01() { return {TicketKind::G01, 1.0, true}; }
};

struct Perspective {
  enum class Kind { External, InternalAfterOutcome };
  Kind kind = Kind::External;
  int c = -1;

  static Perspective external() { return {Kind::External, -1}; }
  static Perspective internal(int c) {
    return {Kind::InternalAfterOutcome, c};
  }
};

// The superobserver's two settings.
enum class EugeneSetting { PopAndAsk, ReverseAndMeasure };

enum class SettleOrder {
  WalletFirst,
  MeasurementFirst,
  Simultaneous,
  WalletBeforeReversal,  // reversal setting only
};

// Wallet register: one basis slot per distinct ledger amount realized in the
// protocol instance; slot 0 is the empty wallet 0.0.
struct WalletRegister {
  SystemLabel reg;
  std::vector<double> labels;
  int index_of(double value) const;
};

// Betting commitment for the ticket from the given perspective. Internal
// pricing of G2 collapses to the external price when the two conditional
// prices coincide within 1e-12 (the wallet then carries no information).
double price_ticket(const Ticket& t, const Perspective& p, const BetSetup& s,
                    EugeneSetting x);

// Per-branch prices the bet unitary debits: one entry (external) or one per
// friend outcome (internal).
std::vector<double> protocol_prices(const Ticket& t, Perspective::Kind kind,
                                    const BetSetup& s, EugeneSetting x);

WalletRegister make_wallet(const std::vector<double>& prices);

// |phi0>|R>|0.0> taken through the friend's measurement: the state on which
// bets are placed. Factors: S, F, C.
StateVector bet_initial_state(const BetSetup& s, const WalletRegister& wallet);

// The bet unitary: external bets debit the wallet unconditionally, internal
// bets debit conditionally on the pointer, entangling C with F.
// Throws when a price is not among the wallet's value labels.
StateVector apply_bet(const StateVector& state, const Ticket& t,
                      Perspective::Kind kind, const std::vector<double>& prices,
                      const WalletRegister& wallet);

struct SettlementReport {
  struct Outcome {
    double wallet_label = 0.0;
    bool hit = false;  // payoff projector observed
    double probability = 0.0;
    double gain = 0.0;  // wallet label plus payoff when hit
  };
  std::vector<Outcome> joint;
  std::vector<std::pair<double, double>> gains;  // (net gain, probability)
  double expected_gain = 0.0;
  bool refunded = false;
  SettleOrder order = SettleOrder::Simultaneous;
};

// Eugene settles the ticket: interrogation pays on the friend's |O_0>
// record, the reversal setting pays on the phi2 projector. All orders give
// the same joint distribution; they are computed along genuinely different
// measurement sequences and compared in the tests.
SettlementReport settle(const StateVector& bet_state, EugeneSetting x,
                        const Ticket& t, SettleOrder order, const BetSetup& s,
                        const WalletRegister& wallet);

// Eugene's minimum sale price given what Franz knows (optional check, off by
// default in run_protocol).
double minimum_sale_price(const Ticket& t, const Perspective& p,
                          const BetSetup& s, EugeneSetting x);

// Price, build the wallet, place the bet, and settle in one pass.
SettlementReport run_protocol(const Ticket& t, Perspective::Kind kind,
                              const BetSetup& s, EugeneSetting x,
                              SettleOrder order,
                              bool enforce_minimum_sale_price = false);

struct AuditReport {
  double p0 = 0.0, p2 = 0.0, p2_0 = 0.0, p2_1 = 0.0;
  double external_x1 = 0.0, internal_marginal_x1 = 0.0, gap_x1 = 0.0;
  double external_x2 = 0.0, internal_marginal_x2 = 0.0, gap_x2 = 0.0;
  // Pointer-basis coherence of the system+friend state, traced over C.
  double offdiag_no_bet = 0.0, offdiag_internal_bet = 0.0;
  bool wallet_uninformative = false;  // p2_0 == p2_1 within 1e-12
  bool near_degenerate = false;       // within 1e-6 but not within 1e-12
  // The instructed degenerate-case price p2 differs from the branch price.
  bool special_case_tension = false;
};

// Law-of-total-probability check between external and internal betting
// commitments, with the wallet-decoherence diagnosis.
AuditReport total_probability_audit(const BetSetup& s);

// P^e(a,c) for the interrogation setting. The reversal setting is refused:
// without Absoluteness of Observed Events there is no such joint there.
Eigen::MatrixXd joint_ticket_value(const BetSetup& s, EugeneSetting x);

}  // namespace ewfs
