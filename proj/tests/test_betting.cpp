#include "doctest.h"

#include <cmath>

#include "ewfs/betting.hpp"
#include "test_helpers.hpp"

using namespace ewfs;
namespace et = ewfs::testing;

namespace {

const BetSetup kPaperSetup{0.6, 0.8, 0.6, 0.8};

BetSetup random_setup(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.05, M_PI / 2 - 0.05);
  std::uniform_real_distribution<double> ph(-M_PI, M_PI);
  const double t1 = u(gen), t2 = u(gen);
  return {std::cos(t1), std::polar(std::sin(t1), ph(gen)),
          std::cos(t2), std::polar(std::sin(t2), ph(gen))};
}

double gain_probability(const SettlementReport& rep, double gain) {
  for (const auto& [g, p] : rep.gains)
    if (std::abs(g - gain) < 1e-12) return p;
  return 0.0;
}

}  // namespace

TEST_CASE("ticket pricing") {
  const Ticket g1 = Ticket::g1();
  CHECK(price_ticket(g1, Perspective::external(), kPaperSetup,
                     EugeneSetting::PopAndAsk) == doctest::Approx(0.36));
  CHECK(price_ticket(g1, Perspective::internal(0), kPaperSetup,
                     EugeneSetting::PopAndAsk) == doctest::Approx(1.0));
  CHECK(price_ticket(g1, Perspective::internal(1), kPaperSetup,
                     EugeneSetting::PopAndAsk) == doctest::Approx(0.0));

  const Ticket g2 = Ticket::g2();
  CHECK(price_ticket(g2, Perspective::internal(0), kPaperSetup,
                     EugeneSetting::ReverseAndMeasure) ==
        doctest::Approx(0.36));
  CHECK(price_ticket(g2, Perspective::internal(1), kPaperSetup,
                     EugeneSetting::ReverseAndMeasure) ==
        doctest::Approx(0.64));
  // External pricing matches the friendless Born prediction.
  CHECK(price_ticket(g2, Perspective::external(), kPaperSetup,
                     EugeneSetting::ReverseAndMeasure) ==
        doctest::Approx(1.0));

  CHECK_THROWS_AS(price_ticket(g1, Perspective::external(), kPaperSetup,
                               EugeneSetting::ReverseAndMeasure),
                  std::invalid_argument);
}

TEST_CASE("degenerate internal price follows the external one") {
  const double h = 1 / std::sqrt(2.0);
  const BetSetup s{0.6, 0.8, h, h};
  const double p2 = s.p2();
  for (int c = 0; c < 2; ++c)
    CHECK(price_ticket(Ticket::g2(), Perspective::internal(c), s,
                       EugeneSetting::ReverseAndMeasure) ==
          doctest::Approx(p2).epsilon(1e-12));
  // Near-degenerate branch prices do not trigger the override.
  const double eps = 1e-4;
  const BetSetup near{0.6, 0.8, std::sqrt(0.5 + eps), std::sqrt(0.5 - eps)};
  CHECK(price_ticket(Ticket::g2(), Perspective::internal(0), near,
                     EugeneSetting::ReverseAndMeasure) ==
        doctest::Approx(0.5 + eps).epsilon(1e-12));
}

TEST_CASE("external interrogation gamble reproduces the ledger") {
  const auto rep =
      run_protocol(Ticket::g1(), Perspective::Kind::External, kPaperSetup,
                   EugeneSetting::PopAndAsk, SettleOrder::Simultaneous);
  CHECK(gain_probability(rep, 0.64) == doctest::Approx(0.36).epsilon(1e-12));
  CHECK(gain_probability(rep, -0.36) == doctest::Approx(0.64).epsilon(1e-12));
  CHECK(std::abs(rep.expected_gain) < 1e-12);
}

TEST_CASE("internal interrogation gamble nets zero in every branch") {
  const auto rep =
      run_protocol(Ticket::g1(), Perspective::Kind::InternalAfterOutcome,
                   kPaperSetup, EugeneSetting::PopAndAsk,
                   SettleOrder::Simultaneous);
  CHECK(gain_probability(rep, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(rep.expected_gain) < 1e-12);
}

TEST_CASE("internal reversal gamble: wallet then measurement") {
  // alpha = gamma = 0.6: wallet shows -0.36 with probability 0.36, and the
  // payoff projector then hits with probability 0.36; similarly for -0.64.
  const auto rep =
      run_protocol(Ticket::g2(), Perspective::Kind::InternalAfterOutcome,
                   kPaperSetup, EugeneSetting::ReverseAndMeasure,
                   SettleOrder::WalletFirst);
  double p_wallet_36 = 0.0, p_hit_given_36 = 0.0;
  for (const auto& o : rep.joint) {
    if (std::abs(o.wallet_label + 0.36) < 1e-12) {
      p_wallet_36 += o.probability;
      if (o.hit) p_hit_given_36 = o.probability;
    }
  }
  CHECK(p_wallet_36 == doctest::Approx(0.36).epsilon(1e-10));
  CHECK(p_hit_given_36 == doctest::Approx(0.36 * 0.36).epsilon(1e-10));
  CHECK(std::abs(rep.expected_gain) < 1e-10);
}

TEST_CASE("settlement order independence") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto gen = et::rng(seed);
    const BetSetup s = random_setup(gen);
    const auto base =
        run_protocol(Ticket::g2(), Perspective::Kind::InternalAfterOutcome, s,
                     EugeneSetting::ReverseAndMeasure, SettleOrder::Simultaneous);
    for (const SettleOrder order :
         {SettleOrder::WalletFirst, SettleOrder::MeasurementFirst,
          SettleOrder::WalletBeforeReversal}) {
      const auto rep =
          run_protocol(Ticket::g2(), Perspective::Kind::InternalAfterOutcome, s,
                       EugeneSetting::ReverseAndMeasure, order);
      CHECK(std::abs(rep.expected_gain - base.expected_gain) < 1e-10);
      for (const auto& o : rep.joint) {
        double match = 0.0;
        for (const auto& ob : base.joint)
          if (std::abs(ob.wallet_label - o.wallet_label) < 1e-12 &&
              ob.hit == o.hit)
            match += ob.probability;
        CHECK(std::abs(match - o.probability) < 1e-10);
      }
    }
  }
}

TEST_CASE("refunds and unsettleable tickets") {
  const auto rep =
      run_protocol(Ticket::g1(), Perspective::Kind::External, kPaperSetup,
                   EugeneSetting::ReverseAndMeasure, SettleOrder::Simultaneous);
  CHECK(rep.refunded);
  CHECK(rep.expected_gain == 0.0);
  CHECK(gain_probability(rep, 0.0) == doctest::Approx(1.0));

  CHECK_THROWS_AS(
      run_protocol(Ticket::g0(), Perspective::Kind::External, kPaperSetup,
                   EugeneSetting::PopAndAsk, SettleOrder::Simultaneous),
      std::invalid_argument);

  CHECK_THROWS_AS(
      run_protocol(Ticket::g1(), Perspective::Kind::External, kPaperSetup,
                   EugeneSetting::PopAndAsk, SettleOrder::WalletBeforeReversal),
      std::invalid_argument);
}

TEST_CASE("zero expected gain across perspectives and tickets") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto gen = et::rng(1000 + seed);
    const BetSetup s = random_setup(gen);
    for (const auto kind : {Perspective::Kind::External,
                            Perspective::Kind::InternalAfterOutcome}) {
      const auto r1 = run_protocol(Ticket::g1(), kind, s,
                                   EugeneSetting::PopAndAsk,
                                   SettleOrder::Simultaneous);
      CHECK(std::abs(r1.expected_gain) < 1e-10);
      const auto r2 = run_protocol(Ticket::g2(), kind, s,
                                   EugeneSetting::ReverseAndMeasure,
                                   SettleOrder::Simultaneous);
      CHECK(std::abs(r2.expected_gain) < 1e-10);
    }
  }
}

TEST_CASE("total probability audit") {
  const AuditReport rep = total_probability_audit(kPaperSetup);
  CHECK(rep.gap_x1 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rep.internal_marginal_x2 == doctest::Approx(0.5392).epsilon(1e-12));
  CHECK(rep.external_x2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.gap_x2 == doctest::Approx(0.4608).epsilon(1e-10));
  CHECK(!rep.wallet_uninformative);

  // Internal betting with distinct branch prices kills the coherence.
  CHECK(rep.offdiag_no_bet == doctest::Approx(0.48).epsilon(1e-12));
  CHECK(rep.offdiag_internal_bet == doctest::Approx(0.0).epsilon(1e-12));

  // Equal branch prices leave the bubble intact.
  const double h = 1 / std::sqrt(2.0);
  const AuditReport deg = total_probability_audit({0.6, 0.8, h, h});
  CHECK(deg.wallet_uninformative);
  CHECK(std::abs(deg.offdiag_internal_bet - deg.offdiag_no_bet) < 1e-11);
  CHECK(deg.special_case_tension);  // p2 != p2^0 here, as flagged

  const AuditReport near =
      total_probability_audit({0.6, 0.8, std::sqrt(0.5 + 1e-8),
                               std::sqrt(0.5 - 1e-8)});
  CHECK(!near.wallet_uninformative);
  CHECK(near.near_degenerate);
}

TEST_CASE("audit gap vanishes on the interrogation side for any setup") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto gen = et::rng(3000 + seed);
    const AuditReport rep = total_probability_audit(random_setup(gen));
    CHECK(rep.gap_x1 < 1e-11);
    // The reversal-side gap is whatever the pointwise numbers say.
    const double expect =
        std::abs(rep.p2 - (rep.p2_0 * rep.p0 + rep.p2_1 * (1 - rep.p0)));
    CHECK(rep.gap_x2 == doctest::Approx(expect).epsilon(1e-12));
    // Distinct branch prices wipe out the pointer-basis coherence.
    if (!rep.wallet_uninformative) {
      CHECK(rep.offdiag_internal_bet < 1e-12);
      CHECK(rep.offdiag_internal_bet < rep.offdiag_no_bet);
    }
  }
}

TEST_CASE("joint ticket values") {
  const Eigen::MatrixXd joint =
      joint_ticket_value(kPaperSetup, EugeneSetting::PopAndAsk);
  CHECK(joint(0, 0) == doctest::Approx(0.36));
  CHECK(joint(1, 1) == doctest::Approx(0.64));
  CHECK(joint(0, 1) == 0.0);
  CHECK(joint(1, 0) == 0.0);

  const Eigen::MatrixXd certain =
      joint_ticket_value({1.0, 0.0, 0.6, 0.8}, EugeneSetting::PopAndAsk);
  CHECK(certain(0, 0) == doctest::Approx(1.0));

  CHECK_THROWS_AS(joint_ticket_value(kPaperSetup,
                                     EugeneSetting::ReverseAndMeasure),
                  std::domain_error);
}

TEST_CASE("wallet register bookkeeping") {
  const WalletRegister w = make_wallet({0.36, 0.64, 0.36});
  CHECK(w.labels.size() == 3);  // 0.0, -0.36, -0.64; duplicates merged
  CHECK(w.labels[0] == 0.0);
  CHECK(w.index_of(-0.36) == 1);
  CHECK(w.index_of(0.25) == -1);

  // A price outside the register is rejected.
  const StateVector st = bet_initial_state(kPaperSetup, w);
  CHECK_THROWS_AS(apply_bet(st, Ticket::g2(),
                            Perspective::Kind::InternalAfterOutcome,
                            {0.36, 0.5}, w),
                  std::invalid_argument);

  // Eugene's optional floor accepts the protocol's own prices.
  const auto rep = run_protocol(
      Ticket::g2(), Perspective::Kind::InternalAfterOutcome, kPaperSetup,
      EugeneSetting::ReverseAndMeasure, SettleOrder::Simultaneous,
      /*enforce_minimum_sale_price=*/true);
  CHECK(std::abs(rep.expected_gain) < 1e-10);
}
