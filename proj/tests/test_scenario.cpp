#include "doctest.h"

#include <cmath>

#include "ewfs/scenario.hpp"
#include "test_helpers.hpp"

using namespace ewfs;
namespace et = ewfs::testing;

namespace {

const SystemLabel SA{"SA", 2};
const SystemLabel SB{"SB", 2};
const SystemLabel FA{"FA", 3};
const SystemLabel FB{"FB", 1};  // no friend on Bob's side by default

CVec qv(cdouble a0, cdouble a1) {
  CVec v(2);
  v << a0, a1;
  return v;
}

std::vector<CVec> computational() { return {qv(1, 0), qv(0, 1)}; }

std::vector<CVec> rotated(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  return {qv(c, s), qv(-s, c)};
}

StateVector entangled(cdouble alpha, cdouble beta) {
  CVec v = CVec::Zero(4);
  v[0] = alpha;
  v[3] = beta;
  return StateVector({SA, SB}, v);
}

// One friend on Alice's side measuring the computational basis; Alice's
// extra settings reverse and measure at the given angles; Bob measures
// directly at his angles.
BubbleScenario one_friend_scenario(cdouble alpha, cdouble beta,
                                   const std::vector<double>& alice_angles,
                                   const std::vector<double>& bob_angles) {
  BubbleScenario sc;
  sc.alice.system = SA;
  sc.alice.pointer = FA;
  sc.alice.friend_basis = computational();
  sc.alice.settings.push_back(SuperobserverSetting::pointer_ask());
  for (double t : alice_angles)
    sc.alice.settings.push_back(SuperobserverSetting::reverse_and_measure(
        Measurement::from_basis({SA}, rotated(t))));
  sc.bob.system = SB;
  sc.bob.pointer = FB;
  for (double t : bob_angles)
    sc.bob.settings.push_back(SuperobserverSetting::direct_projective(
        Measurement::from_basis({SB}, rotated(t))));
  sc.initial = entangled(alpha, beta);
  return sc;
}

}  // namespace

TEST_CASE("validate flags structural problems") {
  BubbleScenario sc = one_friend_scenario(1 / std::sqrt(2.0), 1 / std::sqrt(2.0),
                                          {M_PI / 2}, {0.0, M_PI / 2});
  CHECK(validate(sc).ok());

  BubbleScenario bad_norm = sc;
  bad_norm.initial = entangled(0.6, 0.9);
  const auto r1 = validate(bad_norm);
  CHECK(!r1.ok());
  CHECK(r1.violations[0].find("norm") != std::string::npos);

  BubbleScenario bad_first = sc;
  bad_first.alice.settings[0] = SuperobserverSetting::reverse_and_measure(
      Measurement::from_basis({SA}, computational()));
  const auto r2 = validate(bad_first);
  CHECK(!r2.ok());
  CHECK(r2.violations[0].find("PointerAsk") != std::string::npos);
}

TEST_CASE("pointer interrogation of the Bell pair") {
  const double h = 1 / std::sqrt(2.0);
  BubbleScenario sc = one_friend_scenario(h, h, {0.0}, {0.0});
  const CorrelationTable t = run_correlations(sc);

  // Oracle: the 12-dimensional post-measurement vector written out by hand.
  // (|0,0,O0> + |1,1,O1>)/sqrt(2); reading the pointer and Bob's qubit in
  // the computational basis leaves only the diagonal entries.
  CVec psi1 = CVec::Zero(12);
  psi1[0 * 6 + 0 * 3 + 1] = h;
  psi1[1 * 6 + 1 * 3 + 2] = h;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      double oracle = 0.0;
      for (int sa = 0; sa < 2; ++sa)
        oracle += std::norm(psi1[sa * 6 + b * 3 + (a + 1)]);
      CHECK(t.at(0, 0, a, b) == doctest::Approx(oracle).epsilon(1e-12));
    }
  CHECK(t.at(0, 0, 0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(t.at(0, 0, 1, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(t.at(0, 0, 0, 1)) < 1e-12);
  CHECK(std::abs(t.at(0, 0, 1, 0)) < 1e-12);

  // Reversing and re-measuring the same basis reproduces the x=0 block.
  for (int y = 0; y < t.ny; ++y)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        CHECK(t.at(1, y, a, b) == doctest::Approx(t.at(0, y, a, b)).epsilon(1e-12));

  CHECK(no_signalling_report(t).pass(1e-10));
}

TEST_CASE("collapse comparator differs exactly where coherence matters") {
  const double h = 1 / std::sqrt(2.0);
  // x=1 reverses and measures the +/- basis, Bob measures +/- too.
  BubbleScenario sc = one_friend_scenario(h, h, {M_PI / 2}, {M_PI / 2});
  const CorrelationTable uni = run_correlations(sc);
  const CorrelationTable col = run_collapse_correlations(sc);

  // Pointer interrogation commutes with the collapse.
  for (int y = 0; y < sc.ny(); ++y)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        CHECK(col.at(0, y, a, b) ==
              doctest::Approx(uni.at(0, y, a, b)).epsilon(1e-10));

  // Unitary model: X(x)X correlations of the Bell pair are perfect.
  CHECK(uni.at(1, 0, 0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(uni.at(1, 0, 0, 1)) < 1e-12);

  // Two-branch mixture oracle: collapsing to |00> or |11> each with
  // probability 1/2 makes the +/- outcomes uniform and uncorrelated.
  for (int a = 0; a < 2; ++a) {
    double marg = 0.0;
    for (int b = 0; b < 2; ++b) {
      double oracle = 0.0;
      for (int branch = 0; branch < 2; ++branch) oracle += 0.5 * 0.5 * 0.5;
      CHECK(col.at(1, 0, a, b) == doctest::Approx(oracle).epsilon(1e-12));
      marg += col.at(1, 0, a, b);
    }
    CHECK(marg == doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK(no_signalling_report(col).pass(1e-10));

  // Eigenstate input: a single branch, so the two models coincide.
  BubbleScenario eig = one_friend_scenario(1.0, 0.0, {M_PI / 2}, {M_PI / 2});
  const CorrelationTable ue = run_correlations(eig);
  const CorrelationTable ce = run_collapse_correlations(eig);
  for (long i = 0; i < ue.size(); ++i)
    CHECK(ce.p[i] == doctest::Approx(ue.p[i]).epsilon(1e-10));
}

TEST_CASE("friend marginal") {
  BubbleScenario sc = one_friend_scenario(0.6, 0.8, {M_PI / 2}, {0.0});
  const auto m = friend_marginal(sc, 0);
  CHECK(m[0] == doctest::Approx(0.36).epsilon(1e-12));
  CHECK(m[1] == doctest::Approx(0.64).epsilon(1e-12));
  // The bookkeeping quantity is setting-independent.
  const auto m1 = friend_marginal(sc, 1);
  CHECK(m1[0] == doctest::Approx(m[0]).epsilon(1e-15));
  CHECK_THROWS_AS(friend_marginal(sc, 7), std::invalid_argument);

  const double h = 1 / std::sqrt(2.0);
  const auto half = friend_marginal(one_friend_scenario(h, h, {0.0}, {0.0}), 0);
  CHECK(half[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("interrogating the friend then re-measuring the system is consistent") {
  // The superobserver may re-measure the system right after reading the
  // pointer; the conditional outcome must equal the reported value.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto gen = et::rng(900 + seed);
    const CMat fb = et::random_unitary(gen, 2);
    std::vector<StateVector> basis = {StateVector({SA}, fb.col(0)),
                                      StateVector({SA}, fb.col(1))};
    const Operator u1 = dilate_measurement(basis, FA);
    const StateVector psi0({SA, SB}, et::random_state(gen, 4));
    const StateVector psi1 = apply(u1, tensor(psi0, basis_state({FA}, 0)));
    for (int c = 0; c < 2; ++c)
      for (int cp = 0; cp < 2; ++cp) {
        CMat pf = CMat::Zero(3, 3);
        pf(c + 1, c + 1) = 1.0;
        const double joint =
            born(psi1, tensor(Operator({FA}, pf), projector_onto(basis[cp])));
        if (c != cp) CHECK(std::abs(joint) < 1e-12);
      }
  }
}

TEST_CASE("randomized scenarios stay normalized and no-signalling") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto gen = et::rng(seed);
    std::uniform_real_distribution<double> ang(0.0, 2 * M_PI);
    BubbleScenario sc;
    sc.alice.system = SA;
    sc.alice.pointer = FA;
    const CMat fb = et::random_unitary(gen, 2);
    sc.alice.friend_basis = {fb.col(0), fb.col(1)};
    sc.alice.settings.push_back(SuperobserverSetting::pointer_ask());
    sc.alice.settings.push_back(SuperobserverSetting::reverse_and_measure(
        Measurement::from_basis({SA}, rotated(ang(gen)))));
    sc.bob.system = SB;
    sc.bob.pointer = FB;
    for (int y = 0; y < 2; ++y)
      sc.bob.settings.push_back(SuperobserverSetting::direct_projective(
          Measurement::from_basis({SB}, rotated(ang(gen)))));
    sc.initial = StateVector({SA, SB}, et::random_state(gen, 4));

    const CorrelationTable uni = run_correlations(sc);
    CHECK(uni.normalization_deviation() < 1e-10);
    CHECK(no_signalling_report(uni).pass(1e-10));

    const CorrelationTable col = run_collapse_correlations(sc);
    CHECK(col.normalization_deviation() < 1e-10);
    CHECK(no_signalling_report(col).pass(1e-10));

    // Pointer interrogation agrees between the two dynamics for any y.
    for (int y = 0; y < sc.ny(); ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          CHECK(std::abs(col.at(0, y, a, b) - uni.at(0, y, a, b)) < 1e-10);
  }
}

TEST_CASE("collapse leaves Alice marginals alone when the friend basis "
          "diagonalizes her reduced state") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    auto gen = et::rng(4000 + seed);
    std::uniform_real_distribution<double> ang(0.0, 2 * M_PI);
    std::uniform_real_distribution<double> amp(0.1, 0.9);
    const double a0 = std::sqrt(amp(gen));
    // Schmidt-aligned initial state: friend basis (computational) is an
    // eigenbasis of rho_SA.
    BubbleScenario sc = one_friend_scenario(a0, std::sqrt(1 - a0 * a0),
                                            {ang(gen), ang(gen)}, {ang(gen)});
    const CorrelationTable uni = run_correlations(sc);
    const CorrelationTable col = run_collapse_correlations(sc);
    for (int x = 0; x < sc.nx(); ++x)
      for (int a = 0; a < 2; ++a) {
        double mu = 0.0, mc = 0.0;
        for (int b = 0; b < 2; ++b) {
          mu += uni.at(x, 0, a, b);
          mc += col.at(x, 0, a, b);
        }
        CHECK(std::abs(mu - mc) < 1e-10);
      }
  }
}

TEST_CASE("two friends mirror the structure on Bob's side") {
  const double h = 1 / std::sqrt(2.0);
  BubbleScenario sc;
  sc.alice.system = SA;
  sc.alice.pointer = FA;
  sc.alice.friend_basis = computational();
  sc.alice.settings.push_back(SuperobserverSetting::pointer_ask());
  sc.alice.settings.push_back(SuperobserverSetting::reverse_and_measure(
      Measurement::from_basis({SA}, rotated(M_PI / 2))));
  sc.bob.system = SB;
  sc.bob.pointer = SystemLabel{"FB", 3};
  sc.bob.friend_basis = computational();
  sc.bob.settings.push_back(SuperobserverSetting::pointer_ask());
  sc.bob.settings.push_back(SuperobserverSetting::reverse_and_measure(
      Measurement::from_basis({SB}, rotated(M_PI / 2))));
  sc.initial = entangled(h, h);
  CHECK(validate(sc).ok());

  const CorrelationTable t = run_correlations(sc);
  CHECK(no_signalling_report(t).pass(1e-10));
  // Both friends interrogated: perfectly correlated reports.
  CHECK(t.at(0, 0, 0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(t.at(0, 0, 0, 1)) < 1e-12);
  // Both reversed: X(x)X correlations of the Bell pair.
  CHECK(t.at(1, 1, 0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(t.at(1, 1, 0, 1)) < 1e-12);
}

TEST_CASE("trivial friend reduces to an ordinary Bell scenario") {
  const double h = 1 / std::sqrt(2.0);
  BubbleScenario sc;
  sc.alice.system = SA;
  sc.alice.pointer = SystemLabel{"FA", 1};
  for (double t : {0.0, M_PI / 2})
    sc.alice.settings.push_back(SuperobserverSetting::direct_projective(
        Measurement::from_basis({SA}, rotated(t))));
  sc.bob.system = SB;
  sc.bob.pointer = FB;
  for (double t : {M_PI / 4, -M_PI / 4})
    sc.bob.settings.push_back(SuperobserverSetting::direct_projective(
        Measurement::from_basis({SB}, rotated(t))));
  sc.initial = entangled(h, h);
  CHECK(validate(sc).ok());

  const CorrelationTable t = run_correlations(sc);
  // E(x,y) = cos(theta_x - theta_y) at the Tsirelson angles.
  auto corr = [&](int x, int y) {
    return t.at(x, y, 0, 0) + t.at(x, y, 1, 1) - t.at(x, y, 0, 1) -
           t.at(x, y, 1, 0);
  };
  const double r = std::sqrt(0.5);
  CHECK(corr(0, 0) == doctest::Approx(r).epsilon(1e-10));
  CHECK(corr(0, 1) == doctest::Approx(r).epsilon(1e-10));
  CHECK(corr(1, 0) == doctest::Approx(r).epsilon(1e-10));
  CHECK(corr(1, 1) == doctest::Approx(-r).epsilon(1e-10));
}
