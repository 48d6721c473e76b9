#include "ewfs/violation.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace ewfs {

namespace {

const SystemLabel kSa{"SA", 2};
const SystemLabel kSb{"SB", 2};
const SystemLabel kFa{"FA", 3};
const SystemLabel kFaTrivial{"FA", 1};
const SystemLabel kFb{"FB", 1};

std::vector<CVec> computational() {
  CVec e0(2), e1(2);
  e0 << 1, 0;
  e1 << 0, 1;
  return {e0, e1};
}

}  // namespace

std::vector<CVec> bloch_basis(const QubitAngles& angles) {
  const double c = std::cos(angles.theta / 2), s = std::sin(angles.theta / 2);
  const cdouble ph = std::polar(1.0, angles.phi);
  CVec up(2), down(2);
  up << c, ph * s;
  down << -std::conj(ph) * s, c;
  return {up, down};
}

BubbleScenario instantiate(const ScenarioTemplate& tpl,
                           const MeasurementParams& params) {
  if (static_cast<int>(params.alice.size()) != tpl.free_alice_settings() ||
      static_cast<int>(params.bob.size()) != tpl.ny)
    throw std::invalid_argument("parameter count does not match the template");

  BubbleScenario sc;
  sc.alice.system = kSa;
  sc.bob.system = kSb;
  sc.bob.pointer = kFb;
  if (tpl.trivial_friend) {
    sc.alice.pointer = kFaTrivial;
    for (const auto& ang : params.alice)
      sc.alice.settings.push_back(SuperobserverSetting::direct_projective(
          Measurement::from_basis({kSa}, bloch_basis(ang))));
  } else {
    sc.alice.pointer = kFa;
    sc.alice.friend_basis = computational();
    sc.alice.settings.push_back(SuperobserverSetting::pointer_ask());
    for (const auto& ang : params.alice)
      sc.alice.settings.push_back(SuperobserverSetting::reverse_and_measure(
          Measurement::from_basis({kSa}, bloch_basis(ang))));
  }
  for (const auto& ang : params.bob)
    sc.bob.settings.push_back(SuperobserverSetting::direct_projective(
        Measurement::from_basis({kSb}, bloch_basis(ang))));

  CVec init = CVec::Zero(4);
  init[0] = std::cos(params.state_angle);
  init[3] = std::sin(params.state_angle);
  sc.initial = StateVector({kSa, kSb}, init);
  return sc;
}

double objective(const MeasurementParams& params, const Inequality& iq,
                 const ScenarioTemplate& tpl) {
  const CorrelationTable t = run_correlations(instantiate(tpl, params));
  return evaluate_inequality(t, iq).value;
}

namespace {

std::vector<double*> coordinates(MeasurementParams& p, bool with_state) {
  std::vector<double*> c;
  for (auto& a : p.alice) {
    c.push_back(&a.theta);
    c.push_back(&a.phi);
  }
  for (auto& b : p.bob) {
    c.push_back(&b.theta);
    c.push_back(&b.phi);
  }
  if (with_state) c.push_back(&p.state_angle);
  return c;
}

// Coarse periodic grid scan followed by golden-section refinement.
double line_maximize(double* coord, MeasurementParams& params,
                     const Inequality& iq, const ScenarioTemplate& tpl) {
  auto eval = [&](double v) {
    *coord = v;
    return objective(params, iq, tpl);
  };
  const double period = 2 * M_PI;
  const int grid = 24;
  double best_v = *coord, best_f = eval(*coord);
  for (int i = 0; i < grid; ++i) {
    const double v = -M_PI + period * i / grid;
    const double f = eval(v);
    if (f > best_f) {
      best_f = f;
      best_v = v;
    }
  }
  double lo = best_v - period / grid, hi = best_v + period / grid;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = eval(x1), f2 = eval(x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = eval(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = eval(x1);
    }
  }
  const double mid = (lo + hi) / 2;
  const double fm = eval(mid);
  if (fm >= best_f) return fm;
  return eval(best_v);
}

}  // namespace

ViolationResult optimize(const Inequality& iq, const ScenarioTemplate& tpl,
                         const OptimizeConfig& config) {
  std::mt19937_64 gen(config.seed);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);

  ViolationResult best;
  best.bound = iq.bound;
  best.value = -1e300;

  for (int restart = 0; restart < config.restarts; ++restart) {
    MeasurementParams params;
    params.alice.resize(tpl.free_alice_settings());
    params.bob.resize(tpl.ny);
    for (auto& a : params.alice) {
      a.theta = ang(gen);
      a.phi = ang(gen);
    }
    for (auto& b : params.bob) {
      b.theta = ang(gen);
      b.phi = ang(gen);
    }
    params.state_angle =
        config.optimize_state ? ang(gen) / 4 + M_PI / 4 : M_PI / 4;

    std::vector<double*> coords = coordinates(params, config.optimize_state);
    double value = objective(params, iq, tpl);
    for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
      const double before = value;
      for (double* c : coords) value = line_maximize(c, params, iq, tpl);
      best.trace.push_back({restart, sweep, value});
      if (value - before < config.tol) break;
    }
    if (value > best.value) {
      best.value = value;
      best.params = params;
    }
  }
  best.margin = best.value - iq.bound;

  // The reported value must replay: re-instantiate and re-evaluate.
  const double replay = objective(best.params, iq, tpl);
  if (std::abs(replay - best.value) > 1e-9)
    throw std::logic_error("optimizer result failed replay verification");
  best.value = replay;
  best.margin = replay - iq.bound;
  return best;
}

}  // namespace ewfs
