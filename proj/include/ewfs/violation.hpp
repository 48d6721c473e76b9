#pragma once

#include <cstdint>
#include <vector>

#include "ewfs/polytope.hpp"
#include "ewfs/scenario.hpp"

namespace ewfs {

struct QubitAngles {
  double theta = 0.0;
  double phi = 0.0;
};

// Free parameters of a one-friend qubit EWFS: Bloch angles per optimizable
// setting and, optionally, the entangling angle of the initial state
// alpha = cos(state_angle), beta = sin(state_angle).
struct MeasurementParams {
  std::vector<QubitAngles> alice;  // settings 1..nx-1 (or all, trivial friend)
  std::vector<QubitAngles> bob;
  double state_angle = 0.0;
};

// Scenario skeleton the optimizer instantiates. With a friend, Alice's
// setting 0 is the pointer interrogation and the rest reverse-and-measure;
// with trivial_friend every Alice setting measures the system directly.
struct ScenarioTemplate {
  int nx = 2;
  int ny = 2;
  bool trivial_friend = false;

  int free_alice_settings() const { return trivial_friend ? nx : nx - 1; }
};

struct OptimizeConfig {
  int restarts = 20;
  std::uint64_t seed = 0;
  int max_sweeps = 60;      // coordinate-descent sweeps per restart
  double tol = 1e-10;       // convergence threshold on objective improvement
  bool optimize_state = false;  // default: maximally entangled initial state
};

struct TraceEntry {
  int restart = 0;
  int sweep = 0;
  double value = 0.0;
};

struct ViolationResult {
  MeasurementParams params;
  double value = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  std::vector<TraceEntry> trace;
};

// Orthonormal qubit basis at Bloch angles (theta, phi).
std::vector<CVec> bloch_basis(const QubitAngles& angles);

BubbleScenario instantiate(const ScenarioTemplate& tpl,
                           const MeasurementParams& params);

// Value of the inequality on the unitary-model correlations of the
// instantiated scenario.
double objective(const MeasurementParams& params, const Inequality& iq,
                 const ScenarioTemplate& tpl);

// Derivative-free coordinate descent over the angles with golden-section
// refinement and seeded random restarts. Deterministic for a fixed config.
ViolationResult optimize(const Inequality& iq, const ScenarioTemplate& tpl,
                         const OptimizeConfig& config);

}  // namespace ewfs
