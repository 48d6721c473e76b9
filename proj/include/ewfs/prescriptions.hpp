#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ewfs/qcore.hpp"

namespace ewfs {

// Single-party prescription scenario: a d-dimensional system measured by the
// friend in the computational basis, then measured together with the friend's
// pointer by the superobserver's apparatus register. Setting 0 is the pointer
// interrogation; extra settings are d x d unitaries whose column a holds the
// coefficients beta_{c,a} of the measured vector in the {|c>|O_c>} span.
struct BBScenario {
  int d = 2;
  CVec alpha;                    // initial amplitudes, length d
  std::vector<CMat> extra_bases; // settings 1.. (setting 0 is fixed)

  int settings() const { return 1 + static_cast<int>(extra_bases.size()); }
};

BBScenario bb_fourier_instance(int d);  // eigenstate input + Fourier readout

// Joint two-pointer distribution P(a,c | setting): the projector trace on
// the assembled system+friend+apparatus state. Row a, column c.
Eigen::MatrixXd bb_joint(const BBScenario& sc, int setting);

// Friend-outcome marginal P(c | setting).
std::vector<double> bb_friend_marginal(const BBScenario& sc, int setting);

struct RetroReport {
  std::vector<double> p_interrogation;  // P(c | setting 0)
  std::vector<double> p_alternative;    // P(c | setting 1)
  double l1_distance = 0.0;
  bool flagged = false;  // distance > 1e-9: the two assignments disagree
};

// Eigenstate + Fourier instance: the friend-outcome distribution depends on
// the superobserver's future setting choice.
RetroReport bb_retro_demo(int d);

struct DeutschScenario {
  cdouble alpha;
  cdouble beta;
};

struct DeutschUnitaryResult {
  StateVector final_state;      // system, sensory and record registers
  double p_phi0 = 0.0;          // probability of the initial-state projector
  double fm_record_prob = 0.0;  // probability the record register holds |O>
};

// Measure, record completion, reverse: the system returns to its initial
// state with certainty while the record register keeps |O>.
DeutschUnitaryResult deutsch_unitary(const DeutschScenario& sc);

struct DeutschCollapseResult {
  double p_phi0 = 0.0;  // |alpha|^4 + |beta|^4
};

// Comparator dynamics: collapse right after the sensory measurement, then
// the same record/reverse steps per branch.
DeutschCollapseResult deutsch_collapse(const DeutschScenario& sc);

}  // namespace ewfs
