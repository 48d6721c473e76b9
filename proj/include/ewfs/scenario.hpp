#pragma once

#include <string>
#include <vector>

#include "ewfs/qcore.hpp"

namespace ewfs {

// Projective measurement as a list of projectors (possibly rank > 1) that
// sum to the identity on the given factors.
struct Measurement {
  std::vector<SystemLabel> factors;
  std::vector<CMat> projectors;

  static Measurement from_basis(const std::vector<SystemLabel>& factors,
                                const std::vector<CVec>& basis);
  static Measurement from_groups(const std::vector<SystemLabel>& factors,
                                 const std::vector<std::vector<CVec>>& groups);
  int outcomes() const { return static_cast<int>(projectors.size()); }
  // Empty string when valid, else a description of the violation.
  std::string check(double tol = kOpTol) const;
};

struct SuperobserverSetting {
  enum class Kind { PointerAsk, ReverseAndMeasure, DirectProjective };
  Kind kind = Kind::PointerAsk;
  // ReverseAndMeasure: on the party's system alone (applied after the
  // friend's dilation has been reversed). DirectProjective: on system (x)
  // pointer, with no reversal. Unused for PointerAsk.
  Measurement meas;

  static SuperobserverSetting pointer_ask();
  static SuperobserverSetting reverse_and_measure(Measurement m);
  static SuperobserverSetting direct_projective(Measurement m);
};

// One party of the experiment: the measured system, the friend's pointer
// register, the friend's fixed measurement basis, and the superobserver's
// settings. A pointer of dimension 1 means no friend on this side (a plain
// Bell party); the friend basis must then be empty and no setting may be
// PointerAsk.
struct PartySide {
  SystemLabel system;
  SystemLabel pointer;
  std::vector<CVec> friend_basis;  // orthonormal vectors on `system`
  std::vector<SuperobserverSetting> settings;

  bool has_friend() const { return pointer.dim > 1; }
};

struct BubbleScenario {
  PartySide alice;
  PartySide bob;
  StateVector initial;  // on alice.system (x) bob.system

  int nx() const { return static_cast<int>(alice.settings.size()); }
  int ny() const { return static_cast<int>(bob.settings.size()); }
  int ka() const;  // common outcome count across Alice's settings
  int kb() const;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// p(a,b|x,y) with setting/outcome cardinalities. Settings are 0-based here
// and in all serialized forms; the convention maps to 1-based x = index + 1,
// with index 0 being the always-performed friend interrogation.
struct CorrelationTable {
  int nx = 0, ny = 0, ka = 0, kb = 0;
  std::vector<double> p;  // indexed [x][y][a][b]

  double& at(int x, int y, int a, int b);
  double at(int x, int y, int a, int b) const;
  long size() const { return static_cast<long>(nx) * ny * ka * kb; }
  // Max deviation of any per-setting-pair normalization from 1.
  double normalization_deviation() const;
};

struct NoSignallingReport {
  double alice_deviation = 0.0;  // max shift of Alice marginals across y
  double bob_deviation = 0.0;    // max shift of Bob marginals across x
  double normalization_deviation = 0.0;
  bool pass(double tol = 1e-10) const;
};

NoSignallingReport no_signalling_report(const CorrelationTable& t);

ValidationReport validate(const BubbleScenario& sc);

// Exact Born-probability table of the unitary model. Friends' measurements
// are dilated; PointerAsk reads the pointer basis with a = c; reversal
// settings undo the dilation before measuring.
CorrelationTable run_correlations(const BubbleScenario& sc);

// Collapse-model comparator: each friend's measurement is applied as a
// projective collapse (once, at the friend's measurement) before the
// superobserver settings act.
CorrelationTable run_collapse_correlations(const BubbleScenario& sc);

// Distribution of Alice's friend's pointer value right after the dilation in
// the unitary model; a perspective-neutral bookkeeping quantity, identical
// across settings (x is validated, not used).
std::vector<double> friend_marginal(const BubbleScenario& sc, int x);

}  // namespace ewfs
