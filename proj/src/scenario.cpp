#include "ewfs/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace ewfs {

namespace {

StateVector lift(const std::vector<SystemLabel>& factors, const CVec& amps) {
  return StateVector(factors, amps);
}

std::string check_orthonormal(const std::vector<CVec>& vecs, double tol) {
  for (size_t i = 0; i < vecs.size(); ++i)
    for (size_t j = 0; j <= i; ++j) {
      const cdouble g = vecs[j].dot(vecs[i]);
      const cdouble expect = (i == j) ? cdouble(1.0) : cdouble(0.0);
      if (std::abs(g - expect) >= tol)
        return "vectors " + std::to_string(j) + "," + std::to_string(i) +
               " fail orthonormality by " + std::to_string(std::abs(g - expect));
    }
  return "";
}

}  // namespace

Measurement Measurement::from_basis(const std::vector<SystemLabel>& factors,
                                    const std::vector<CVec>& basis) {
  std::vector<std::vector<CVec>> groups;
  for (const auto& v : basis) groups.push_back({v});
  return from_groups(factors, groups);
}

Measurement Measurement::from_groups(
    const std::vector<SystemLabel>& factors,
    const std::vector<std::vector<CVec>>& groups) {
  Measurement m;
  m.factors = factors;
  const long d = composite_dim(factors);
  for (const auto& g : groups) {
    CMat p = CMat::Zero(d, d);
    for (const auto& v : g) {
      if (v.size() != d)
        throw std::invalid_argument("measurement vector length mismatch");
      p += v * v.adjoint();
    }
    m.projectors.push_back(std::move(p));
  }
  return m;
}

std::string Measurement::check(double tol) const {
  if (projectors.empty()) return "measurement has no outcomes";
  const long d = composite_dim(factors);
  CMat sum = CMat::Zero(d, d);
  for (size_t i = 0; i < projectors.size(); ++i) {
    const CMat& p = projectors[i];
    if (p.rows() != d || p.cols() != d)
      return "projector " + std::to_string(i) + " has wrong shape";
    if ((p - p.adjoint()).cwiseAbs().maxCoeff() >= tol)
      return "projector " + std::to_string(i) + " is not Hermitian";
    if ((p * p - p).cwiseAbs().maxCoeff() >= tol)
      return "projector " + std::to_string(i) + " is not idempotent";
    sum += p;
  }
  if ((sum - CMat::Identity(d, d)).cwiseAbs().maxCoeff() >= tol)
    return "projectors do not sum to the identity";
  return "";
}

SuperobserverSetting SuperobserverSetting::pointer_ask() {
  SuperobserverSetting s;
  s.kind = Kind::PointerAsk;
  return s;
}

SuperobserverSetting SuperobserverSetting::reverse_and_measure(Measurement m) {
  SuperobserverSetting s;
  s.kind = Kind::ReverseAndMeasure;
  s.meas = std::move(m);
  return s;
}

SuperobserverSetting SuperobserverSetting::direct_projective(Measurement m) {
  SuperobserverSetting s;
  s.kind = Kind::DirectProjective;
  s.meas = std::move(m);
  return s;
}

namespace {

int setting_outcomes(const PartySide& side, const SuperobserverSetting& s) {
  return s.kind == SuperobserverSetting::Kind::PointerAsk
             ? static_cast<int>(side.friend_basis.size())
             : s.meas.outcomes();
}

void validate_side(const PartySide& side, const std::string& who,
                   ValidationReport& report) {
  auto flag = [&](const std::string& msg) {
    report.violations.push_back(who + ": " + msg);
  };

  if (side.system.dim < 2) flag("system dimension must be >= 2");
  if (side.pointer.dim < 1) flag("pointer dimension must be >= 1");
  if (side.settings.empty()) flag("no superobserver settings");

  const int k = static_cast<int>(side.friend_basis.size());
  if (side.has_friend()) {
    if (k != side.system.dim)
      flag("friend basis must be a complete basis of the system");
    if (side.pointer.dim < k + 1)
      flag("pointer needs a ready slot plus one slot per friend outcome");
    for (const auto& v : side.friend_basis)
      if (v.size() != side.system.dim) flag("friend basis vector length mismatch");
    const std::string ortho = check_orthonormal(side.friend_basis, kOpTol);
    if (!ortho.empty()) flag("friend basis: " + ortho);
    if (!side.settings.empty() &&
        side.settings[0].kind != SuperobserverSetting::Kind::PointerAsk)
      flag("setting 1 must be PointerAsk when a friend is present");
  } else {
    if (k != 0) flag("friend basis given but pointer is trivial (dim 1)");
    for (const auto& s : side.settings)
      if (s.kind == SuperobserverSetting::Kind::PointerAsk)
        flag("PointerAsk setting requires a friend");
  }

  int outcomes = -1;
  for (size_t i = 0; i < side.settings.size(); ++i) {
    const auto& s = side.settings[i];
    const std::string where = "setting " + std::to_string(i);
    if (s.kind != SuperobserverSetting::Kind::PointerAsk) {
      const std::string err = s.meas.check();
      if (!err.empty()) {
        flag(where + ": " + err);
        continue;
      }
      const auto& mf = s.meas.factors;
      const bool on_system = mf.size() == 1 && mf[0] == side.system;
      const bool on_both =
          mf.size() == 2 && mf[0] == side.system && mf[1] == side.pointer;
      if (s.kind == SuperobserverSetting::Kind::ReverseAndMeasure && !on_system)
        flag(where + ": reverse-and-measure basis must act on the system alone");
      if (s.kind == SuperobserverSetting::Kind::DirectProjective && !on_system &&
          !on_both)
        flag(where + ": direct measurement must act on system or system+pointer");
    }
    const int n = setting_outcomes(side, s);
    if (outcomes < 0)
      outcomes = n;
    else if (n != outcomes)
      flag(where + ": outcome count " + std::to_string(n) +
           " differs from earlier settings (" + std::to_string(outcomes) + ")");
  }
}

}  // namespace

int BubbleScenario::ka() const {
  return alice.settings.empty() ? 0 : setting_outcomes(alice, alice.settings[0]);
}

int BubbleScenario::kb() const {
  return bob.settings.empty() ? 0 : setting_outcomes(bob, bob.settings[0]);
}

ValidationReport validate(const BubbleScenario& sc) {
  ValidationReport report;
  auto flag = [&](const std::string& msg) { report.violations.push_back(msg); };

  std::vector<std::string> names = {sc.alice.system.name, sc.bob.system.name,
                                    sc.alice.pointer.name, sc.bob.pointer.name};
  for (size_t i = 0; i < names.size(); ++i)
    for (size_t j = i + 1; j < names.size(); ++j)
      if (names[i] == names[j]) flag("duplicate system name '" + names[i] + "'");

  if (sc.initial.factors() !=
      std::vector<SystemLabel>{sc.alice.system, sc.bob.system})
    flag("initial state must live on alice.system (x) bob.system");
  if (!sc.initial.is_normalized(kNormTol))
    flag("initial state norm deviates from 1 by " +
         std::to_string(std::abs(sc.initial.norm() - 1.0)));

  validate_side(sc.alice, "alice", report);
  validate_side(sc.bob, "bob", report);
  return report;
}

namespace {

struct SidePlan {
  bool has_friend = false;
  Operator dilation;  // on (system, pointer) when has_friend
  std::vector<bool> reversal;
  std::vector<std::vector<Operator>> projectors;  // [setting][outcome]
};

SidePlan plan_side(const PartySide& side) {
  SidePlan plan;
  plan.has_friend = side.has_friend();
  if (plan.has_friend) {
    std::vector<StateVector> basis;
    for (const auto& v : side.friend_basis) basis.push_back(lift({side.system}, v));
    plan.dilation = dilate_measurement(basis, side.pointer);
  }
  for (const auto& s : side.settings) {
    std::vector<Operator> projs;
    bool rev = false;
    switch (s.kind) {
      case SuperobserverSetting::Kind::PointerAsk:
        for (size_t c = 0; c < side.friend_basis.size(); ++c) {
          CMat p = CMat::Zero(side.pointer.dim, side.pointer.dim);
          p(c + 1, c + 1) = 1.0;
          projs.emplace_back(std::vector<SystemLabel>{side.pointer}, std::move(p));
        }
        break;
      case SuperobserverSetting::Kind::ReverseAndMeasure:
        rev = plan.has_friend;
        for (const auto& p : s.meas.projectors)
          projs.emplace_back(s.meas.factors, p);
        break;
      case SuperobserverSetting::Kind::DirectProjective:
        for (const auto& p : s.meas.projectors)
          projs.emplace_back(s.meas.factors, p);
        break;
    }
    plan.reversal.push_back(rev);
    plan.projectors.push_back(std::move(projs));
  }
  return plan;
}

void require_valid(const BubbleScenario& sc) {
  const ValidationReport report = validate(sc);
  if (!report.ok()) {
    std::string msg = "invalid scenario:";
    for (const auto& v : report.violations) msg += "\n  " + v;
    throw std::invalid_argument(msg);
  }
}

StateVector base_state(const BubbleScenario& sc) {
  StateVector s = tensor(sc.initial, basis_state({sc.alice.pointer}, 0));
  return tensor(s, basis_state({sc.bob.pointer}, 0));
}

CorrelationTable table_from_state(const BubbleScenario& sc,
                                  const StateVector& psi1, const SidePlan& pa,
                                  const SidePlan& pb) {
  CorrelationTable t;
  t.nx = sc.nx();
  t.ny = sc.ny();
  t.ka = sc.ka();
  t.kb = sc.kb();
  t.p.assign(t.size(), 0.0);
  for (int x = 0; x < t.nx; ++x) {
    for (int y = 0; y < t.ny; ++y) {
      StateVector s = psi1;
      if (pa.reversal[x]) s = apply(adjoint(pa.dilation), s);
      if (pb.reversal[y]) s = apply(adjoint(pb.dilation), s);
      for (int a = 0; a < t.ka; ++a)
        for (int b = 0; b < t.kb; ++b)
          t.at(x, y, a, b) =
              born(s, tensor(pa.projectors[x][a], pb.projectors[y][b]));
    }
  }
  return t;
}

StateVector dilate_state(const StateVector& base, const SidePlan& pa,
                         const SidePlan& pb) {
  StateVector s = base;
  if (pa.has_friend) s = apply(pa.dilation, s);
  if (pb.has_friend) s = apply(pb.dilation, s);
  return s;
}

}  // namespace

double& CorrelationTable::at(int x, int y, int a, int b) {
  return p[((static_cast<long>(x) * ny + y) * ka + a) * kb + b];
}

double CorrelationTable::at(int x, int y, int a, int b) const {
  return p[((static_cast<long>(x) * ny + y) * ka + a) * kb + b];
}

double CorrelationTable::normalization_deviation() const {
  double dev = 0.0;
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) {
      double sum = 0.0;
      for (int a = 0; a < ka; ++a)
        for (int b = 0; b < kb; ++b) sum += at(x, y, a, b);
      dev = std::max(dev, std::abs(sum - 1.0));
    }
  return dev;
}

NoSignallingReport no_signalling_report(const CorrelationTable& t) {
  NoSignallingReport r;
  r.normalization_deviation = t.normalization_deviation();
  for (int x = 0; x < t.nx; ++x)
    for (int a = 0; a < t.ka; ++a) {
      double ref = 0.0;
      for (int y = 0; y < t.ny; ++y) {
        double m = 0.0;
        for (int b = 0; b < t.kb; ++b) m += t.at(x, y, a, b);
        if (y == 0)
          ref = m;
        else
          r.alice_deviation = std::max(r.alice_deviation, std::abs(m - ref));
      }
    }
  for (int y = 0; y < t.ny; ++y)
    for (int b = 0; b < t.kb; ++b) {
      double ref = 0.0;
      for (int x = 0; x < t.nx; ++x) {
        double m = 0.0;
        for (int a = 0; a < t.ka; ++a) m += t.at(x, y, a, b);
        if (x == 0)
          ref = m;
        else
          r.bob_deviation = std::max(r.bob_deviation, std::abs(m - ref));
      }
    }
  return r;
}

bool NoSignallingReport::pass(double tol) const {
  return alice_deviation < tol && bob_deviation < tol &&
         normalization_deviation < tol;
}

CorrelationTable run_correlations(const BubbleScenario& sc) {
  require_valid(sc);
  const SidePlan pa = plan_side(sc.alice);
  const SidePlan pb = plan_side(sc.bob);
  const StateVector psi1 = dilate_state(base_state(sc), pa, pb);
  return table_from_state(sc, psi1, pa, pb);
}

CorrelationTable run_collapse_correlations(const BubbleScenario& sc) {
  require_valid(sc);
  const SidePlan pa = plan_side(sc.alice);
  const SidePlan pb = plan_side(sc.bob);
  const StateVector base = base_state(sc);

  // Collapse once per friend, in the friend's own basis, then let the
  // superobserver settings act on the resulting mixture.
  std::vector<std::pair<double, StateVector>> leaves = {{1.0, base}};
  for (const PartySide* side : {&sc.alice, &sc.bob}) {
    if (!side->has_friend()) continue;
    std::vector<StateVector> basis;
    for (const auto& v : side->friend_basis)
      basis.push_back(lift({side->system}, v));
    std::vector<std::pair<double, StateVector>> next;
    for (const auto& [w, s] : leaves)
      for (const auto& br : collapse(s, basis))
        if (!br.zero_probability)
          next.emplace_back(w * br.probability, br.state);
    leaves = std::move(next);
  }

  CorrelationTable acc;
  bool first = true;
  for (const auto& [w, s] : leaves) {
    const CorrelationTable t = table_from_state(sc, dilate_state(s, pa, pb), pa, pb);
    if (first) {
      acc = t;
      for (auto& v : acc.p) v *= w;
      first = false;
    } else {
      for (long i = 0; i < t.size(); ++i) acc.p[i] += w * t.p[i];
    }
  }
  return acc;
}

std::vector<double> friend_marginal(const BubbleScenario& sc, int x) {
  require_valid(sc);
  if (!sc.alice.has_friend())
    throw std::invalid_argument("friend_marginal requires a friend on Alice's side");
  if (x < 0 || x >= sc.nx())
    throw std::invalid_argument("setting index out of range");
  const SidePlan pa = plan_side(sc.alice);
  const SidePlan pb = plan_side(sc.bob);
  const StateVector psi1 = dilate_state(base_state(sc), pa, pb);
  std::vector<double> dist;
  for (size_t c = 0; c < sc.alice.friend_basis.size(); ++c) {
    CMat p = CMat::Zero(sc.alice.pointer.dim, sc.alice.pointer.dim);
    p(c + 1, c + 1) = 1.0;
    dist.push_back(born(psi1, Operator({sc.alice.pointer}, std::move(p))));
  }
  return dist;
}

}  // namespace ewfs
