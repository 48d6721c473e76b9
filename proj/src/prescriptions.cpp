#include "ewfs/prescriptions.hpp"

#include <cmath>
#include <stdexcept>

namespace ewfs {

namespace {

void check_bb(const BBScenario& sc, int setting) {
  if (sc.d < 1) throw std::invalid_argument("dimension must be positive");
  if (sc.alpha.size() != sc.d)
    throw std::invalid_argument("alpha must have length d");
  if (std::abs(sc.alpha.norm() - 1.0) > kNormTol)
    throw std::invalid_argument("alpha is not normalized");
  if (setting < 0 || setting >= sc.settings())
    throw std::invalid_argument("setting index out of range");
  if (setting > 0) {
    const CMat& b = sc.extra_bases[setting - 1];
    if (b.rows() != sc.d || b.cols() != sc.d)
      throw std::invalid_argument("basis matrix must be d x d");
    if ((b.adjoint() * b - CMat::Identity(sc.d, sc.d)).cwiseAbs().maxCoeff() >=
        kOpTol)
      throw std::invalid_argument("basis matrix is not unitary");
  }
}

// The total state on system (x) friend pointer (x) apparatus after the
// apparatus has registered setting x. Both pointers use index 0 as "ready".
// Only the action on the d-dimensional {|c>|O_c>} span is ever needed, so the
// apparatus unitary is expanded there instead of being built in full:
// amp(c, O_c, O_a) = g_a beta_{c,a} with g_a = sum_c' alpha_c' beta*_{c',a}.
StateVector bb_total_state(const BBScenario& sc, int setting) {
  const int d = sc.d;
  const SystemLabel sys{"S", d}, pointer{"F", d + 1}, apparatus{"A", d + 1};
  const CMat basis =
      setting == 0 ? CMat(CMat::Identity(d, d)) : sc.extra_bases[setting - 1];
  const CVec g = basis.adjoint() * sc.alpha;  // g_a = <Psi_a | Psi_1>
  CVec amps = CVec::Zero(static_cast<long>(d) * (d + 1) * (d + 1));
  for (int c = 0; c < d; ++c)
    for (int a = 0; a < d; ++a) {
      const long idx = (static_cast<long>(c) * (d + 1) + (c + 1)) * (d + 1) +
                       (a + 1);
      amps[idx] = g[a] * basis(c, a);
    }
  return StateVector({sys, pointer, apparatus}, amps);
}

}  // namespace

BBScenario bb_fourier_instance(int d) {
  BBScenario sc;
  sc.d = d;
  sc.alpha = CVec::Zero(d);
  sc.alpha[0] = 1.0;
  CMat fourier(d, d);
  for (int c = 0; c < d; ++c)
    for (int a = 0; a < d; ++a)
      fourier(c, a) = std::polar(1.0 / std::sqrt(double(d)),
                                 2.0 * M_PI * c * a / d);
  sc.extra_bases.push_back(std::move(fourier));
  return sc;
}

Eigen::MatrixXd bb_joint(const BBScenario& sc, int setting) {
  check_bb(sc, setting);
  const StateVector total = bb_total_state(sc, setting);
  const int d = sc.d;
  Eigen::MatrixXd joint(d, d);  // row a, column c
  for (int a = 0; a < d; ++a)
    for (int c = 0; c < d; ++c) {
      double p = 0.0;
      for (int s = 0; s < d; ++s) {
        const long idx =
            (static_cast<long>(s) * (d + 1) + (c + 1)) * (d + 1) + (a + 1);
        p += std::norm(total.amps()[idx]);
      }
      joint(a, c) = p;
    }
  return joint;
}

std::vector<double> bb_friend_marginal(const BBScenario& sc, int setting) {
  const Eigen::MatrixXd joint = bb_joint(sc, setting);
  std::vector<double> out(sc.d);
  for (int c = 0; c < sc.d; ++c) out[c] = joint.col(c).sum();
  return out;
}

RetroReport bb_retro_demo(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  RetroReport rep;
  const BBScenario sc = bb_fourier_instance(d);
  rep.p_interrogation = bb_friend_marginal(sc, 0);
  rep.p_alternative = bb_friend_marginal(sc, 1);
  for (int c = 0; c < d; ++c)
    rep.l1_distance += std::abs(rep.p_interrogation[c] - rep.p_alternative[c]);
  rep.flagged = rep.l1_distance > 1e-9;
  return rep;
}

namespace {

const SystemLabel kS{"S", 2};
const SystemLabel kFs{"FS", 3};  // sensory register: R, O0, O1
const SystemLabel kFm{"FM", 2};  // record register: R, O

struct DeutschOps {
  Operator u1;  // sensory measurement dilation on (S, FS)
  Operator u2;  // completion record on (FS, FM)
  StateVector phi0;
};

DeutschOps build_deutsch(const DeutschScenario& sc) {
  if (std::abs(std::norm(sc.alpha) + std::norm(sc.beta) - 1.0) > kNormTol)
    throw std::invalid_argument("|alpha|^2 + |beta|^2 must be 1");
  DeutschOps ops;
  CVec phi(2);
  phi << sc.alpha, sc.beta;
  ops.phi0 = StateVector({kS}, phi);
  ops.u1 = dilate_measurement({basis_state({kS}, 0), basis_state({kS}, 1)}, kFs);

  // |R,R> -> |R,R>; |O_i,R> -> |O_i,O>: a record that the measurement
  // happened, blind to its outcome.
  std::vector<std::pair<CVec, CVec>> pairs;
  auto unit = [](int i) {
    CVec v = CVec::Zero(6);
    v[i] = 1.0;
    return v;
  };
  pairs.emplace_back(unit(0 * 2 + 0), unit(0 * 2 + 0));
  pairs.emplace_back(unit(1 * 2 + 0), unit(1 * 2 + 1));
  pairs.emplace_back(unit(2 * 2 + 0), unit(2 * 2 + 1));
  ops.u2 = unitary_from_mapping({kFs, kFm}, pairs);
  return ops;
}

}  // namespace

DeutschUnitaryResult deutsch_unitary(const DeutschScenario& sc) {
  const DeutschOps ops = build_deutsch(sc);
  StateVector s = tensor(tensor(ops.phi0, basis_state({kFs}, 0)),
                         basis_state({kFm}, 0));
  s = apply(ops.u1, s);
  s = apply(ops.u2, s);
  s = apply(adjoint(ops.u1), s);

  DeutschUnitaryResult res;
  res.final_state = s;
  res.p_phi0 = born(s, projector_onto(ops.phi0));
  CMat rec = CMat::Zero(2, 2);
  rec(1, 1) = 1.0;
  res.fm_record_prob = born(s, Operator({kFm}, rec));

  const StateVector expected = tensor(
      tensor(ops.phi0, basis_state({kFs}, 0)), basis_state({kFm}, 1));
  if ((s.amps() - expected.amps()).cwiseAbs().maxCoeff() > 1e-11)
    throw std::logic_error("reversal did not restore the initial state");
  if (std::abs(res.p_phi0 - 1.0) > 1e-11)
    throw std::logic_error("initial-state projector probability is not 1");
  return res;
}

DeutschCollapseResult deutsch_collapse(const DeutschScenario& sc) {
  const DeutschOps ops = build_deutsch(sc);
  StateVector s = tensor(tensor(ops.phi0, basis_state({kFs}, 0)),
                         basis_state({kFm}, 0));
  s = apply(ops.u1, s);

  DeutschCollapseResult res;
  for (const auto& branch :
       collapse(s, {basis_state({kS}, 0), basis_state({kS}, 1)})) {
    if (branch.zero_probability) continue;
    StateVector b = apply(ops.u2, branch.state);
    b = apply(adjoint(ops.u1), b);
    res.p_phi0 += branch.probability * born(b, projector_onto(ops.phi0));
  }
  return res;
}

}  // namespace ewfs
