#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ewfs {

using cdouble = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Norms are held to 1e-12, operator property checks to 1e-10. Composites in
// this toolkit stay at desk scale (total dimension <= ~4096), where double
// precision keeps accumulated error far below both thresholds.
inline constexpr double kNormTol = 1e-12;
inline constexpr double kOpTol = 1e-10;

struct SystemLabel {
  std::string name;
  int dim = 0;
  friend bool operator==(const SystemLabel&, const SystemLabel&) = default;
};

long composite_dim(const std::vector<SystemLabel>& factors);

// Dense complex state vector over an ordered list of labeled factors.
// The leftmost factor is the slowest-varying index of the flat array.
class StateVector {
 public:
  StateVector() = default;
  StateVector(std::vector<SystemLabel> factors, CVec amps);

  const std::vector<SystemLabel>& factors() const { return factors_; }
  const CVec& amps() const { return amps_; }
  long dim() const { return amps_.size(); }
  double norm() const { return amps_.norm(); }
  bool is_normalized(double tol = kNormTol) const;
  // Position of the named factor, -1 if absent.
  int factor_position(const std::string& name) const;

 private:
  std::vector<SystemLabel> factors_;
  CVec amps_;
};

// Square matrix acting on an ordered list of factors.
class Operator {
 public:
  Operator() = default;
  Operator(std::vector<SystemLabel> factors, CMat matrix);

  const std::vector<SystemLabel>& factors() const { return factors_; }
  const CMat& matrix() const { return matrix_; }
  long dim() const { return matrix_.rows(); }
  bool is_unitary(double tol = kOpTol) const;
  bool is_projector(double tol = kOpTol) const;

 private:
  std::vector<SystemLabel> factors_;
  CMat matrix_;
};

// Validated density operator: Hermitian, unit trace, positive semidefinite.
class DensityOperator {
 public:
  DensityOperator() = default;
  DensityOperator(std::vector<SystemLabel> factors, CMat matrix);

  const std::vector<SystemLabel>& factors() const { return factors_; }
  const CMat& matrix() const { return matrix_; }

 private:
  std::vector<SystemLabel> factors_;
  CMat matrix_;
};

struct CollapseBranch {
  double probability = 0.0;
  StateVector state;
  bool zero_probability = false;  // branch kept unnormalized when flagged
};

// Basis state |index> on the given factors.
StateVector basis_state(const std::vector<SystemLabel>& factors, long index);

StateVector tensor(const StateVector& a, const StateVector& b);
Operator tensor(const Operator& a, const Operator& b);
Operator adjoint(const Operator& u);
Operator identity_on(const std::vector<SystemLabel>& factors);
Operator projector_onto(const StateVector& v);
// Projector onto the span of several orthonormal states.
Operator projector_onto_span(const std::vector<StateVector>& vs);

// Applies u to the factors it names inside s (u (x) identity elsewhere).
// Unitarity of u is enforced unless require_unitary is false.
StateVector apply(const Operator& u, const StateVector& s,
                  bool require_unitary = true);

// Unitary completion of an orthonormal input->output mapping. Both sides are
// completed over canonical vectors by modified Gram-Schmidt, so the result is
// deterministic.
Operator unitary_from_mapping(const std::vector<SystemLabel>& factors,
                              const std::vector<std::pair<CVec, CVec>>& pairs);

// Measurement dilation: U |b_c>|R> = |b_c>|O_c> with pointer convention
// index 0 = |R>, index c+1 = |O_c>. Pointer dimension must be >= #basis + 1.
Operator dilate_measurement(const std::vector<StateVector>& basis,
                            const SystemLabel& pointer);

// <s| (P (x) I) |s> for a projector P on a subset of s's factors.
double born(const StateVector& s, const Operator& projector);

DensityOperator partial_trace(const StateVector& s,
                              const std::vector<std::string>& keep);
DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<std::string>& keep);

// Projective collapse of s in an orthonormal basis of some factor subset.
// Branch probabilities sum to 1; zero-probability branches are flagged and
// left unnormalized.
std::vector<CollapseBranch> collapse(const StateVector& s,
                                     const std::vector<StateVector>& basis);

}  // namespace ewfs
