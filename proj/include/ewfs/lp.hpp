#pragma once

#include <Eigen/Dense>

#include "ewfs/dd.hpp"

namespace ewfs {

struct FeasibilityResult {
  bool feasible = false;
  Eigen::VectorXd x;       // x >= 0 with A x = b, when feasible
  Eigen::VectorXd farkas;  // y with yT A <= tol and yT b > tol, when not
};

// Feasibility of {x >= 0 : A x = b} by a phase-1 dense simplex with Bland
// pivoting. Whatever the verdict, the certificate is re-verified numerically;
// an unverifiable certificate raises LpFailure rather than being rounded.
FeasibilityResult lp_feasibility(const Eigen::MatrixXd& A,
                                 const Eigen::VectorXd& b, double tol = 1e-9);

// Same question in exact rational arithmetic; used as an independent oracle.
bool exact_feasibility(const RatMat& A, const RatVec& b);

}  // namespace ewfs
