#include "ewfs/lp.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "ewfs/errors.hpp"

namespace ewfs {

namespace {

constexpr double kPivotEps = 1e-11;

}  // namespace

FeasibilityResult lp_feasibility(const Eigen::MatrixXd& A_in,
                                 const Eigen::VectorXd& b_in, double tol) {
  const long m = A_in.rows(), n = A_in.cols();
  Eigen::MatrixXd A = A_in;
  Eigen::VectorXd b = b_in;
  Eigen::VectorXd rowsign = Eigen::VectorXd::Ones(m);
  for (long i = 0; i < m; ++i)
    if (b[i] < 0) {
      A.row(i) = -A.row(i);
      b[i] = -b[i];
      rowsign[i] = -1;
    }

  // Tableau [A | I | b] with the artificial identity as starting basis;
  // minimize the sum of artificials.
  Eigen::MatrixXd T(m, n + m + 1);
  T.leftCols(n) = A;
  T.middleCols(n, m) = Eigen::MatrixXd::Identity(m, m);
  T.col(n + m) = b;
  std::vector<long> basis(m);
  for (long i = 0; i < m; ++i) basis[i] = n + i;

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(n + m);
  cost.tail(m).setOnes();
  // Reduced-cost row for the artificial start.
  Eigen::VectorXd reduced = cost;
  for (long i = 0; i < m; ++i) reduced -= T.row(i).head(n + m);
  // Objective recomputed from the basis: the sum of basic artificials.
  auto objective = [&] {
    double z = 0.0;
    for (long i = 0; i < m; ++i)
      if (basis[i] >= n) z += T(i, n + m);
    return z;
  };

  const long max_iters = 2000 + 200 * (m + n);
  for (long iter = 0;; ++iter) {
    if (iter > max_iters) throw LpFailure("simplex exceeded iteration budget");
    long enter = -1;
    for (long j = 0; j < n + m; ++j)
      if (reduced[j] < -kPivotEps) {  // Bland: smallest eligible index
        enter = j;
        break;
      }
    if (enter < 0) break;

    long leave = -1;
    double best = 0.0;
    for (long i = 0; i < m; ++i) {
      if (T(i, enter) <= kPivotEps) continue;
      const double ratio = T(i, n + m) / T(i, enter);
      if (leave < 0 || ratio < best - 1e-15 ||
          (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) throw LpFailure("phase-1 simplex claims unboundedness");

    const double piv = T(leave, enter);
    T.row(leave) /= piv;
    for (long i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double f = T(i, enter);
      if (f != 0.0) T.row(i) -= f * T.row(leave);
    }
    const double fr = reduced[enter];
    reduced -= fr * T.row(leave).head(n + m);
    basis[leave] = enter;
  }

  FeasibilityResult res;
  if (objective() <= tol) {
    res.feasible = true;
    res.x = Eigen::VectorXd::Zero(n);
    for (long i = 0; i < m; ++i)
      if (basis[i] < n) res.x[basis[i]] = T(i, n + m);
    const double resid = (A_in * res.x - b_in).cwiseAbs().maxCoeff();
    if (resid > 1e-7)
      throw LpFailure("feasible point fails re-verification, residual " +
                      std::to_string(resid));
    return res;
  }

  // Farkas certificate from the artificial reduced costs: y_i = 1 - d_{n+i}.
  res.feasible = false;
  res.farkas = Eigen::VectorXd(m);
  for (long i = 0; i < m; ++i) res.farkas[i] = (1.0 - reduced[n + i]) * rowsign[i];
  const double vb = res.farkas.dot(b_in);
  const double va = (res.farkas.transpose() * A_in).maxCoeff();
  if (vb <= tol || va > tol)
    throw LpFailure("Farkas certificate fails re-verification (yTb=" +
                    std::to_string(vb) + ", max yTA=" + std::to_string(va) + ")");
  return res;
}

bool exact_feasibility(const RatMat& A_in, const RatVec& b_in) {
  const std::size_t m = A_in.size();
  if (m == 0) return true;
  const std::size_t n = A_in[0].size();
  RatMat T(m, RatVec(n + m + 1, 0));
  for (std::size_t i = 0; i < m; ++i) {
    const bool flip = b_in[i] < 0;
    for (std::size_t j = 0; j < n; ++j) T[i][j] = flip ? -A_in[i][j] : A_in[i][j];
    T[i][n + i] = 1;
    T[i][n + m] = flip ? -b_in[i] : b_in[i];
  }
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  RatVec reduced(n + m, 0);
  for (std::size_t j = n; j < n + m; ++j) reduced[j] = 1;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n + m; ++j) reduced[j] -= T[i][j];

  while (true) {
    long enter = -1;
    for (std::size_t j = 0; j < n + m; ++j)
      if (reduced[j] < 0) {  // Bland
        enter = static_cast<long>(j);
        break;
      }
    if (enter < 0) break;

    long leave = -1;
    Rat best = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (T[i][enter] <= 0) continue;
      const Rat ratio = T[i][n + m] / T[i][enter];
      if (leave < 0 || ratio < best ||
          (ratio == best && basis[i] < basis[leave])) {
        leave = static_cast<long>(i);
        best = ratio;
      }
    }
    if (leave < 0) throw LpFailure("exact phase-1 simplex unbounded");

    const Rat piv = T[leave][enter];
    for (std::size_t c = 0; c < n + m + 1; ++c) T[leave][c] /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (static_cast<long>(i) == leave || T[i][enter] == 0) continue;
      const Rat f = T[i][enter];
      for (std::size_t c = 0; c < n + m + 1; ++c) T[i][c] -= f * T[leave][c];
    }
    const Rat fr = reduced[enter];
    if (fr != 0)
      for (std::size_t c = 0; c < n + m; ++c) reduced[c] -= fr * T[leave][c];
    basis[leave] = enter;
  }
  Rat obj = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] >= n) obj += T[i][n + m];
  return obj == 0;
}

}  // namespace ewfs
