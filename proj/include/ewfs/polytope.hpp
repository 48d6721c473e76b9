#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ewfs/dd.hpp"
#include "ewfs/scenario.hpp"

namespace ewfs {

struct TableDims {
  int nx = 0, ny = 0, ka = 0, kb = 0;
  long size() const { return static_cast<long>(nx) * ny * ka * kb; }
  long index(int x, int y, int a, int b) const {
    return ((static_cast<long>(x) * ny + y) * ka + a) * kb + b;
  }
  friend bool operator==(const TableDims&, const TableDims&) = default;
};

TableDims dims_of(const CorrelationTable& t);
Eigen::VectorXd table_point(const CorrelationTable& t);
CorrelationTable table_from_point(const TableDims& dims,
                                  const Eigen::VectorXd& p);

// Coefficient tensor over (x,y,a,b) with an upper bound:
// sum coeffs.p(a,b|x,y) <= bound. Canonical form scales max|coeff| to 1.
struct Inequality {
  TableDims dims;
  Eigen::VectorXd coeffs;
  double bound = 0.0;
  void canonicalize();
};

struct VertexSet {
  enum class Model { Bell, LF, NS };
  TableDims dims;
  Model model = Model::Bell;
  std::vector<Eigen::VectorXd> vertices;
  RatMat exact;  // the same vertices in exact rational form
};

struct MembershipCertificate {
  enum class Verdict { Inside, Outside };
  Verdict verdict = Verdict::Inside;
  double gap = 0.0;
  // Inside: convex weights over the tested vertex set (hull route) or the
  // block weights w_c (LF route), plus the reconstruction blocks.
  std::vector<double> weights;
  std::vector<Eigen::VectorXd> blocks;
  std::optional<Inequality> separating;  // outside: verified witness
};

struct InequalityEvaluation {
  double value = 0.0;
  bool violated = false;
  double margin = 0.0;
};

// Alias with the report-style name used by the CLI; identical computation.
NoSignallingReport check_no_signalling(const CorrelationTable& t);

// All deterministic local strategies: ka^nx * kb^ny vertices.
VertexSet bell_vertices(const TableDims& dims);

// Vertices of the no-signalling polytope by exact double description.
VertexSet ns_vertices(const TableDims& dims);

// Vertices of the one-friend Local Friendliness polytope: for each value c of
// the always-performed x=0 measurement, the no-signalling fiber with
// p(a,b|0,y) = 0 for a != c is enumerated exactly; the union is deduplicated.
VertexSet lf_vertices(const TableDims& dims);

// Convex-hull membership of t in an explicit vertex set (LP with verified
// primal/dual certificates).
MembershipCertificate hull_membership(const CorrelationTable& t,
                                      const VertexSet& vs);

MembershipCertificate bell_membership(const CorrelationTable& t);

enum class LfVariant { OneFriend, TwoFriend };

// Feasibility of the partially deterministic decomposition: subnormalized
// no-signalling blocks q_c with setting-independent weights, q_c vanishing on
// x=0 outcomes other than c, summing to t. TwoFriend adds the mirrored
// constraint on Bob's y=0 outcomes.
MembershipCertificate lf_membership(const CorrelationTable& t,
                                    LfVariant variant = LfVariant::OneFriend);

InequalityEvaluation evaluate_inequality(const CorrelationTable& t,
                                         const Inequality& iq);

// Facets of the one-friend LF polytope via exact V->H conversion.
std::vector<Inequality> lf_facets(const TableDims& dims);

// The canonical CHSH facet of the (2,2,2,2) Bell polytope, bound 2.
Inequality chsh_inequality();

// Exact-rational hull membership; the independent oracle for the LP path.
bool exact_hull_membership(const RatVec& point, const RatMat& vertices);

struct StrictContainmentScan {
  TableDims dims;                               // first size where LF != Bell
  int lf_vertex_index = -1;
  double gap = 0.0;                             // Bell-membership gap
  Eigen::VectorXd vertex;
  std::vector<std::pair<TableDims, bool>> scanned;  // (size, strict?)
};

// Scans binary-outcome scenario sizes in increasing (nx+ny, nx) order until
// some enumerated LF vertex is certified outside the Bell polytope.
StrictContainmentScan find_smallest_strict_containment();

}  // namespace ewfs
