#include "ewfs/polytope.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "ewfs/errors.hpp"
#include "ewfs/lp.hpp"

namespace ewfs {

namespace {

// Desk-scale guards: DD works in dimension size()+1, vertex enumeration is
// kept to small scenarios.
constexpr long kMaxDdVariables = 36;
constexpr double kBellVertexGuard = 1e6;

void check_table_pre(const CorrelationTable& t) {
  if (t.normalization_deviation() > 1e-8)
    throw std::invalid_argument("table is not normalized per setting pair");
  const NoSignallingReport ns = no_signalling_report(t);
  if (!ns.pass(1e-8))
    throw std::invalid_argument("table is signalling beyond tolerance");
}

Eigen::VectorXd to_double(const RatVec& v) {
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].get_d();
  return out;
}

// H-representation of the no-signalling polytope over table coordinates.
ExactHRep ns_hrep(const TableDims& d) {
  ExactHRep h;
  const long n = d.size();
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y) {
      RatVec row(n, 0);
      for (int a = 0; a < d.ka; ++a)
        for (int b = 0; b < d.kb; ++b) row[d.index(x, y, a, b)] = 1;
      h.C.push_back(std::move(row));
      h.d.push_back(1);
    }
  for (int x = 0; x < d.nx; ++x)
    for (int a = 0; a < d.ka; ++a)
      for (int y = 1; y < d.ny; ++y) {
        RatVec row(n, 0);
        for (int b = 0; b < d.kb; ++b) {
          row[d.index(x, y, a, b)] += 1;
          row[d.index(x, 0, a, b)] -= 1;
        }
        h.C.push_back(std::move(row));
        h.d.push_back(0);
      }
  for (int y = 0; y < d.ny; ++y)
    for (int b = 0; b < d.kb; ++b)
      for (int x = 1; x < d.nx; ++x) {
        RatVec row(n, 0);
        for (int a = 0; a < d.ka; ++a) {
          row[d.index(x, y, a, b)] += 1;
          row[d.index(0, y, a, b)] -= 1;
        }
        h.C.push_back(std::move(row));
        h.d.push_back(0);
      }
  for (long i = 0; i < n; ++i) {
    RatVec row(n, 0);
    row[i] = -1;
    h.A.push_back(std::move(row));
    h.b.push_back(0);
  }
  return h;
}

void guard_dd(const TableDims& d) {
  if (d.size() > kMaxDdVariables)
    throw SizeGuardError("vertex enumeration guard: table has " +
                         std::to_string(d.size()) +
                         " entries, limit is " + std::to_string(kMaxDdVariables));
}

void sort_dedup(RatMat& vs) {
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
}

VertexSet pack_vertices(const TableDims& d, VertexSet::Model model, RatMat exact) {
  sort_dedup(exact);
  VertexSet out;
  out.dims = d;
  out.model = model;
  out.exact = std::move(exact);
  for (const auto& v : out.exact) out.vertices.push_back(to_double(v));
  return out;
}

// Vertex-set cache; enumerations are pure functions of (model, dims).
const VertexSet& cached(VertexSet::Model model, const TableDims& d,
                        VertexSet (*compute)(const TableDims&)) {
  static std::map<std::pair<int, std::array<int, 4>>, VertexSet> cache;
  const std::pair<int, std::array<int, 4>> key{
      static_cast<int>(model), {d.nx, d.ny, d.ka, d.kb}};
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, compute(d)).first;
  return it->second;
}

VertexSet compute_bell(const TableDims& d) {
  const double count = std::pow(d.ka, d.nx) * std::pow(d.kb, d.ny);
  if (count > kBellVertexGuard)
    throw SizeGuardError("deterministic-vertex guard: " +
                         std::to_string(count) + " strategies exceed 1e6");
  RatMat exact;
  std::vector<int> fa(d.nx, 0), fb(d.ny, 0);
  while (true) {
    while (true) {
      RatVec v(d.size(), 0);
      for (int x = 0; x < d.nx; ++x)
        for (int y = 0; y < d.ny; ++y) v[d.index(x, y, fa[x], fb[y])] = 1;
      exact.push_back(std::move(v));
      int i = d.ny - 1;
      while (i >= 0 && ++fb[i] == d.kb) fb[i--] = 0;
      if (i < 0) break;
    }
    int i = d.nx - 1;
    while (i >= 0 && ++fa[i] == d.ka) fa[i--] = 0;
    if (i < 0) break;
  }
  return pack_vertices(d, VertexSet::Model::Bell, std::move(exact));
}

VertexSet compute_ns(const TableDims& d) {
  guard_dd(d);
  return pack_vertices(d, VertexSet::Model::NS, polytope_vertices(ns_hrep(d)));
}

VertexSet compute_lf(const TableDims& d) {
  guard_dd(d);
  RatMat all;
  for (int c = 0; c < d.ka; ++c) {
    ExactHRep h = ns_hrep(d);
    for (int a = 0; a < d.ka; ++a) {
      if (a == c) continue;
      for (int y = 0; y < d.ny; ++y)
        for (int b = 0; b < d.kb; ++b) {
          RatVec row(d.size(), 0);
          row[d.index(0, y, a, b)] = 1;
          h.C.push_back(std::move(row));
          h.d.push_back(0);
        }
    }
    RatMat fiber = polytope_vertices(h);
    all.insert(all.end(), fiber.begin(), fiber.end());
  }
  return pack_vertices(d, VertexSet::Model::LF, std::move(all));
}

}  // namespace

TableDims dims_of(const CorrelationTable& t) { return {t.nx, t.ny, t.ka, t.kb}; }

Eigen::VectorXd table_point(const CorrelationTable& t) {
  Eigen::VectorXd p(t.size());
  for (long i = 0; i < t.size(); ++i) p[i] = t.p[i];
  return p;
}

CorrelationTable table_from_point(const TableDims& dims,
                                  const Eigen::VectorXd& p) {
  if (p.size() != dims.size())
    throw std::invalid_argument("point length does not match table dims");
  CorrelationTable t;
  t.nx = dims.nx;
  t.ny = dims.ny;
  t.ka = dims.ka;
  t.kb = dims.kb;
  t.p.assign(p.data(), p.data() + p.size());
  return t;
}

void Inequality::canonicalize() {
  const double m = coeffs.cwiseAbs().maxCoeff();
  if (m > 0) {
    coeffs /= m;
    bound /= m;
  }
}

NoSignallingReport check_no_signalling(const CorrelationTable& t) {
  return no_signalling_report(t);
}

VertexSet bell_vertices(const TableDims& dims) {
  return cached(VertexSet::Model::Bell, dims, compute_bell);
}

VertexSet ns_vertices(const TableDims& dims) {
  return cached(VertexSet::Model::NS, dims, compute_ns);
}

VertexSet lf_vertices(const TableDims& dims) {
  return cached(VertexSet::Model::LF, dims, compute_lf);
}

namespace {

Inequality separating_from_farkas(const TableDims& dims,
                                  const Eigen::VectorXd& coeffs,
                                  const Eigen::VectorXd& point,
                                  const std::vector<Eigen::VectorXd>& vertices) {
  Inequality iq;
  iq.dims = dims;
  iq.coeffs = coeffs;
  double bound = vertices.empty() ? 0.0 : coeffs.dot(vertices[0]);
  for (const auto& v : vertices) bound = std::max(bound, coeffs.dot(v));
  iq.bound = bound;
  iq.canonicalize();
  const double gap = iq.coeffs.dot(point) - iq.bound;
  if (gap <= 1e-9)
    throw LpFailure("separating hyperplane failed re-verification, gap " +
                    std::to_string(gap));
  return iq;
}

}  // namespace

MembershipCertificate hull_membership(const CorrelationTable& t,
                                      const VertexSet& vs) {
  if (dims_of(t) != vs.dims)
    throw std::invalid_argument("table and vertex set dims differ");
  check_table_pre(t);
  const long n = static_cast<long>(vs.vertices.size());
  const long m = t.size() + 1;
  Eigen::MatrixXd A(m, n);
  for (long j = 0; j < n; ++j) {
    A.col(j).head(t.size()) = vs.vertices[j];
    A(m - 1, j) = 1.0;
  }
  Eigen::VectorXd b(m);
  b.head(t.size()) = table_point(t);
  b[m - 1] = 1.0;

  const FeasibilityResult lp = lp_feasibility(A, b);
  MembershipCertificate cert;
  if (lp.feasible) {
    cert.verdict = MembershipCertificate::Verdict::Inside;
    cert.weights.assign(lp.x.data(), lp.x.data() + lp.x.size());
    Eigen::VectorXd recon = Eigen::VectorXd::Zero(t.size());
    for (long j = 0; j < n; ++j) recon += lp.x[j] * vs.vertices[j];
    const double err = (recon - table_point(t)).cwiseAbs().maxCoeff();
    if (err > 1e-8)
      throw LpFailure("inside witness reconstruction error " +
                      std::to_string(err));
    cert.gap = 0.0;
    return cert;
  }
  cert.verdict = MembershipCertificate::Verdict::Outside;
  cert.separating = separating_from_farkas(vs.dims, lp.farkas.head(t.size()),
                                           table_point(t), vs.vertices);
  cert.gap = cert.separating->coeffs.dot(table_point(t)) - cert.separating->bound;
  return cert;
}

MembershipCertificate bell_membership(const CorrelationTable& t) {
  return hull_membership(t, bell_vertices(dims_of(t)));
}

MembershipCertificate lf_membership(const CorrelationTable& t,
                                    LfVariant variant) {
  check_table_pre(t);
  const TableDims d = dims_of(t);
  const long N = d.size();
  const int nc = d.ka;
  const int nd = variant == LfVariant::TwoFriend ? d.kb : 1;

  // Variable layout: active block entries q_{c,e}(x,y,a,b) followed by the
  // block weights w_{c,e}. Entries pinned to zero by the friend constraint
  // are not materialized.
  auto active = [&](int c, int e, int x, int a, int y, int b) {
    if (x == 0 && a != c) return false;
    if (variant == LfVariant::TwoFriend && y == 0 && b != e) return false;
    return true;
  };
  std::map<std::array<int, 3>, long> var_of;  // (c, e, idx) -> column
  long nvars = 0;
  for (int c = 0; c < nc; ++c)
    for (int e = 0; e < nd; ++e)
      for (int x = 0; x < d.nx; ++x)
        for (int y = 0; y < d.ny; ++y)
          for (int a = 0; a < d.ka; ++a)
            for (int b = 0; b < d.kb; ++b)
              if (active(c, e, x, a, y, b))
                var_of[{c, e, static_cast<int>(d.index(x, y, a, b))}] = nvars++;
  const long wbase = nvars;
  nvars += static_cast<long>(nc) * nd;

  struct Entry {
    long row, col;
    double value;
  };
  std::vector<Entry> trip;
  std::vector<double> rhs;
  long row = 0;
  auto var = [&](int c, int e, int x, int y, int a, int b) {
    const auto it = var_of.find({c, e, static_cast<int>(d.index(x, y, a, b))});
    return it == var_of.end() ? -1L : it->second;
  };

  // Coupling rows first: sum over blocks reproduces the table entrywise.
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y)
      for (int a = 0; a < d.ka; ++a)
        for (int b = 0; b < d.kb; ++b) {
          for (int c = 0; c < nc; ++c)
            for (int e = 0; e < nd; ++e) {
              const long v = var(c, e, x, y, a, b);
              if (v >= 0) trip.emplace_back(row, v, 1.0);
            }
          rhs.push_back(t.at(x, y, a, b));
          ++row;
        }
  // Setting-independent block weights.
  for (int c = 0; c < nc; ++c)
    for (int e = 0; e < nd; ++e)
      for (int x = 0; x < d.nx; ++x)
        for (int y = 0; y < d.ny; ++y) {
          for (int a = 0; a < d.ka; ++a)
            for (int b = 0; b < d.kb; ++b) {
              const long v = var(c, e, x, y, a, b);
              if (v >= 0) trip.emplace_back(row, v, 1.0);
            }
          trip.emplace_back(row, wbase + c * nd + e, -1.0);
          rhs.push_back(0.0);
          ++row;
        }
  // Blockwise no-signalling.
  for (int c = 0; c < nc; ++c)
    for (int e = 0; e < nd; ++e) {
      for (int x = 0; x < d.nx; ++x)
        for (int a = 0; a < d.ka; ++a)
          for (int y = 1; y < d.ny; ++y) {
            bool any = false;
            for (int b = 0; b < d.kb; ++b) {
              const long v1 = var(c, e, x, y, a, b);
              const long v0 = var(c, e, x, 0, a, b);
              if (v1 >= 0) trip.emplace_back(row, v1, 1.0), any = true;
              if (v0 >= 0) trip.emplace_back(row, v0, -1.0), any = true;
            }
            if (any) {
              rhs.push_back(0.0);
              ++row;
            }
          }
      for (int y = 0; y < d.ny; ++y)
        for (int b = 0; b < d.kb; ++b)
          for (int x = 1; x < d.nx; ++x) {
            bool any = false;
            for (int a = 0; a < d.ka; ++a) {
              const long v1 = var(c, e, x, y, a, b);
              const long v0 = var(c, e, 0, y, a, b);
              if (v1 >= 0) trip.emplace_back(row, v1, 1.0), any = true;
              if (v0 >= 0) trip.emplace_back(row, v0, -1.0), any = true;
            }
            if (any) {
              rhs.push_back(0.0);
              ++row;
            }
          }
    }

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(row, nvars);
  for (const auto& tr : trip) A(tr.row, tr.col) += tr.value;
  Eigen::VectorXd b(row);
  for (long i = 0; i < row; ++i) b[i] = rhs[i];

  const FeasibilityResult lp = lp_feasibility(A, b);
  MembershipCertificate cert;
  if (lp.feasible) {
    cert.verdict = MembershipCertificate::Verdict::Inside;
    Eigen::VectorXd recon = Eigen::VectorXd::Zero(N);
    for (int c = 0; c < nc; ++c)
      for (int e = 0; e < nd; ++e) {
        Eigen::VectorXd block = Eigen::VectorXd::Zero(N);
        for (int x = 0; x < d.nx; ++x)
          for (int y = 0; y < d.ny; ++y)
            for (int a = 0; a < d.ka; ++a)
              for (int b2 = 0; b2 < d.kb; ++b2) {
                const long v = var(c, e, x, y, a, b2);
                if (v >= 0) block[d.index(x, y, a, b2)] = lp.x[v];
              }
        recon += block;
        cert.blocks.push_back(std::move(block));
        cert.weights.push_back(lp.x[wbase + c * nd + e]);
      }
    const double err = (recon - table_point(t)).cwiseAbs().maxCoeff();
    if (err > 1e-8)
      throw LpFailure("LF block reconstruction error " + std::to_string(err));
    cert.gap = 0.0;
    return cert;
  }

  cert.verdict = MembershipCertificate::Verdict::Outside;
  Eigen::VectorXd coeffs = lp.farkas.head(N);
  std::vector<Eigen::VectorXd> verify_vertices;
  if (variant == LfVariant::OneFriend && d.size() <= kMaxDdVariables)
    verify_vertices = lf_vertices(d).vertices;
  cert.separating =
      separating_from_farkas(d, coeffs, table_point(t), verify_vertices);
  cert.gap = cert.separating->coeffs.dot(table_point(t)) - cert.separating->bound;
  return cert;
}

InequalityEvaluation evaluate_inequality(const CorrelationTable& t,
                                         const Inequality& iq) {
  if (dims_of(t) != iq.dims)
    throw std::invalid_argument("inequality and table dims differ");
  InequalityEvaluation ev;
  ev.value = iq.coeffs.dot(table_point(t));
  ev.margin = ev.value - iq.bound;
  ev.violated = ev.value > iq.bound + 1e-9;
  return ev;
}

std::vector<Inequality> lf_facets(const TableDims& dims) {
  const VertexSet& lf = lf_vertices(dims);
  const ExactHRep h = polytope_facets(lf.exact);
  std::vector<Inequality> out;
  for (std::size_t k = 0; k < h.A.size(); ++k) {
    Inequality iq;
    iq.dims = dims;
    iq.coeffs = to_double(h.A[k]);
    iq.bound = h.b[k].get_d();
    iq.canonicalize();
    out.push_back(std::move(iq));
  }
  // Deterministic order for downstream consumers.
  std::sort(out.begin(), out.end(), [](const Inequality& p, const Inequality& q) {
    for (long i = 0; i < p.coeffs.size(); ++i) {
      if (p.coeffs[i] != q.coeffs[i]) return p.coeffs[i] < q.coeffs[i];
    }
    return p.bound < q.bound;
  });
  return out;
}

Inequality chsh_inequality() {
  Inequality iq;
  iq.dims = {2, 2, 2, 2};
  iq.coeffs = Eigen::VectorXd::Zero(16);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const double s = (x == 1 && y == 1) ? -1.0 : 1.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          iq.coeffs[iq.dims.index(x, y, a, b)] = s * ((a + b) % 2 ? -1.0 : 1.0);
    }
  iq.bound = 2.0;
  return iq;
}

bool exact_hull_membership(const RatVec& point, const RatMat& vertices) {
  const std::size_t n = point.size();
  RatMat A(n + 1, RatVec(vertices.size()));
  for (std::size_t j = 0; j < vertices.size(); ++j) {
    for (std::size_t i = 0; i < n; ++i) A[i][j] = vertices[j][i];
    A[n][j] = 1;
  }
  RatVec b = point;
  b.push_back(1);
  return exact_feasibility(A, b);
}

StrictContainmentScan find_smallest_strict_containment() {
  const std::vector<TableDims> sizes = {
      {2, 2, 2, 2}, {2, 3, 2, 2}, {3, 2, 2, 2}, {3, 3, 2, 2}};
  StrictContainmentScan scan;
  for (const TableDims& d : sizes) {
    const VertexSet& lf = lf_vertices(d);
    bool strict = false;
    for (std::size_t i = 0; i < lf.vertices.size() && !strict; ++i) {
      // Deterministic vertices are Bell by construction; only fractional
      // vertices can fall outside.
      bool fractional = false;
      for (long j = 0; j < lf.vertices[i].size(); ++j)
        fractional |= lf.vertices[i][j] > 1e-9 && lf.vertices[i][j] < 1 - 1e-9;
      if (!fractional) continue;
      const MembershipCertificate cert =
          bell_membership(table_from_point(d, lf.vertices[i]));
      if (cert.verdict == MembershipCertificate::Verdict::Outside &&
          cert.gap > 1e-6) {
        strict = true;
        scan.dims = d;
        scan.lf_vertex_index = static_cast<int>(i);
        scan.gap = cert.gap;
        scan.vertex = lf.vertices[i];
      }
    }
    scan.scanned.emplace_back(d, strict);
    if (strict) return scan;
  }
  throw std::logic_error("no strict containment found at desk scale");
}

}  // namespace ewfs
