#include "ewfs/dd.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "ewfs/errors.hpp"

namespace ewfs {

namespace {

// Small dynamic bitset for the active-constraint sets of rays.
class Bits {
 public:
  explicit Bits(std::size_t n) : words_((n + 63) / 64, 0) {}
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t(1) << (i & 63); }
  bool subset_of(const Bits& other) const {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w] & ~other.words_[w]) return false;
    return true;
  }
  Bits intersect(const Bits& other) const {
    Bits r(*this);
    for (std::size_t w = 0; w < words_.size(); ++w) r.words_[w] &= other.words_[w];
    return r;
  }

 private:
  std::vector<std::uint64_t> words_;
};

Rat dot(const RatVec& a, const RatVec& b) {
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Scale to a primitive integer vector (denominators cleared, gcd 1).
void make_primitive(RatVec& v) {
  mpz_class den_lcm = 1;
  for (const Rat& x : v)
    if (x != 0)
      mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), x.get_den().get_mpz_t());
  mpz_class num_gcd = 0;
  for (Rat& x : v) {
    x *= den_lcm;
    if (x != 0)
      mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), x.get_num().get_mpz_t());
  }
  if (num_gcd > 1)
    for (Rat& x : v) x /= num_gcd;
}

struct Ray {
  RatVec v;
  Bits zero;
  Ray(RatVec vv, std::size_t rows) : v(std::move(vv)), zero(rows) {}
};

// Invertible row subset of m (greedy in row order) and the inverse of that
// square submatrix. Returns chosen row indices; throws if rank < dim.
std::vector<std::size_t> initial_basis(const RatMat& m, RatMat& inv) {
  const std::size_t dim = m[0].size();
  RatMat work;  // reduced copies of the chosen rows
  std::vector<std::size_t> chosen;
  std::vector<long> pivot_cols;
  for (std::size_t i = 0; i < m.size() && chosen.size() < dim; ++i) {
    RatVec r = m[i];
    for (std::size_t k = 0; k < work.size(); ++k) {
      const Rat f = r[pivot_cols[k]] / work[k][pivot_cols[k]];
      if (f == 0) continue;
      for (std::size_t c = 0; c < dim; ++c) r[c] -= f * work[k][c];
    }
    long piv = -1;
    for (std::size_t c = 0; c < dim; ++c)
      if (r[c] != 0) {
        piv = static_cast<long>(c);
        break;
      }
    if (piv < 0) continue;
    work.push_back(std::move(r));
    chosen.push_back(i);
    pivot_cols.push_back(piv);
  }
  if (chosen.size() < dim)
    throw std::invalid_argument(
        "cone is not pointed: constraint matrix rank " +
        std::to_string(chosen.size()) + " < dimension " + std::to_string(dim));

  // Invert the chosen square submatrix by Gauss-Jordan.
  RatMat a(dim, RatVec(dim));
  for (std::size_t r = 0; r < dim; ++r) a[r] = m[chosen[r]];
  inv.assign(dim, RatVec(dim, 0));
  for (std::size_t r = 0; r < dim; ++r) inv[r][r] = 1;
  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t piv = col;
    while (a[piv][col] == 0) ++piv;
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const Rat lead = a[col][col];
    for (std::size_t c = 0; c < dim; ++c) {
      a[col][c] /= lead;
      inv[col][c] /= lead;
    }
    for (std::size_t r = 0; r < dim; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const Rat f = a[r][col];
      for (std::size_t c = 0; c < dim; ++c) {
        a[r][c] -= f * a[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return chosen;
}

}  // namespace

int rat_rank(RatMat m) {
  if (m.empty()) return 0;
  const std::size_t cols = m[0].size();
  int rank = 0;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
    std::size_t piv = row;
    while (piv < m.size() && m[piv][col] == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[row], m[piv]);
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][col] == 0) continue;
      const Rat f = m[r][col] / m[row][col];
      for (std::size_t c = col; c < cols; ++c) m[r][c] -= f * m[row][c];
    }
    ++row;
    ++rank;
  }
  return rank;
}

RatMat rat_kernel(const RatMat& m_in) {
  if (m_in.empty()) return {};
  RatMat m = m_in;
  const std::size_t rows = m.size(), cols = m[0].size();
  std::vector<long> pivot_col_of_row;
  std::vector<char> is_pivot(cols, 0);
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t piv = row;
    while (piv < rows && m[piv][col] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[row], m[piv]);
    const Rat lead = m[row][col];
    for (std::size_t c = col; c < cols; ++c) m[row][c] /= lead;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == row || m[r][col] == 0) continue;
      const Rat f = m[r][col];
      for (std::size_t c = col; c < cols; ++c) m[r][c] -= f * m[row][c];
    }
    pivot_col_of_row.push_back(static_cast<long>(col));
    is_pivot[col] = 1;
    ++row;
  }
  RatMat basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    RatVec v(cols, 0);
    v[free] = 1;
    for (std::size_t r = 0; r < pivot_col_of_row.size(); ++r)
      v[pivot_col_of_row[r]] = -m[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

RatMat dd_extreme_rays(const RatMat& m, std::size_t max_rays) {
  if (m.empty() || m[0].empty())
    throw std::invalid_argument("empty constraint matrix");
  const std::size_t dim = m[0].size();
  const std::size_t rows = m.size();

  RatMat inv;
  const std::vector<std::size_t> binit = initial_basis(m, inv);

  std::vector<char> processed(rows, 0);
  for (std::size_t i : binit) processed[i] = 1;

  std::vector<Ray> rays;
  for (std::size_t j = 0; j < dim; ++j) {
    RatVec col(dim);
    for (std::size_t r = 0; r < dim; ++r) col[r] = inv[r][j];
    make_primitive(col);
    Ray ray(std::move(col), rows);
    for (std::size_t i : binit)
      if (dot(m[i], ray.v) == 0) ray.zero.set(i);
    rays.push_back(std::move(ray));
  }

  for (std::size_t i = 0; i < rows; ++i) {
    if (processed[i]) continue;
    processed[i] = 1;

    std::vector<Rat> vals(rays.size());
    std::vector<int> sign(rays.size());
    for (std::size_t r = 0; r < rays.size(); ++r) {
      vals[r] = dot(m[i], rays[r].v);
      sign[r] = vals[r] > 0 ? 1 : (vals[r] < 0 ? -1 : 0);
      if (sign[r] == 0) rays[r].zero.set(i);
    }

    bool any_neg = false;
    for (int s : sign) any_neg |= (s < 0);
    if (!any_neg) continue;

    std::vector<Ray> next;
    for (std::size_t r = 0; r < rays.size(); ++r)
      if (sign[r] >= 0) next.push_back(rays[r]);

    for (std::size_t p = 0; p < rays.size(); ++p) {
      if (sign[p] <= 0) continue;
      for (std::size_t n = 0; n < rays.size(); ++n) {
        if (sign[n] >= 0) continue;
        const Bits common = rays[p].zero.intersect(rays[n].zero);
        bool adjacent = true;
        for (std::size_t q = 0; q < rays.size() && adjacent; ++q) {
          if (q == p || q == n) continue;
          if (common.subset_of(rays[q].zero)) adjacent = false;
        }
        if (!adjacent) continue;
        RatVec w(dim);
        for (std::size_t c = 0; c < dim; ++c)
          w[c] = vals[p] * rays[n].v[c] - vals[n] * rays[p].v[c];
        make_primitive(w);
        Ray born(std::move(w), rows);
        for (std::size_t pr = 0; pr < rows; ++pr)
          if (processed[pr] && dot(m[pr], born.v) == 0) born.zero.set(pr);
        next.push_back(std::move(born));
        if (next.size() > max_rays)
          throw SizeGuardError("double description exceeded the ray guard (" +
                               std::to_string(max_rays) + ")");
      }
    }
    rays = std::move(next);
  }

  RatMat out;
  out.reserve(rays.size());
  for (auto& r : rays) out.push_back(std::move(r.v));
  return out;
}

RatMat polytope_vertices(const ExactHRep& h, std::size_t max_rays) {
  std::size_t n = 0;
  if (!h.A.empty())
    n = h.A[0].size();
  else if (!h.C.empty())
    n = h.C[0].size();
  else
    throw std::invalid_argument("empty H-representation");

  RatMat m;
  for (std::size_t k = 0; k < h.C.size(); ++k) {
    RatVec pos(n + 1), neg(n + 1);
    for (std::size_t c = 0; c < n; ++c) {
      pos[c] = h.C[k][c];
      neg[c] = -h.C[k][c];
    }
    pos[n] = -h.d[k];
    neg[n] = h.d[k];
    m.push_back(std::move(pos));
    m.push_back(std::move(neg));
  }
  {
    RatVec t(n + 1, 0);
    t[n] = 1;
    m.push_back(std::move(t));
  }
  for (std::size_t k = 0; k < h.A.size(); ++k) {
    RatVec row(n + 1);
    for (std::size_t c = 0; c < n; ++c) row[c] = -h.A[k][c];
    row[n] = h.b[k];
    m.push_back(std::move(row));
  }

  const RatMat rays = dd_extreme_rays(m, max_rays);
  RatMat vertices;
  for (const auto& r : rays) {
    if (r[n] == 0) {
      bool nonzero = false;
      for (std::size_t c = 0; c < n; ++c) nonzero |= (r[c] != 0);
      if (nonzero)
        throw UnboundedError("polytope admits an unbounded direction");
      continue;
    }
    RatVec v(n);
    for (std::size_t c = 0; c < n; ++c) v[c] = r[c] / r[n];
    vertices.push_back(std::move(v));
  }
  return vertices;
}

ExactHRep polytope_facets(const RatMat& points, std::size_t max_rays) {
  if (points.empty()) throw std::invalid_argument("no points given");
  const std::size_t n = points[0].size();
  const RatVec& p0 = points[0];

  RatMat dirs;  // rows: points[i] - p0
  for (std::size_t i = 1; i < points.size(); ++i) {
    RatVec d(n);
    for (std::size_t c = 0; c < n; ++c) d[c] = points[i][c] - p0[c];
    dirs.push_back(std::move(d));
  }

  ExactHRep out;
  // Affine-hull equalities: left kernel of the direction matrix.
  for (const RatVec& e : rat_kernel(dirs.empty() ? RatMat{RatVec(n, 0)} : dirs)) {
    out.C.push_back(e);
    out.d.push_back(dot(e, p0));
  }

  // Independent coordinate subset J identifying the direction space.
  std::vector<std::size_t> J;
  {
    RatMat work = dirs;
    const std::size_t rows = work.size();
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < rows; ++col) {
      std::size_t piv = row;
      while (piv < rows && work[piv][col] == 0) ++piv;
      if (piv == rows) continue;
      std::swap(work[row], work[piv]);
      for (std::size_t r = 0; r < rows; ++r) {
        if (r == row || work[r][col] == 0) continue;
        const Rat f = work[r][col] / work[row][col];
        for (std::size_t c = col; c < n; ++c) work[r][c] -= f * work[row][c];
      }
      J.push_back(col);
      ++row;
    }
  }
  const std::size_t k = J.size();
  if (k == 0) return out;  // a single point; the equalities pin it down

  RatMat cone_rows;
  for (const auto& p : points) {
    RatVec row(k + 1);
    for (std::size_t j = 0; j < k; ++j) row[j] = p[J[j]] - p0[J[j]];
    row[k] = 1;
    cone_rows.push_back(std::move(row));
  }
  const RatMat facet_rays = dd_extreme_rays(cone_rows, max_rays);

  for (const auto& g : facet_rays) {
    // g.(x - p0)_J + g0 >= 0  ->  (-g).x_J <= g0 - g.(p0)_J
    RatVec a(n, 0);
    Rat rhs = g[k];
    for (std::size_t j = 0; j < k; ++j) {
      a[J[j]] = -g[j];
      rhs -= g[j] * p0[J[j]];
    }
    out.A.push_back(std::move(a));
    out.b.push_back(rhs);
  }
  return out;
}

}  // namespace ewfs
