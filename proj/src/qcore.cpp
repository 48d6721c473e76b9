#include "ewfs/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ewfs {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Offset tables splitting a flat index into a "target" part (factors listed
// in tpos order) and the remaining part. off_t[i] + off_r[r] is the flat
// index whose target digits decode i and whose other digits decode r.
struct SubindexMap {
  long dt = 1, dr = 1;
  std::vector<long> off_t, off_r;
};

SubindexMap build_subindex_map(const std::vector<SystemLabel>& factors,
                               const std::vector<int>& tpos) {
  const int k = static_cast<int>(factors.size());
  std::vector<long> stride(k, 1);
  for (int i = k - 2; i >= 0; --i) stride[i] = stride[i + 1] * factors[i + 1].dim;

  std::vector<char> in_target(k, 0);
  for (int p : tpos) in_target[p] = 1;
  std::vector<int> rpos;
  for (int i = 0; i < k; ++i)
    if (!in_target[i]) rpos.push_back(i);

  SubindexMap m;
  for (int p : tpos) m.dt *= factors[p].dim;
  for (int p : rpos) m.dr *= factors[p].dim;

  auto fill = [&](const std::vector<int>& pos, long total, std::vector<long>& out) {
    out.assign(total, 0);
    for (long idx = 0; idx < total; ++idx) {
      long rem = idx, off = 0;
      for (int j = static_cast<int>(pos.size()) - 1; j >= 0; --j) {
        const int d = factors[pos[j]].dim;
        off += (rem % d) * stride[pos[j]];
        rem /= d;
      }
      out[idx] = off;
    }
  };
  fill(tpos, m.dt, m.off_t);
  fill(rpos, m.dr, m.off_r);
  return m;
}

// Positions of op's factors inside the state, validating name/dim agreement.
std::vector<int> locate_factors(const std::vector<SystemLabel>& op_factors,
                                const StateVector& s) {
  std::vector<int> tpos;
  tpos.reserve(op_factors.size());
  for (const auto& f : op_factors) {
    const int p = s.factor_position(f.name);
    require(p >= 0, "operator factor '" + f.name + "' not present in state");
    require(s.factors()[p].dim == f.dim,
            "dimension mismatch on factor '" + f.name + "'");
    tpos.push_back(p);
  }
  return tpos;
}

CVec apply_on_positions(const CMat& m, const StateVector& s,
                        const std::vector<int>& tpos) {
  const SubindexMap map = build_subindex_map(s.factors(), tpos);
  require(m.rows() == map.dt && m.cols() == map.dt,
          "operator matrix side does not match target factor dimensions");
  CVec out = CVec::Zero(s.dim());
  CVec chunk(map.dt);
  for (long r = 0; r < map.dr; ++r) {
    for (long j = 0; j < map.dt; ++j) chunk[j] = s.amps()[map.off_t[j] + map.off_r[r]];
    CVec res = m * chunk;
    for (long i = 0; i < map.dt; ++i) out[map.off_t[i] + map.off_r[r]] = res[i];
  }
  return out;
}

void check_unique_names(const std::vector<SystemLabel>& factors) {
  for (size_t i = 0; i < factors.size(); ++i)
    for (size_t j = i + 1; j < factors.size(); ++j)
      require(factors[i].name != factors[j].name,
              "duplicate factor name '" + factors[i].name + "'");
}

// Deterministic orthonormal completion of a set of orthonormal columns.
CMat complete_basis(const std::vector<CVec>& given, long dim) {
  std::vector<CVec> cols = given;
  for (long i = 0; i < dim && static_cast<long>(cols.size()) < dim; ++i) {
    CVec v = CVec::Zero(dim);
    v[i] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& c : cols) v -= c.dot(v) * c;
    const double n = v.norm();
    if (n > 1e-8) cols.push_back(v / n);
  }
  require(static_cast<long>(cols.size()) == dim, "basis completion failed");
  CMat out(dim, dim);
  for (long j = 0; j < dim; ++j) out.col(j) = cols[j];
  return out;
}

}  // namespace

long composite_dim(const std::vector<SystemLabel>& factors) {
  long d = 1;
  for (const auto& f : factors) {
    require(f.dim >= 1, "factor '" + f.name + "' has nonpositive dimension");
    d *= f.dim;
  }
  return d;
}

StateVector::StateVector(std::vector<SystemLabel> factors, CVec amps)
    : factors_(std::move(factors)), amps_(std::move(amps)) {
  check_unique_names(factors_);
  require(amps_.size() == composite_dim(factors_),
          "amplitude array length does not equal the product of factor dims");
}

bool StateVector::is_normalized(double tol) const {
  return std::abs(norm() - 1.0) <= tol;
}

int StateVector::factor_position(const std::string& name) const {
  for (size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].name == name) return static_cast<int>(i);
  return -1;
}

Operator::Operator(std::vector<SystemLabel> factors, CMat matrix)
    : factors_(std::move(factors)), matrix_(std::move(matrix)) {
  check_unique_names(factors_);
  require(matrix_.rows() == matrix_.cols(), "operator matrix must be square");
  require(matrix_.rows() == composite_dim(factors_),
          "operator matrix side does not equal the product of factor dims");
}

bool Operator::is_unitary(double tol) const {
  const CMat d = matrix_.adjoint() * matrix_ - CMat::Identity(dim(), dim());
  return d.cwiseAbs().maxCoeff() < tol;
}

bool Operator::is_projector(double tol) const {
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() >= tol) return false;
  return (matrix_ * matrix_ - matrix_).cwiseAbs().maxCoeff() < tol;
}

DensityOperator::DensityOperator(std::vector<SystemLabel> factors, CMat matrix)
    : factors_(std::move(factors)), matrix_(std::move(matrix)) {
  check_unique_names(factors_);
  require(matrix_.rows() == matrix_.cols() &&
              matrix_.rows() == composite_dim(factors_),
          "density matrix side does not equal the product of factor dims");
  require((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() < kOpTol,
          "density matrix is not Hermitian");
  require(std::abs(matrix_.trace().real() - 1.0) < kOpTol &&
              std::abs(matrix_.trace().imag()) < kOpTol,
          "density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<CMat> es(matrix_, Eigen::EigenvaluesOnly);
  require(es.eigenvalues().minCoeff() >= -kOpTol,
          "density matrix has a negative eigenvalue");
}

StateVector basis_state(const std::vector<SystemLabel>& factors, long index) {
  CVec v = CVec::Zero(composite_dim(factors));
  require(index >= 0 && index < v.size(), "basis index out of range");
  v[index] = 1.0;
  return StateVector(factors, std::move(v));
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  for (const auto& f : b.factors())
    require(a.factor_position(f.name) < 0,
            "duplicate factor name '" + f.name + "' in tensor product");
  std::vector<SystemLabel> factors = a.factors();
  factors.insert(factors.end(), b.factors().begin(), b.factors().end());
  CVec amps(a.dim() * b.dim());
  for (long i = 0; i < a.dim(); ++i)
    amps.segment(i * b.dim(), b.dim()) = a.amps()[i] * b.amps();
  return StateVector(std::move(factors), std::move(amps));
}

Operator tensor(const Operator& a, const Operator& b) {
  for (const auto& f : b.factors())
    for (const auto& g : a.factors())
      require(f.name != g.name,
              "duplicate factor name '" + f.name + "' in tensor product");
  std::vector<SystemLabel> factors = a.factors();
  factors.insert(factors.end(), b.factors().begin(), b.factors().end());
  const long da = a.dim(), db = b.dim();
  CMat m(da * db, da * db);
  for (long i = 0; i < da; ++i)
    for (long j = 0; j < da; ++j)
      m.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
  return Operator(std::move(factors), std::move(m));
}

Operator adjoint(const Operator& u) {
  return Operator(u.factors(), u.matrix().adjoint());
}

Operator identity_on(const std::vector<SystemLabel>& factors) {
  const long d = composite_dim(factors);
  return Operator(factors, CMat::Identity(d, d));
}

Operator projector_onto(const StateVector& v) {
  require(v.is_normalized(1e-10), "projector target state is not normalized");
  return Operator(v.factors(), v.amps() * v.amps().adjoint());
}

Operator projector_onto_span(const std::vector<StateVector>& vs) {
  require(!vs.empty(), "empty span");
  CMat p = CMat::Zero(vs[0].dim(), vs[0].dim());
  for (const auto& v : vs) {
    require(v.factors() == vs[0].factors(), "span states on mismatched factors");
    p += v.amps() * v.amps().adjoint();
  }
  Operator out(vs[0].factors(), std::move(p));
  require(out.is_projector(kOpTol), "span states are not orthonormal");
  return out;
}

StateVector apply(const Operator& u, const StateVector& s, bool require_unitary) {
  if (require_unitary)
    require(u.is_unitary(kOpTol), "operator is not unitary");
  const auto tpos = locate_factors(u.factors(), s);
  return StateVector(s.factors(), apply_on_positions(u.matrix(), s, tpos));
}

Operator unitary_from_mapping(const std::vector<SystemLabel>& factors,
                              const std::vector<std::pair<CVec, CVec>>& pairs) {
  const long d = composite_dim(factors);
  std::vector<CVec> ins, outs;
  for (const auto& [in, out] : pairs) {
    require(in.size() == d && out.size() == d, "mapping vector length mismatch");
    ins.push_back(in);
    outs.push_back(out);
  }
  for (size_t i = 0; i < ins.size(); ++i)
    for (size_t j = 0; j <= i; ++j) {
      const cdouble gi = ins[j].dot(ins[i]);
      const cdouble go = outs[j].dot(outs[i]);
      const cdouble expect = (i == j) ? cdouble(1.0) : cdouble(0.0);
      require(std::abs(gi - expect) < kOpTol && std::abs(go - expect) < kOpTol,
              "mapping vectors are not orthonormal");
    }
  const CMat uin = complete_basis(ins, d);
  const CMat uout = complete_basis(outs, d);
  return Operator(factors, uout * uin.adjoint());
}

Operator dilate_measurement(const std::vector<StateVector>& basis,
                            const SystemLabel& pointer) {
  require(!basis.empty(), "empty measurement basis");
  const auto& sys_factors = basis[0].factors();
  const long ds = composite_dim(sys_factors);
  const int k = static_cast<int>(basis.size());
  require(pointer.dim >= k + 1,
          "pointer too small: needs a ready slot plus one per outcome");
  for (const auto& b : basis)
    require(b.factors() == sys_factors, "basis states on mismatched factors");
  for (int i = 0; i < k; ++i)
    for (int j = 0; j <= i; ++j) {
      const cdouble g = basis[j].amps().dot(basis[i].amps());
      const cdouble expect = (i == j) ? cdouble(1.0) : cdouble(0.0);
      require(std::abs(g - expect) < kOpTol, "measurement basis not orthonormal");
    }

  std::vector<SystemLabel> factors = sys_factors;
  factors.push_back(pointer);
  const int dp = pointer.dim;
  std::vector<std::pair<CVec, CVec>> pairs;
  for (int c = 0; c < k; ++c) {
    CVec in = CVec::Zero(ds * dp), out = CVec::Zero(ds * dp);
    for (long t = 0; t < ds; ++t) {
      in[t * dp + 0] = basis[c].amps()[t];       // |b_c>|R>
      out[t * dp + c + 1] = basis[c].amps()[t];  // |b_c>|O_c>
    }
    pairs.emplace_back(std::move(in), std::move(out));
  }
  return unitary_from_mapping(factors, pairs);
}

double born(const StateVector& s, const Operator& projector) {
  require(projector.is_projector(kOpTol), "born requires a projector");
  require(s.is_normalized(1e-10), "born requires a normalized state");
  const auto tpos = locate_factors(projector.factors(), s);
  const CVec proj = apply_on_positions(projector.matrix(), s, tpos);
  return s.amps().dot(proj).real();
}

namespace {

CMat reduced_from_state(const CVec& amps, const SubindexMap& map) {
  CMat rho = CMat::Zero(map.dt, map.dt);
  for (long r = 0; r < map.dr; ++r)
    for (long i = 0; i < map.dt; ++i) {
      const cdouble ai = amps[map.off_t[i] + map.off_r[r]];
      if (ai == cdouble(0.0)) continue;
      for (long j = 0; j < map.dt; ++j)
        rho(i, j) += ai * std::conj(amps[map.off_t[j] + map.off_r[r]]);
    }
  return rho;
}

std::vector<int> keep_positions(const std::vector<SystemLabel>& factors,
                                const std::vector<std::string>& keep,
                                std::vector<SystemLabel>& kept_labels) {
  std::vector<int> tpos;
  for (const auto& name : keep) {
    int p = -1;
    for (size_t i = 0; i < factors.size(); ++i)
      if (factors[i].name == name) p = static_cast<int>(i);
    if (p < 0) throw std::invalid_argument("unknown factor label '" + name + "'");
    tpos.push_back(p);
    kept_labels.push_back(factors[p]);
  }
  return tpos;
}

}  // namespace

DensityOperator partial_trace(const StateVector& s,
                              const std::vector<std::string>& keep) {
  std::vector<SystemLabel> kept;
  const auto tpos = keep_positions(s.factors(), keep, kept);
  const SubindexMap map = build_subindex_map(s.factors(), tpos);
  return DensityOperator(kept, reduced_from_state(s.amps(), map));
}

DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<std::string>& keep) {
  std::vector<SystemLabel> kept;
  const auto tpos = keep_positions(rho.factors(), keep, kept);
  const SubindexMap map = build_subindex_map(rho.factors(), tpos);
  CMat out = CMat::Zero(map.dt, map.dt);
  for (long i = 0; i < map.dt; ++i)
    for (long j = 0; j < map.dt; ++j)
      for (long r = 0; r < map.dr; ++r)
        out(i, j) += rho.matrix()(map.off_t[i] + map.off_r[r],
                                  map.off_t[j] + map.off_r[r]);
  return DensityOperator(kept, std::move(out));
}

std::vector<CollapseBranch> collapse(const StateVector& s,
                                     const std::vector<StateVector>& basis) {
  require(!basis.empty(), "empty collapse basis");
  require(s.is_normalized(1e-10), "collapse requires a normalized state");
  const auto tpos = locate_factors(basis[0].factors(), s);
  const SubindexMap map = build_subindex_map(s.factors(), tpos);
  for (const auto& b : basis)
    require(b.factors() == basis[0].factors(), "basis states on mismatched factors");

  std::vector<CollapseBranch> branches;
  double total = 0.0;
  for (const auto& b : basis) {
    require(b.dim() == map.dt, "collapse basis dimension mismatch");
    CVec amps = CVec::Zero(s.dim());
    double prob = 0.0;
    for (long r = 0; r < map.dr; ++r) {
      cdouble coeff = 0.0;
      for (long t = 0; t < map.dt; ++t)
        coeff += std::conj(b.amps()[t]) * s.amps()[map.off_t[t] + map.off_r[r]];
      prob += std::norm(coeff);
      for (long t = 0; t < map.dt; ++t)
        amps[map.off_t[t] + map.off_r[r]] = b.amps()[t] * coeff;
    }
    CollapseBranch br;
    if (prob <= 1e-20) {
      br.probability = 0.0;
      br.zero_probability = true;
      br.state = StateVector(s.factors(), std::move(amps));
    } else {
      br.probability = prob;
      br.state = StateVector(s.factors(), amps / std::sqrt(prob));
    }
    total += br.probability;
    branches.push_back(std::move(br));
  }
  require(std::abs(total - 1.0) < kOpTol,
          "collapse basis is incomplete: branch probabilities sum to " +
              std::to_string(total));
  return branches;
}

}  // namespace ewfs
