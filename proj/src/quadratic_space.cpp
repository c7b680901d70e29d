#include "unitary/quadratic_space.hpp"

namespace unitary {

// --------------------------------------------------------------- matrices

AMat AMat::identity(const Algebra& A, std::size_t m) {
  AMat r = zero(A, m, m);
  for (std::size_t i = 0; i < m; ++i) r(i, i) = A.one();
  return r;
}

AMat AMat::diagonal(const Algebra& A, const std::vector<AlgElem>& d) {
  AMat r = zero(A, d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) r(i, i) = d[i];
  return r;
}

AMat amat_mul(const Algebra& A, const AMat& x, const AMat& y) {
  if (x.cols() != y.rows()) fail(ErrorKind::InvalidInput, "matrix product size mismatch");
  AMat r = AMat::zero(A, x.rows(), y.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t k = 0; k < x.cols(); ++k) {
      if (A.is_zero(x(i, k))) continue;
      for (std::size_t j = 0; j < y.cols(); ++j) r(i, j) = A.add(r(i, j), A.mul(x(i, k), y(k, j)));
    }
  return r;
}

AMat amat_add(const Algebra& A, const AMat& x, const AMat& y) {
  AMat r = x;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) r(i, j) = A.add(x(i, j), y(i, j));
  return r;
}

AMat amat_sub(const Algebra& A, const AMat& x, const AMat& y) {
  AMat r = x;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) r(i, j) = A.sub(x(i, j), y(i, j));
  return r;
}

AVec amat_apply(const Algebra& A, const AMat& x, const AVec& v) {
  AVec r(x.rows(), A.zero());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) r[i] = A.add(r[i], A.mul(x(i, j), v[j]));
  return r;
}

AMat amat_star(const UnitaryRing& U, const AMat& x) {
  AMat r = AMat::zero(U.algebra, x.cols(), x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) r(j, i) = U.apply_sigma(x(i, j));
  return r;
}

AMat amat_map(const Algebra& A, const BaseRing& dst, const AMat& x) {
  AMat r(x.rows(), x.cols(), zero_vec(dst, A.rank()));
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) r(i, j) = vec_map(A.base(), dst, x(i, j));
  return r;
}

AMat block_diag(const Algebra& A, const AMat& x, const AMat& y) {
  AMat r = AMat::zero(A, x.rows() + y.rows(), x.cols() + y.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) r(i, j) = x(i, j);
  for (std::size_t i = 0; i < y.rows(); ++i)
    for (std::size_t j = 0; j < y.cols(); ++j) r(x.rows() + i, x.cols() + j) = y(i, j);
  return r;
}

Matrix block_expansion(const Algebra& A, const AMat& x) {
  std::size_t n = A.rank();
  Matrix M = Matrix::zero(A.base(), x.rows() * n, x.cols() * n);
  for (std::size_t s = 0; s < x.rows(); ++s)
    for (std::size_t t = 0; t < x.cols(); ++t) {
      Matrix L = A.left_mult(x(s, t));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) M(s * n + i, t * n + j) = L(i, j);
    }
  return M;
}

bool amat_is_invertible(const Algebra& A, const AMat& x) {
  if (x.rows() != x.cols()) return false;
  if (x.rows() == 0) return true;
  return A.base().is_unit(determinant(A.base(), block_expansion(A, x)));
}

std::optional<AMat> amat_inverse(const Algebra& A, const AMat& x) {
  if (!amat_is_invertible(A, x)) return std::nullopt;
  std::size_t m = x.rows(), n = A.rank();
  auto Minv = inverse(A.base(), block_expansion(A, x));
  if (!Minv) return std::nullopt;
  AMat y = AMat::zero(A, m, m);
  for (std::size_t t = 0; t < m; ++t) {
    Vec rhs = zero_vec(A.base(), m * n);
    for (std::size_t i = 0; i < n; ++i) rhs[t * n + i] = A.one()[i];
    Vec col = mat_apply(A.base(), *Minv, rhs);
    for (std::size_t s = 0; s < m; ++s) y(s, t) = AlgElem(col.begin() + s * n, col.begin() + (s + 1) * n);
  }
  if (amat_mul(A, y, x) != AMat::identity(A, m)) return std::nullopt;
  return y;
}

// ------------------------------------------------------------------ forms

SesqForm make_form(UnitaryRingPtr ring, AMat gram) {
  if (!ring) fail(ErrorKind::InvalidInput, "form without a parent ring");
  if (gram.rows() != gram.cols()) fail(ErrorKind::InvalidInput, "Gram matrix must be square");
  for (const auto& e : gram.entries()) {
    if (e.size() != ring->rank()) fail(ErrorKind::InvalidInput, "Gram entry has wrong length");
    for (const auto& c : e)
      if (!ring->base().contains(c)) fail(ErrorKind::InvalidInput, "Gram entry outside " + ring->base().name());
  }
  return SesqForm{std::move(ring), std::move(gram)};
}

QuadClass make_quad(UnitaryRingPtr ring, AMat gram) { return QuadClass{make_form(std::move(ring), std::move(gram))}; }

QuadClass diagonal_quad(UnitaryRingPtr ring, const std::vector<AlgElem>& diag) {
  AMat g = AMat::diagonal(ring->algebra, diag);
  return make_quad(std::move(ring), std::move(g));
}

HermForm make_herm(UnitaryRingPtr ring, AMat gram) {
  HermForm h{make_form(std::move(ring), std::move(gram))};
  if (!is_hermitian(h.form)) fail(ErrorKind::InvalidInput, "Gram matrix is not u-hermitian");
  return h;
}

AlgElem form_value(const SesqForm& f, const AVec& x, const AVec& y) {
  const UnitaryRing& U = *f.ring;
  const Algebra& A = U.algebra;
  AlgElem r = A.zero();
  for (std::size_t s = 0; s < f.rank(); ++s) {
    AlgElem xs = U.apply_sigma(x[s]);
    for (std::size_t t = 0; t < f.rank(); ++t) r = A.add(r, A.mul(A.mul(xs, f.gram(s, t)), y[t]));
  }
  return r;
}

bool is_hermitian(const SesqForm& f) {
  const UnitaryRing& U = *f.ring;
  const Algebra& A = U.algebra;
  for (std::size_t s = 0; s < f.rank(); ++s)
    for (std::size_t t = s; t < f.rank(); ++t)
      if (f.gram(t, s) != A.mul(U.apply_sigma(f.gram(s, t)), U.u)) return false;
  return true;
}

bool same_ring(const UnitaryRing& a, const UnitaryRing& b) {
  if (&a == &b) return true;
  return a.base() == b.base() && a.rank() == b.rank() && a.algebra.structure() == b.algebra.structure() &&
         a.algebra.one() == b.algebra.one() && a.sigma == b.sigma && a.u == b.u && a.lambda == b.lambda;
}

AMat herm_gram(const UnitaryRing& U, const AMat& g) {
  const Algebra& A = U.algebra;
  AMat h = g;
  for (std::size_t s = 0; s < g.rows(); ++s)
    for (std::size_t t = 0; t < g.cols(); ++t) h(s, t) = A.add(g(s, t), A.mul(U.apply_sigma(g(t, s)), U.u));
  return h;
}

HermForm herm_of(const QuadClass& q) {
  return HermForm{SesqForm{q.rep.ring, herm_gram(q.ring(), q.rep.gram)}};
}

bool in_lambda_P(const UnitaryRing& U, const AMat& d) {
  const Algebra& A = U.algebra;
  for (std::size_t s = 0; s < d.rows(); ++s) {
    if (!U.in_lambda(d(s, s))) return false;
    for (std::size_t t = s + 1; t < d.cols(); ++t)
      if (!A.is_zero(A.add(d(t, s), A.mul(U.apply_sigma(d(s, t)), U.u)))) return false;
  }
  return true;
}

namespace {

void require_compatible(const QuadClass& a, const QuadClass& b) {
  if (!same_ring(a.ring(), b.ring())) fail(ErrorKind::InvalidInput, "forms over different unitary rings");
  if (a.rank() != b.rank()) fail(ErrorKind::RankMismatch, "forms of different rank");
}

}  // namespace

bool quad_equal(const QuadClass& a, const QuadClass& b) {
  require_compatible(a, b);
  return in_lambda_P(a.ring(), amat_sub(a.ring().algebra, a.rep.gram, b.rep.gram));
}

AMat pullback(const UnitaryRing& U, const AMat& phi, const AMat& g) {
  const Algebra& A = U.algebra;
  return amat_mul(A, amat_star(U, phi), amat_mul(A, g, phi));
}

bool is_unimodular(const HermForm& h) { return amat_is_invertible(h.form.ring->algebra, h.form.gram); }

bool is_unimodular(const QuadClass& q) { return is_unimodular(herm_of(q)); }

bool is_isometry(const AMat& phi, const QuadClass& a, const QuadClass& b) {
  require_compatible(a, b);
  if (phi.rows() != a.rank() || phi.cols() != a.rank()) fail(ErrorKind::RankMismatch, "isometry has wrong size");
  if (!amat_is_invertible(a.ring().algebra, phi)) fail(ErrorKind::NotInvertible, "map is not invertible");
  QuadClass pulled{SesqForm{b.rep.ring, pullback(b.ring(), phi, b.rep.gram)}};
  return quad_equal(pulled, a);
}

QuadClass orth_sum(const QuadClass& a, const QuadClass& b) {
  if (!same_ring(a.ring(), b.ring())) fail(ErrorKind::InvalidInput, "forms over different unitary rings");
  return QuadClass{SesqForm{a.rep.ring, block_diag(a.ring().algebra, a.rep.gram, b.rep.gram)}};
}

QuadClass scalar_extend(const QuadClass& q, const UnitaryRingPtr& target) {
  if (target->rank() != q.ring().rank()) fail(ErrorKind::InvalidInput, "target ring has a different rank");
  return make_quad(target, amat_map(q.ring().algebra, target->base(), q.rep.gram));
}

QuadClass scalar_extend(const QuadClass& q, const BaseRing& dst) {
  return scalar_extend(q, scalar_extend(q.ring(), dst));
}

std::vector<AMat> lambda_P_basis(const UnitaryRing& U, std::size_t m) {
  const Algebra& A = U.algebra;
  const BaseRing& K = A.base();
  if (!K.is_field()) fail(ErrorKind::Unsupported, "Lambda_P basis needs a field base");
  std::size_t n = A.rank(), N = m * m * n;
  Subspace L(K, U.lambda, n);
  std::size_t q = L.complement().size();
  // Quotient coordinates of the basis vectors of A modulo Lambda.
  Matrix Qmat = Matrix::zero(K, q, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vec c = L.quotient_coords(A.basis(j));
    for (std::size_t r = 0; r < q; ++r) Qmat(r, j) = c[r];
  }
  Matrix S = mat_mul(K, A.right_mult(U.u), U.sigma);  // x -> sigma(x) u
  std::size_t rows = m * m * n + m * q;
  Matrix C = Matrix::zero(K, rows, N);
  auto var = [&](std::size_t s, std::size_t t, std::size_t k) { return (s * m + t) * n + k; };
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t t = 0; t < m; ++t)
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t row = var(s, t, i);
        C(row, var(s, t, i)) = K.add(C(row, var(s, t, i)), K.one());
        for (std::size_t k = 0; k < n; ++k) C(row, var(t, s, k)) = K.add(C(row, var(t, s, k)), S(i, k));
      }
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t r = 0; r < q; ++r)
      for (std::size_t k = 0; k < n; ++k) C(m * m * n + s * q + r, var(s, s, k)) = Qmat(r, k);
  std::vector<AMat> out;
  for (const auto& v : kernel_basis(K, C)) {
    AMat d = AMat::zero(A, m, m);
    for (std::size_t s = 0; s < m; ++s)
      for (std::size_t t = 0; t < m; ++t)
        d(s, t) = AlgElem(v.begin() + var(s, t, 0), v.begin() + var(s, t, 0) + n);
    out.push_back(std::move(d));
  }
  return out;
}

// ---------------------------------------------------------------- residue

AlgElem Residue::to_raw(const AlgElem& a) const {
  if (raw == source) return a;
  return vec_map(source->base(), raw->base(), a);
}

AlgElem Residue::to_bar(const AlgElem& a) const { return mat_apply(raw->base(), bar.projection, to_raw(a)); }

AlgElem Residue::to_component(std::size_t i, const AlgElem& a) const {
  return factorization.components.at(i).project(to_bar(a));
}

AMat Residue::component_matrix(std::size_t i, const AMat& x) const {
  const auto& c = factorization.components.at(i);
  AMat r(x.rows(), x.cols(), c.ring->algebra.zero());
  for (std::size_t s = 0; s < x.rows(); ++s)
    for (std::size_t t = 0; t < x.cols(); ++t) r(s, t) = to_component(i, x(s, t));
  return r;
}

Residue make_residue(UnitaryRingPtr U, std::optional<long> p) {
  Residue r;
  r.source = U;
  const BaseRing& R = U->base();
  switch (R.kind()) {
    case RingKind::FiniteField:
    case RingKind::Rationals:
      r.raw = U;
      break;
    case RingKind::LocalizedIntegers: {
      if (!p) {
        if (R.primes().size() != 1) fail(ErrorKind::InvalidInput, "reduction prime required for " + R.name());
        p = R.primes()[0];
      }
      r.raw = scalar_extend(*U, BaseRing::finite_field(*p));
      break;
    }
    case RingKind::TruncatedLocal:
      if (p && *p != R.prime()) fail(ErrorKind::InvalidInput, "reduction prime differs from the base prime");
      r.raw = scalar_extend(*U, BaseRing::finite_field(R.prime()));
      break;
    case RingKind::Product:
      fail(ErrorKind::Unsupported, "residue of a product base ring");
  }
  r.bar = semisimple_quotient(*r.raw);
  r.factorization = semisimple_factorization(*r.bar.ring);
  return r;
}

ComponentForms reduce_components(const QuadClass& q, std::optional<long> p) {
  ComponentForms out;
  out.residue = make_residue(q.rep.ring, p);
  for (std::size_t i = 0; i < out.residue.factorization.components.size(); ++i) {
    const auto& c = out.residue.factorization.components[i];
    out.forms.emplace_back(i, make_quad(c.ring, out.residue.component_matrix(i, q.rep.gram)));
  }
  return out;
}

}  // namespace unitary
