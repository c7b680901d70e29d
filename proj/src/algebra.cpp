#include "unitary/algebra.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace unitary {

// ------------------------------------------------------------------ Algebra

Algebra::Algebra(BaseRing base, std::size_t rank, std::vector<RingElem> structure, AlgElem unit)
    : base_(std::move(base)), rank_(rank), structure_(std::move(structure)), unit_(std::move(unit)) {
  if (structure_.size() != rank_ * rank_ * rank_)
    fail(ErrorKind::InvalidInput, "structure constants must have rank^3 entries");
  if (unit_.size() != rank_) fail(ErrorKind::InvalidInput, "unit has wrong length");
  for (const auto& c : structure_)
    if (!base_.contains(c)) fail(ErrorKind::InvalidInput, "structure constant outside " + base_.name());
  sparse_.resize(rank_ * rank_);
  for (std::size_t ij = 0; ij < rank_ * rank_; ++ij)
    for (std::size_t k = 0; k < rank_; ++k) {
      const RingElem& v = structure_[ij * rank_ + k];
      if (!base_.is_zero(v)) sparse_[ij].emplace_back(k, v);
    }
}

AlgElem Algebra::mul(const AlgElem& a, const AlgElem& b) const {
  AlgElem r = zero();
  for (std::size_t i = 0; i < rank_; ++i) {
    if (base_.is_zero(a[i])) continue;
    for (std::size_t j = 0; j < rank_; ++j) {
      if (base_.is_zero(b[j])) continue;
      RingElem ab = base_.mul(a[i], b[j]);
      for (const auto& [k, c] : sparse_[i * rank_ + j]) r[k] = base_.add(r[k], base_.mul(ab, c));
    }
  }
  return r;
}

AlgElem Algebra::pow(const AlgElem& a, mpz_class k) const {
  AlgElem result = unit_, b = a;
  while (k > 0) {
    if (mpz_odd_p(k.get_mpz_t())) result = mul(result, b);
    k >>= 1;
    if (k > 0) b = mul(b, b);
  }
  return result;
}

Matrix Algebra::left_mult(const AlgElem& a) const {
  std::vector<Vec> cols;
  for (std::size_t j = 0; j < rank_; ++j) cols.push_back(mul(a, basis(j)));
  return Matrix::from_columns(cols, rank_);
}

Matrix Algebra::right_mult(const AlgElem& a) const {
  std::vector<Vec> cols;
  for (std::size_t j = 0; j < rank_; ++j) cols.push_back(mul(basis(j), a));
  return Matrix::from_columns(cols, rank_);
}

bool Algebra::is_unit(const AlgElem& a) const { return base_.is_unit(determinant(base_, left_mult(a))); }

std::optional<AlgElem> Algebra::inverse(const AlgElem& a) const {
  if (!is_unit(a)) return std::nullopt;
  auto inv = unitary::inverse(base_, left_mult(a));
  if (!inv) return std::nullopt;
  AlgElem x = mat_apply(base_, *inv, unit_);
  if (mul(x, a) != unit_ || mul(a, x) != unit_) return std::nullopt;
  return x;
}

bool Algebra::is_commutative() const {
  for (std::size_t i = 0; i < rank_; ++i)
    for (std::size_t j = i + 1; j < rank_; ++j)
      if (mul(basis(i), basis(j)) != mul(basis(j), basis(i))) return false;
  return true;
}

std::vector<std::string> Algebra::check() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < rank_ && out.empty(); ++i)
    for (std::size_t j = 0; j < rank_ && out.empty(); ++j)
      for (std::size_t k = 0; k < rank_; ++k) {
        AlgElem l = mul(mul(basis(i), basis(j)), basis(k));
        AlgElem r = mul(basis(i), mul(basis(j), basis(k)));
        if (l != r) {
          out.push_back("associativity fails on basis triple (" + std::to_string(i) + "," +
                        std::to_string(j) + "," + std::to_string(k) + ")");
          break;
        }
      }
  for (std::size_t i = 0; i < rank_; ++i)
    if (mul(unit_, basis(i)) != basis(i) || mul(basis(i), unit_) != basis(i)) {
      out.push_back("unit is not two-sided on basis element " + std::to_string(i));
      break;
    }
  return out;
}

Algebra Algebra::map(const BaseRing& dst) const {
  std::vector<RingElem> sc;
  sc.reserve(structure_.size());
  for (const auto& c : structure_) sc.push_back(ring_hom(base_, dst, c));
  return Algebra(dst, rank_, std::move(sc), vec_map(base_, dst, unit_));
}

std::string Algebra::format(const AlgElem& a) const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << base_.format(a[i]);
  os << "]";
  return os.str();
}

// -------------------------------------------------------------- UnitaryRing

UnitaryRingPtr make_unitary(Algebra algebra, Matrix sigma, AlgElem u, std::vector<AlgElem> lambda) {
  std::size_t n = algebra.rank();
  if (sigma.rows() != n || sigma.cols() != n) fail(ErrorKind::InvalidInput, "involution matrix has wrong size");
  if (u.size() != n) fail(ErrorKind::InvalidInput, "u has wrong length");
  for (const auto& l : lambda)
    if (l.size() != n) fail(ErrorKind::InvalidInput, "Lambda generator has wrong length");
  auto U = std::make_shared<UnitaryRing>();
  U->lambda = span_basis(algebra.base(), lambda, n);
  U->algebra = std::move(algebra);
  U->sigma = std::move(sigma);
  U->u = std::move(u);
  return U;
}

LambdaBounds lambda_min_max(const Algebra& A, const Matrix& sigma, const AlgElem& u) {
  const BaseRing& R = A.base();
  std::size_t n = A.rank();
  Matrix RuS = mat_mul(R, A.right_mult(u), sigma);
  std::vector<AlgElem> gens;
  for (std::size_t j = 0; j < n; ++j) gens.push_back(vec_sub(R, A.basis(j), RuS.column(j)));
  LambdaBounds out;
  out.min = span_basis(R, gens, n);
  out.max = kernel_basis(R, mat_add(R, Matrix::identity(R, n), RuS));
  return out;
}

std::vector<std::string> check_unitary(const UnitaryRing& U) {
  const Algebra& A = U.algebra;
  const BaseRing& R = A.base();
  std::size_t n = A.rank();
  std::vector<std::string> out = A.check();
  if (U.sigma.rows() != n || U.sigma.cols() != n) {
    out.push_back("involution matrix has wrong size");
    return out;
  }
  if (mat_mul(R, U.sigma, U.sigma) != Matrix::identity(R, n)) out.push_back("sigma^2 != id");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      AlgElem l = U.apply_sigma(A.mul(A.basis(i), A.basis(j)));
      AlgElem r = A.mul(U.apply_sigma(A.basis(j)), U.apply_sigma(A.basis(i)));
      if (l != r) {
        out.push_back("sigma is not anti-multiplicative on (" + std::to_string(i) + "," + std::to_string(j) + ")");
        i = n;
        break;
      }
    }
  for (std::size_t j = 0; j < n; ++j)
    if (A.mul(U.u, A.basis(j)) != A.mul(A.basis(j), U.u)) {
      out.push_back("u is not central");
      break;
    }
  if (A.mul(U.apply_sigma(U.u), U.u) != A.one()) out.push_back("sigma(u) u != 1");
  try {
    LambdaBounds b = lambda_min_max(A, U.sigma, U.u);
    for (const auto& m : b.min)
      if (!U.in_lambda(m)) {
        out.push_back("Lambda^min not contained in Lambda");
        break;
      }
    for (const auto& l : U.lambda)
      if (!A.is_zero(A.add(l, A.mul(U.apply_sigma(l), U.u)))) {
        out.push_back("Lambda not contained in Lambda^max");
        break;
      }
    bool stable = true;
    for (std::size_t i = 0; i < n && stable; ++i)
      for (const auto& l : U.lambda) {
        AlgElem x = A.mul(A.mul(U.apply_sigma(A.basis(i)), l), A.basis(i));
        if (!U.in_lambda(x)) {
          stable = false;
          break;
        }
      }
    if (!stable) out.push_back("a^sigma Lambda a not contained in Lambda");
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::PrecisionLoss) throw;
    out.push_back(std::string("Lambda containment undetermined: ") + e.what());
  }
  return out;
}

// ------------------------------------------------------------- constructors

namespace {

UnitaryRingPtr with_lambda_min(Algebra A, Matrix sigma, AlgElem u) {
  LambdaBounds b = lambda_min_max(A, sigma, u);
  return make_unitary(std::move(A), std::move(sigma), std::move(u), b.min);
}

Algebra matrix_units(const BaseRing& R, std::size_t n) {
  std::size_t N = n * n;
  std::vector<RingElem> sc(N * N * N, R.zero());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l) sc[((i * n + j) * N + (j * n + l)) * N + (i * n + l)] = R.one();
  AlgElem unit = zero_vec(R, N);
  for (std::size_t i = 0; i < n; ++i) unit[i * n + i] = R.one();
  return Algebra(R, N, std::move(sc), std::move(unit));
}

}  // namespace

UnitaryRingPtr scalar_ring(const BaseRing& base, const RingElem& u, bool lambda_max) {
  Algebra A(base, 1, {base.one()}, {base.one()});
  Matrix sigma = Matrix::identity(base, 1);
  LambdaBounds b = lambda_min_max(A, sigma, {u});
  return make_unitary(std::move(A), std::move(sigma), {u}, lambda_max ? b.max : b.min);
}

UnitaryRingPtr matrix_algebra(const BaseRing& base, std::size_t n, MatrixInvolution inv) {
  return matrix_algebra(base, n, inv, base.one());
}

UnitaryRingPtr matrix_algebra(const BaseRing& base, std::size_t n, MatrixInvolution inv, const RingElem& u_sign) {
  if (n == 0) fail(ErrorKind::InvalidInput, "matrix algebra of size 0");
  if (base.mul(u_sign, u_sign) != base.one()) fail(ErrorKind::InvalidInput, "matrix algebra form element must be +-1");
  Algebra A = matrix_units(base, n);
  std::size_t N = n * n;
  Matrix sigma = Matrix::zero(base, N, N);
  if (inv == MatrixInvolution::Transpose) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) sigma(j * n + i, i * n + j) = base.one();
  } else {
    if (n % 2) fail(ErrorKind::InvalidInput, "symplectic involution needs even size");
    // sigma(X) = J^{-1} X^t J with J = [[0, I], [-I, 0]]; J^{-1} = -J.
    std::size_t h = n / 2;
    Matrix J = Matrix::zero(base, n, n);
    for (std::size_t i = 0; i < h; ++i) {
      J(i, h + i) = base.one();
      J(h + i, i) = base.neg(base.one());
    }
    Matrix Jinv = mat_scale(base, base.neg(base.one()), J);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Matrix E = Matrix::zero(base, n, n);
        E(j, i) = base.one();
        Matrix S = mat_mul(base, mat_mul(base, Jinv, E), J);
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b) sigma(a * n + b, i * n + j) = S(a, b);
      }
  }
  AlgElem u = vec_scale(base, u_sign, A.one());
  return with_lambda_min(std::move(A), std::move(sigma), std::move(u));
}

UnitaryRingPtr quaternion_order(const BaseRing& R, const mpq_class& qu, const mpq_class& qv, const mpq_class& qpi) {
  if (qu == 0 || qv == 0 || qpi == 0) fail(ErrorKind::InvalidInput, "quaternion parameters must be nonzero");
  RingElem u = R.from_rational(qu), v = R.from_rational(qv), pi = R.from_rational(qpi);
  RingElem one = R.one(), zero = R.zero();
  // Standard basis 1, x, y, xy: table[i][j] = coordinates of e_i e_j.
  std::vector<std::vector<std::vector<RingElem>>> t(4, std::vector<std::vector<RingElem>>(4, Vec(4, zero)));
  for (std::size_t i = 0; i < 4; ++i) {
    t[0][i][i] = one;
    t[i][0][i] = one;
  }
  RingElem uv = R.mul(u, v);
  t[1][1][0] = u;
  t[1][2][3] = one;
  t[1][3][2] = u;
  t[2][1][3] = R.neg(one);
  t[2][2][0] = v;
  t[2][3][1] = R.neg(v);
  t[3][1][2] = R.neg(u);
  t[3][2][1] = v;
  t[3][3][0] = R.neg(uv);
  // Scaled basis 1, pi x, pi y, pi xy: c'_{ijk} = c_{ijk} s_i s_j / s_k.
  std::vector<RingElem> sc(64, zero);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t k = 0; k < 4; ++k) {
        RingElem c = t[i][j][k];
        int power = (i > 0) + (j > 0) - (k > 0);
        for (int p = 0; p < power; ++p) c = R.mul(c, pi);
        if (power < 0 && !R.is_zero(c)) fail(ErrorKind::InvalidInput, "quaternion order is not closed");
        sc[(i * 4 + j) * 4 + k] = c;
      }
  Algebra A(R, 4, std::move(sc), unit_vec(R, 4, 0));
  Matrix sigma = Matrix::identity(R, 4);
  sigma(3, 3) = R.neg(one);
  return with_lambda_min(std::move(A), std::move(sigma), unit_vec(R, 4, 0));
}

UnitaryRingPtr tiled_order(const BaseRing& R, std::size_t n,
                           const std::vector<std::pair<long, std::vector<std::vector<int>>>>& pattern,
                           TiledInvolution inv) {
  std::vector<std::vector<mpz_class>> g(n, std::vector<mpz_class>(n, 1));
  for (const auto& [p, m] : pattern) {
    if (R.kind() == RingKind::LocalizedIntegers &&
        std::find(R.primes().begin(), R.primes().end(), p) == R.primes().end())
      fail(ErrorKind::InvalidInput, "pattern prime " + std::to_string(p) + " not in the base ring");
    if (m.size() != n) fail(ErrorKind::InvalidInput, "pattern has wrong size");
    for (std::size_t i = 0; i < n; ++i) {
      if (m[i].size() != n) fail(ErrorKind::InvalidInput, "pattern has wrong size");
      if (m[i][i] != 0) fail(ErrorKind::InvalidInput, "pattern diagonal must be 0");
      for (std::size_t j = 0; j < n; ++j) {
        if (m[i][j] < 0) fail(ErrorKind::InvalidInput, "pattern exponents must be nonnegative");
        g[i][j] *= ipow(p, static_cast<unsigned long>(m[i][j]));
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          if (m[i][k] > m[i][j] + m[j][k]) fail(ErrorKind::InvalidInput, "pattern violates the triangle condition");
  }
  std::size_t N = n * n;
  std::vector<RingElem> sc(N * N * N, R.zero());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l)
        sc[((i * n + j) * N + (j * n + l)) * N + (i * n + l)] =
            R.from_rational(mpq_class(g[i][j] * g[j][l], g[i][l]));
  AlgElem unit = zero_vec(R, N);
  for (std::size_t i = 0; i < n; ++i) unit[i * n + i] = R.one();
  Algebra A(R, N, std::move(sc), std::move(unit));
  Matrix sigma = Matrix::zero(R, N, N);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t a = j, b = i;
      if (inv == TiledInvolution::ReversedTranspose) {
        a = n - 1 - j;
        b = n - 1 - i;
      }
      if (g[a][b] != g[i][j]) fail(ErrorKind::InvalidInput, "pattern is not stable under the involution");
      sigma(a * n + b, i * n + j) = R.one();
    }
  AlgElem u = A.one();
  return with_lambda_min(std::move(A), std::move(sigma), std::move(u));
}

UnitaryRingPtr exchange_ring(const Algebra& A) {
  const BaseRing& R = A.base();
  std::size_t n = A.rank(), N = 2 * n;
  std::vector<RingElem> sc(N * N * N, R.zero());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        sc[(i * N + j) * N + k] = A.c(i, j, k);
        // opposite multiplication on the second factor
        sc[((n + i) * N + (n + j)) * N + (n + k)] = A.c(j, i, k);
      }
  AlgElem unit = zero_vec(R, N);
  for (std::size_t i = 0; i < n; ++i) {
    unit[i] = A.one()[i];
    unit[n + i] = A.one()[i];
  }
  Algebra B(R, N, std::move(sc), unit);
  Matrix sigma = Matrix::zero(R, N, N);
  for (std::size_t i = 0; i < n; ++i) {
    sigma(n + i, i) = R.one();
    sigma(i, n + i) = R.one();
  }
  return with_lambda_min(std::move(B), std::move(sigma), std::move(unit));
}

UnitaryRingPtr quadratic_extension(const BaseRing& R, const RingElem& a, const RingElem& b) {
  std::vector<RingElem> sc(8, R.zero());
  auto at = [&](std::size_t i, std::size_t j, std::size_t k) -> RingElem& { return sc[(i * 2 + j) * 2 + k]; };
  at(0, 0, 0) = R.one();
  at(0, 1, 1) = R.one();
  at(1, 0, 1) = R.one();
  at(1, 1, 0) = b;
  at(1, 1, 1) = a;
  Algebra A(R, 2, std::move(sc), unit_vec(R, 2, 0));
  Matrix sigma = Matrix::zero(R, 2, 2);
  sigma(0, 0) = R.one();
  sigma(0, 1) = a;
  sigma(1, 1) = R.neg(R.one());
  return with_lambda_min(std::move(A), std::move(sigma), unit_vec(R, 2, 0));
}

UnitaryRingPtr direct_product(const UnitaryRing& x, const UnitaryRing& y) {
  const BaseRing& R = x.base();
  if (R != y.base()) fail(ErrorKind::InvalidInput, "direct product needs a common base ring");
  std::size_t n = x.rank(), m = y.rank(), N = n + m;
  std::vector<RingElem> sc(N * N * N, R.zero());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) sc[(i * N + j) * N + k] = x.algebra.c(i, j, k);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k) sc[((n + i) * N + n + j) * N + n + k] = y.algebra.c(i, j, k);
  auto concat = [&](const AlgElem& a, const AlgElem& b) {
    AlgElem r = a;
    r.insert(r.end(), b.begin(), b.end());
    return r;
  };
  Algebra A(R, N, std::move(sc), concat(x.algebra.one(), y.algebra.one()));
  Matrix sigma = Matrix::zero(R, N, N);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) sigma(i, j) = x.sigma(i, j);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) sigma(n + i, n + j) = y.sigma(i, j);
  std::vector<AlgElem> lambda;
  for (const auto& l : x.lambda) lambda.push_back(concat(l, zero_vec(R, m)));
  for (const auto& l : y.lambda) lambda.push_back(concat(zero_vec(R, n), l));
  return make_unitary(std::move(A), std::move(sigma), concat(x.u, y.u), std::move(lambda));
}

// --------------------------------------------------------- structure theory

Subspace::Subspace(const BaseRing& K, const std::vector<Vec>& gens, std::size_t ambient) : K_(K), ambient_(ambient) {
  if (!K.is_field()) fail(ErrorKind::Unsupported, "subspace coordinates need a field");
  basis_ = span_basis(K, gens, ambient);
  std::vector<bool> is_pivot(ambient, false);
  for (const auto& b : basis_) {
    std::size_t p = 0;
    while (K.is_zero(b[p])) ++p;
    pivots_.push_back(p);
    is_pivot[p] = true;
  }
  for (std::size_t j = 0; j < ambient; ++j)
    if (!is_pivot[j]) complement_.push_back(j);
}

Vec Subspace::coords(const Vec& v) const {
  Vec c;
  for (auto p : pivots_) c.push_back(v[p]);
  return c;
}

namespace {
Vec reduce_mod(const BaseRing& K, const std::vector<Vec>& basis, const std::vector<std::size_t>& pivots, Vec v) {
  for (std::size_t r = 0; r < basis.size(); ++r) {
    RingElem c = v[pivots[r]];
    if (K.is_zero(c)) continue;
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = K.sub(v[j], K.mul(c, basis[r][j]));
  }
  return v;
}
}  // namespace

bool Subspace::contains(const Vec& v) const { return vec_is_zero(K_, reduce_mod(K_, basis_, pivots_, v)); }

Vec Subspace::quotient_coords(const Vec& v) const {
  Vec w = reduce_mod(K_, basis_, pivots_, v);
  Vec c;
  for (auto j : complement_) c.push_back(w[j]);
  return c;
}

std::vector<AlgElem> center_basis(const Algebra& A) {
  const BaseRing& R = A.base();
  std::size_t n = A.rank();
  Matrix M = Matrix::zero(R, n * n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Matrix D = mat_sub(R, A.right_mult(A.basis(j)), A.left_mult(A.basis(j)));
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) M(j * n + r, c) = D(r, c);
  }
  return kernel_basis(R, M);
}

namespace {

RingElem trace(const BaseRing& R, const Matrix& M) {
  RingElem t = R.zero();
  for (std::size_t i = 0; i < M.rows(); ++i) t = R.add(t, M(i, i));
  return t;
}

// Radical over a prime field by iterated integral trace kernels.
std::vector<AlgElem> radical_prime_field(const Algebra& A) {
  const BaseRing& K = A.base();
  long p = K.prime();
  std::size_t n = A.rank();
  int l = 0;
  for (std::size_t q = static_cast<std::size_t>(p); q <= n; q *= static_cast<std::size_t>(p)) ++l;
  std::vector<AlgElem> I;
  for (std::size_t j = 0; j < n; ++j) I.push_back(A.basis(j));
  for (int i = 0; i <= l && !I.empty(); ++i) {
    mpz_class pi = ipow(p, static_cast<unsigned long>(i));
    mpz_class modulus = pi * p;
    auto g = [&](const AlgElem& a) {
      Matrix L = A.left_mult(a);
      std::vector<mpz_class> M(n * n), P(n * n, 0);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) M[r * n + c] = L(r, c).value().get_num();
      for (std::size_t r = 0; r < n; ++r) P[r * n + r] = 1;
      mpz_class k = pi;
      std::vector<mpz_class> B = M;
      auto mulmod = [&](const std::vector<mpz_class>& X, const std::vector<mpz_class>& Y) {
        std::vector<mpz_class> Z(n * n, 0);
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t t = 0; t < n; ++t) {
            if (X[r * n + t] == 0) continue;
            for (std::size_t c = 0; c < n; ++c) Z[r * n + c] += X[r * n + t] * Y[t * n + c];
          }
        for (auto& z : Z) mpz_mod(z.get_mpz_t(), z.get_mpz_t(), modulus.get_mpz_t());
        return Z;
      };
      while (k > 0) {
        if (mpz_odd_p(k.get_mpz_t())) P = mulmod(P, B);
        k >>= 1;
        if (k > 0) B = mulmod(B, B);
      }
      mpz_class tr = 0;
      for (std::size_t r = 0; r < n; ++r) tr += P[r * n + r];
      mpz_mod(tr.get_mpz_t(), tr.get_mpz_t(), modulus.get_mpz_t());
      if (!mpz_divisible_p(tr.get_mpz_t(), pi.get_mpz_t()))
        fail(ErrorKind::InvalidInput, "trace power not divisible as expected; not an algebra over F_p?");
      return K.from_integer(mpz_class(tr / pi));
    };
    Matrix G = Matrix::zero(K, n, I.size());
    for (std::size_t k = 0; k < I.size(); ++k)
      for (std::size_t j = 0; j < n; ++j) G(j, k) = g(A.mul(I[k], A.basis(j)));
    std::vector<AlgElem> next;
    for (const auto& t : kernel_basis(K, G)) {
      AlgElem x = A.zero();
      for (std::size_t k = 0; k < I.size(); ++k) x = A.add(x, A.scale(t[k], I[k]));
      next.push_back(x);
    }
    I = span_basis(K, next, n);
  }
  return I;
}

Vec restrict_coords(const BaseRing& K, const AlgElem& x) {
  BaseRing Fp = BaseRing::finite_field(K.prime());
  std::size_t e = static_cast<std::size_t>(K.degree());
  Vec v(x.size() * e, Fp.zero());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t k = 0; k < e; ++k) v[i * e + k] = Fp.from_int(static_cast<long>(x[i].poly()[k]));
  return v;
}

AlgElem theta_power(const Algebra& A, std::size_t i, std::size_t k) {
  const BaseRing& K = A.base();
  std::vector<std::int64_t> c(static_cast<std::size_t>(K.degree()), 0);
  c[k] = 1;
  return A.scale(K.from_poly(c), A.basis(i));
}

Algebra restriction_algebra(const Algebra& A) {
  const BaseRing& K = A.base();
  BaseRing Fp = BaseRing::finite_field(K.prime());
  std::size_t n = A.rank(), e = static_cast<std::size_t>(K.degree()), N = n * e;
  std::vector<AlgElem> basis;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < e; ++k) basis.push_back(theta_power(A, i, k));
  std::vector<RingElem> sc(N * N * N);
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b) {
      Vec prod = restrict_coords(K, A.mul(basis[a], basis[b]));
      for (std::size_t c = 0; c < N; ++c) sc[(a * N + b) * N + c] = prod[c];
    }
  return Algebra(Fp, N, std::move(sc), restrict_coords(K, A.one()));
}

std::vector<AlgElem> radical_extension_field(const Algebra& A) {
  const BaseRing& K = A.base();
  std::size_t n = A.rank(), e = static_cast<std::size_t>(K.degree());
  auto from_fp = [&](const Vec& v) {
    AlgElem x(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::int64_t> c(e);
      for (std::size_t k = 0; k < e; ++k) c[k] = v[i * e + k].value().get_num().get_si();
      x[i] = K.from_poly(c);
    }
    return x;
  };
  std::vector<AlgElem> out;
  for (const auto& v : radical_prime_field(restriction_algebra(A))) out.push_back(from_fp(v));
  return span_basis(K, out, n);
}

}  // namespace

std::vector<AlgElem> jacobson_radical(const Algebra& A) {
  const BaseRing& K = A.base();
  std::size_t n = A.rank();
  switch (K.kind()) {
    case RingKind::Rationals: {
      Matrix T = Matrix::zero(K, n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) T(i, j) = trace(K, A.left_mult(A.mul(A.basis(i), A.basis(j))));
      return kernel_basis(K, T);
    }
    case RingKind::FiniteField:
      return K.degree() == 1 ? radical_prime_field(A) : radical_extension_field(A);
    case RingKind::TruncatedLocal: {
      BaseRing Fp = BaseRing::finite_field(K.prime());
      std::vector<AlgElem> gens;
      for (const auto& v : radical_prime_field(A.map(Fp))) {
        AlgElem lift(n);
        for (std::size_t i = 0; i < n; ++i) lift[i] = K.from_integer(mpz_class(v[i].value().get_num()));
        gens.push_back(lift);
      }
      for (std::size_t j = 0; j < n; ++j) gens.push_back(A.scale(K.from_int(K.prime()), A.basis(j)));
      return span_basis(K, gens, n);
    }
    default: fail(ErrorKind::Unsupported, "Jacobson radical over " + K.name());
  }
}

QuotientRing quotient_by_ideal(const UnitaryRing& U, const std::vector<AlgElem>& ideal) {
  const Algebra& A = U.algebra;
  const BaseRing& K = A.base();
  std::size_t n = A.rank();
  Subspace J(K, ideal, n);
  std::size_t q = J.complement().size();
  QuotientRing out;
  out.projection = Matrix::zero(K, q, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vec c = J.quotient_coords(A.basis(j));
    for (std::size_t t = 0; t < q; ++t) out.projection(t, j) = c[t];
  }
  out.lift = Matrix::zero(K, n, q);
  for (std::size_t t = 0; t < q; ++t) out.lift(J.complement()[t], t) = K.one();
  auto proj = [&](const AlgElem& a) { return J.quotient_coords(a); };
  std::vector<RingElem> sc(q * q * q);
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = 0; b < q; ++b) {
      Vec prod = proj(A.mul(A.basis(J.complement()[a]), A.basis(J.complement()[b])));
      for (std::size_t c = 0; c < q; ++c) sc[(a * q + b) * q + c] = prod[c];
    }
  Algebra Q(K, q, std::move(sc), proj(A.one()));
  Matrix sigma = Matrix::zero(K, q, q);
  for (std::size_t t = 0; t < q; ++t) {
    Vec s = proj(U.apply_sigma(A.basis(J.complement()[t])));
    for (std::size_t r = 0; r < q; ++r) sigma(r, t) = s[r];
  }
  std::vector<AlgElem> lambda;
  for (const auto& l : U.lambda) lambda.push_back(proj(l));
  out.ring = make_unitary(std::move(Q), std::move(sigma), proj(U.u), std::move(lambda));
  return out;
}

UnitaryRingPtr scalar_extend(const UnitaryRing& U, const BaseRing& dst) {
  const BaseRing& src = U.base();
  std::vector<AlgElem> lambda;
  for (const auto& l : U.lambda) lambda.push_back(vec_map(src, dst, l));
  return make_unitary(U.algebra.map(dst), mat_map(src, dst, U.sigma), vec_map(src, dst, U.u), std::move(lambda));
}

QuotientRing semisimple_quotient(const UnitaryRing& U) {
  if (!U.base().is_field()) fail(ErrorKind::Unsupported, "semisimple quotient needs a field base");
  return quotient_by_ideal(U, jacobson_radical(U.algebra));
}

ReducedRing reduce_unitary(const UnitaryRing& U, long p) {
  ReducedRing out;
  out.raw = scalar_extend(U, BaseRing::finite_field(p));
  out.bar = semisimple_quotient(*out.raw);
  return out;
}

// ------------------------------------------------------ factorization

const char* classification_name(Classification c) {
  switch (c) {
    case Classification::SplitOrthogonal: return "split-orthogonal";
    case Classification::OrthogonalUndecidedSplit: return "orthogonal-undecided-split";
    case Classification::OrthogonalNonsplit: return "orthogonal-nonsplit";
    case Classification::NotOrthogonal: return "not-orthogonal";
    case Classification::SecondKind: return "second-kind";
  }
  return "unknown";
}

AlgElem ComponentReport::project(const AlgElem& a) const { return mat_apply(ring->base(), projection, a); }
AlgElem ComponentReport::include(const AlgElem& c) const { return mat_apply(ring->base(), inclusion, c); }

namespace {

std::size_t isqrt(std::size_t v) {
  std::size_t r = 0;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

std::size_t span_dim(const BaseRing& K, const std::vector<AlgElem>& v, std::size_t n) {
  return span_basis(K, v, n).size();
}

// Primitive idempotents of the center over a finite field F_q: Berlekamp
// subalgebra {z : z^q = z} and eigen-idempotents e - (z - r e)^{q-1}.
std::vector<AlgElem> central_idempotents_finite(const Algebra& A, const std::vector<AlgElem>& C) {
  const BaseRing& K = A.base();
  std::size_t n = A.rank();
  mpz_class q = K.cardinality();
  Matrix M = Matrix::zero(K, n, C.size());
  for (std::size_t k = 0; k < C.size(); ++k) {
    AlgElem d = A.sub(A.pow(C[k], q), C[k]);
    for (std::size_t i = 0; i < n; ++i) M(i, k) = d[i];
  }
  std::vector<AlgElem> B;
  for (const auto& t : kernel_basis(K, M)) {
    AlgElem z = A.zero();
    for (std::size_t k = 0; k < C.size(); ++k) z = A.add(z, A.scale(t[k], C[k]));
    B.push_back(z);
  }
  std::vector<AlgElem> blocks{A.one()};
  for (const auto& b : B) {
    std::vector<AlgElem> next;
    for (const auto& e : blocks) {
      AlgElem z = A.mul(b, e);
      for (std::uint64_t r = 0; r < K.cardinality(); ++r) {
        AlgElem w = A.sub(z, A.scale(K.element_at(r), e));
        AlgElem eps = A.sub(e, A.mul(A.pow(w, q - 1), e));
        if (!A.is_zero(eps)) next.push_back(eps);
      }
    }
    blocks = std::move(next);
  }
  return blocks;
}

using QPoly = std::vector<mpq_class>;  // low degree first

// Minimal polynomial of z in the algebra eA (unit e), monic.
QPoly min_poly(const Algebra& A, const AlgElem& z, const AlgElem& e) {
  const BaseRing& K = A.base();
  std::vector<AlgElem> powers{e};
  while (true) {
    AlgElem next = A.mul(powers.back(), z);
    SolveResult s = solve_linear(K, Matrix::from_columns(powers, A.rank()), next);
    if (s.consistent) {
      QPoly m;
      for (const auto& c : s.particular) m.push_back(-c.value());
      m.push_back(1);
      return m;
    }
    powers.push_back(next);
  }
}

std::vector<mpz_class> divisors(mpz_class n) {
  if (n < 0) n = -n;
  if (n > mpz_class("1000000000000"))
    fail(ErrorKind::CenterFactorizationFailed, "coefficient too large for rational-root search");
  std::vector<mpz_class> out;
  for (mpz_class d = 1; d * d <= n; ++d)
    if (n % d == 0) {
      out.push_back(d);
      if (d * d != n) out.push_back(n / d);
    }
  return out;
}

mpq_class eval(const QPoly& f, const mpq_class& x) {
  mpq_class acc = 0;
  for (std::size_t i = f.size(); i-- > 0;) acc = acc * x + f[i];
  return acc;
}

std::vector<mpq_class> rational_roots(QPoly f) {
  std::vector<mpq_class> roots;
  while (f.size() > 1 && f[0] == 0) {
    roots.push_back(0);
    f.erase(f.begin());
  }
  if (f.size() <= 1) return roots;
  mpz_class l = 1;
  for (const auto& c : f) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  std::vector<mpz_class> ints;
  for (const auto& c : f) ints.push_back(mpz_class(c * l));
  for (const auto& a : divisors(ints.front()))
    for (const auto& b : divisors(ints.back()))
      for (int s : {1, -1}) {
        mpq_class r(s * a, b);
        r.canonicalize();
        if (eval(f, r) == 0 && std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
      }
  return roots;
}

QPoly divide_linear(const QPoly& f, const mpq_class& r) {
  std::size_t d = f.size() - 1;
  QPoly g(d);
  mpq_class carry = 0;
  for (std::size_t i = d; i-- > 0;) {
    carry = f[i + 1] + carry * r;
    g[i] = carry;
  }
  return g;
}

AlgElem eval_at(const Algebra& A, const QPoly& g, const AlgElem& z, const AlgElem& e) {
  const BaseRing& K = A.base();
  AlgElem acc = A.zero();
  for (std::size_t i = g.size(); i-- > 0;) acc = A.add(A.mul(acc, z), A.scale(K.from_rational(g[i]), e));
  return acc;
}

std::vector<AlgElem> central_idempotents_rational(const Algebra& A, const std::vector<AlgElem>& C) {
  const BaseRing& K = A.base();
  std::size_t n = A.rank();
  struct Block {
    AlgElem e;
    bool primitive;
  };
  auto block_dim = [&](const AlgElem& e) {
    std::vector<AlgElem> v;
    for (const auto& c : C) v.push_back(A.mul(c, e));
    return span_dim(K, v, n);
  };
  std::vector<AlgElem> candidates = C;
  for (std::size_t k = 1; k < C.size(); ++k) {
    AlgElem z = A.zero();
    for (std::size_t i = 0; i <= k; ++i) z = A.add(z, A.scale(K.from_int(static_cast<long>(i + 1)), C[i]));
    candidates.push_back(z);
  }
  std::vector<Block> blocks{{A.one(), block_dim(A.one()) == 1}};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& c : candidates) {
      std::vector<Block> next;
      for (auto& blk : blocks) {
        if (blk.primitive) {
          next.push_back(blk);
          continue;
        }
        AlgElem z = A.mul(c, blk.e);
        QPoly m = min_poly(A, z, blk.e);
        std::size_t deg = m.size() - 1;
        std::vector<mpq_class> roots = rational_roots(m);
        if (deg == 1) {
          next.push_back(blk);
          continue;
        }
        if (roots.empty()) {
          if (deg <= 3 && deg == block_dim(blk.e)) blk.primitive = true;
          next.push_back(blk);
          continue;
        }
        AlgElem rest = blk.e;
        QPoly h = m;
        for (const auto& r : roots) {
          QPoly g = divide_linear(m, r);
          AlgElem eps = A.scale(K.from_rational(1 / eval(g, r)), eval_at(A, g, z, blk.e));
          next.push_back({eps, block_dim(eps) == 1});
          rest = A.sub(rest, eps);
          h = divide_linear(h, r);
        }
        if (!A.is_zero(rest)) {
          std::size_t d = block_dim(rest);
          std::size_t hdeg = h.size() - 1;
          next.push_back({rest, d == 1 || (hdeg <= 3 && hdeg == d)});
        }
        changed = true;
      }
      blocks = std::move(next);
    }
  }
  std::vector<AlgElem> out;
  for (const auto& b : blocks) {
    if (!b.primitive)
      fail(ErrorKind::CenterFactorizationFailed,
           "could not certify that a central block of dimension " + std::to_string(block_dim(b.e)) + " is a field");
    out.push_back(b.e);
  }
  return out;
}

ComponentReport build_component(const UnitaryRing& U, const AlgElem& e, std::size_t index) {
  const Algebra& A = U.algebra;
  const BaseRing& K = A.base();
  std::size_t n = A.rank();
  std::vector<AlgElem> gens;
  for (std::size_t j = 0; j < n; ++j) gens.push_back(A.mul(e, A.basis(j)));
  Subspace S(K, gens, n);
  std::size_t d = S.dim();
  ComponentReport c;
  c.index = index;
  c.idempotent = e;
  c.dimension = d;
  c.inclusion = Matrix::from_columns(S.basis(), n);
  c.projection = Matrix::zero(K, d, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vec co = S.coords(gens[j]);
    for (std::size_t k = 0; k < d; ++k) c.projection(k, j) = co[k];
  }
  auto coords = [&](const AlgElem& a) { return S.coords(A.mul(e, a)); };
  std::vector<RingElem> sc(d * d * d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      Vec prod = coords(A.mul(S.basis()[a], S.basis()[b]));
      for (std::size_t k = 0; k < d; ++k) sc[(a * d + b) * d + k] = prod[k];
    }
  Algebra Ai(K, d, std::move(sc), coords(A.one()));
  Matrix sigma = Matrix::zero(K, d, d);
  for (std::size_t k = 0; k < d; ++k) {
    Vec s = coords(U.apply_sigma(S.basis()[k]));
    for (std::size_t r = 0; r < d; ++r) sigma(r, k) = s[r];
  }
  std::vector<AlgElem> lambda;
  for (const auto& l : U.lambda) lambda.push_back(coords(l));
  c.ring = make_unitary(std::move(Ai), std::move(sigma), coords(U.u), std::move(lambda));
  const UnitaryRing& Ui = *c.ring;
  c.center = center_basis(Ui.algebra);
  c.center_dimension = c.center.size();
  std::size_t ratio = d / c.center_dimension;
  c.deg = isqrt(ratio);
  if (c.deg * c.deg != ratio || ratio * c.center_dimension != d)
    fail(ErrorKind::InvalidInput, "component is not simple over its center");
  c.lambda_dimension = Ui.lambda.size();
  c.involution_kind = InvolutionKind::First;
  for (const auto& z : c.center)
    if (Ui.apply_sigma(z) != z) c.involution_kind = InvolutionKind::Second;
  c.lambda_is_center_space = true;
  for (const auto& z : c.center)
    for (const auto& l : Ui.lambda)
      if (!Ui.in_lambda(Ui.algebra.mul(z, l))) c.lambda_is_center_space = false;
  bool f2_base = K.kind() == RingKind::FiniteField && K.prime() == 2 && K.degree() == 1;
  c.division_part_is_F2 =
      f2_base && (c.center_dimension == 1 ||
                  (c.involution_kind == InvolutionKind::Second && c.center_dimension == 2));
  bool finite = K.kind() == RingKind::FiniteField;
  if (c.involution_kind == InvolutionKind::Second) {
    c.classification = Classification::SecondKind;
  } else if (c.lambda_is_center_space &&
             c.lambda_dimension == c.center_dimension * c.deg * (c.deg - 1) / 2) {
    c.classification = (finite || c.deg == 1) ? Classification::SplitOrthogonal
                                              : Classification::OrthogonalUndecidedSplit;
  } else {
    c.classification = Classification::NotOrthogonal;
  }
  if (finite || c.deg == 1) c.n = c.deg;
  return c;
}

}  // namespace

SimpleFactorization semisimple_factorization(const UnitaryRing& U) {
  const Algebra& A = U.algebra;
  const BaseRing& K = A.base();
  if (!K.is_field()) fail(ErrorKind::Unsupported, "semisimple factorization needs a field base");
  if (!jacobson_radical(A).empty()) fail(ErrorKind::InvalidInput, "algebra has a nonzero radical");
  std::vector<AlgElem> C = center_basis(A);
  std::vector<AlgElem> prim = K.kind() == RingKind::FiniteField ? central_idempotents_finite(A, C)
                                                                 : central_idempotents_rational(A, C);
  std::sort(prim.begin(), prim.end());
  std::vector<bool> used(prim.size(), false);
  SimpleFactorization out;
  for (std::size_t a = 0; a < prim.size(); ++a) {
    if (used[a]) continue;
    used[a] = true;
    AlgElem s = U.apply_sigma(prim[a]);
    AlgElem e = prim[a];
    if (s != prim[a]) {
      auto it = std::find(prim.begin(), prim.end(), s);
      if (it == prim.end()) fail(ErrorKind::InvalidInput, "involution does not permute central idempotents");
      used[static_cast<std::size_t>(it - prim.begin())] = true;
      e = A.add(e, s);
    }
    out.idempotents.push_back(e);
  }
  for (std::size_t i = 0; i < out.idempotents.size(); ++i) {
    out.components.push_back(build_component(U, out.idempotents[i], i));
    const auto& c = out.components.back();
    if (c.classification == Classification::SplitOrthogonal) {
      out.split_orthogonal.push_back(i);
      out.xi.push_back(static_cast<int>(*c.n % 2));
    }
  }
  return out;
}

QuaternionPresentation quaternion_presentation(const Algebra& A) {
  const BaseRing& K = A.base();
  if (K.kind() != RingKind::Rationals || A.rank() != 4)
    fail(ErrorKind::Unsupported, "quaternion recognition needs a 4-dimensional algebra over Q");
  std::size_t n = 4;
  std::size_t unit_pos = 0;
  while (K.is_zero(A.one()[unit_pos])) ++unit_pos;
  auto scalar_of = [&](const AlgElem& x) -> std::optional<mpq_class> {
    mpq_class s = x[unit_pos].value() / A.one()[unit_pos].value();
    if (x != A.scalar(K.from_rational(s))) return std::nullopt;
    return s;
  };
  Matrix T = Matrix::zero(K, 1, n);
  for (std::size_t j = 0; j < n; ++j) T(0, j) = trace(K, A.left_mult(A.basis(j)));
  std::vector<AlgElem> V = kernel_basis(K, T);
  std::vector<AlgElem> cands = V;
  for (std::size_t i = 0; i < V.size(); ++i)
    for (std::size_t j = i + 1; j < V.size(); ++j) cands.push_back(A.add(V[i], V[j]));
  QuaternionPresentation out;
  for (const auto& x : cands) {
    AlgElem x2 = A.mul(x, x);
    if (A.is_zero(x2)) {
      out.split_by_nilpotent = true;
      return out;
    }
    auto a = scalar_of(x2);
    if (!a) fail(ErrorKind::InvalidInput, "trace-zero element does not square to a scalar");
    Matrix M = Matrix::zero(K, n, V.size());
    for (std::size_t k = 0; k < V.size(); ++k) {
      AlgElem anti = A.add(A.mul(x, V[k]), A.mul(V[k], x));
      for (std::size_t i = 0; i < n; ++i) M(i, k) = anti[i];
    }
    for (const auto& t : kernel_basis(K, M)) {
      AlgElem y = A.zero();
      for (std::size_t k = 0; k < V.size(); ++k) y = A.add(y, A.scale(t[k], V[k]));
      AlgElem y2 = A.mul(y, y);
      if (A.is_zero(y2)) {
        out.split_by_nilpotent = true;
        return out;
      }
      auto b = scalar_of(y2);
      if (!b) fail(ErrorKind::InvalidInput, "anticommuting element does not square to a scalar");
      out.a = *a;
      out.b = *b;
      return out;
    }
  }
  fail(ErrorKind::InvalidInput, "no quaternion presentation found");
}

Classification classify_component(const ComponentReport& c, SplitHint hint, std::optional<Place> place) {
  switch (c.classification) {
    case Classification::SecondKind:
    case Classification::NotOrthogonal:
    case Classification::SplitOrthogonal: return c.classification;
    default: break;
  }
  if (hint == SplitHint::Split) return Classification::SplitOrthogonal;
  if (hint == SplitHint::Division) return Classification::OrthogonalNonsplit;
  const BaseRing& K = c.ring->base();
  if (K.kind() == RingKind::Rationals && c.deg == 2 && c.center_dimension == 1) {
    QuaternionPresentation qp = quaternion_presentation(c.ring->algebra);
    if (qp.split_by_nilpotent) return Classification::SplitOrthogonal;
    bool split = place ? quaternion_splits_at(qp.a, qp.b, *place) : !quaternion_division_over_Q(qp.a, qp.b);
    return split ? Classification::SplitOrthogonal : Classification::OrthogonalNonsplit;
  }
  fail(ErrorKind::SplitnessUndecidable,
       "no splitness decision for a degree " + std::to_string(c.deg) + " component over " + K.name());
}

UnitaryRingPtr restrict_scalars(const UnitaryRing& U) {
  const Algebra& A = U.algebra;
  const BaseRing& K = A.base();
  if (K.kind() != RingKind::FiniteField) fail(ErrorKind::Unsupported, "restriction of scalars needs a finite field");
  std::size_t n = A.rank(), e = static_cast<std::size_t>(K.degree()), N = n * e;
  Algebra Ap = restriction_algebra(A);
  const BaseRing& Fp = Ap.base();
  Matrix sigma = Matrix::zero(Fp, N, N);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < e; ++k) {
      Vec col = restrict_coords(K, U.apply_sigma(theta_power(A, i, k)));
      for (std::size_t r = 0; r < N; ++r) sigma(r, i * e + k) = col[r];
    }
  std::vector<AlgElem> lambda;
  for (const auto& l : U.lambda)
    for (std::size_t k = 0; k < e; ++k) {
      std::vector<std::int64_t> c(e, 0);
      c[k] = 1;
      lambda.push_back(restrict_coords(K, A.scale(K.from_poly(c), l)));
    }
  return make_unitary(std::move(Ap), std::move(sigma), restrict_coords(K, U.u), std::move(lambda));
}

}  // namespace unitary
