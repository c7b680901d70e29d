#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unitary/error.hpp"

namespace unitary {

enum class RingKind { FiniteField, Rationals, LocalizedIntegers, TruncatedLocal, Product };

// Canonical element representation.  Prime fields, rationals, localized integers
// and truncated local rings use `value` (a reduced residue or reduced fraction);
// F_{p^e} with e > 1 uses `poly` (e coefficients in [0, p)); products use `parts`.
class RingElem {
 public:
  RingElem() = default;
  explicit RingElem(mpq_class v) : value_(std::move(v)) {}

  const mpq_class& value() const { return value_; }
  const std::vector<std::int64_t>& poly() const { return poly_; }
  const std::vector<RingElem>& parts() const { return parts_; }

  bool operator==(const RingElem& o) const {
    return value_ == o.value_ && poly_ == o.poly_ && parts_ == o.parts_;
  }
  bool operator!=(const RingElem& o) const { return !(*this == o); }
  bool operator<(const RingElem& o) const;

 private:
  friend class BaseRing;
  mpq_class value_;
  std::vector<std::int64_t> poly_;
  std::vector<RingElem> parts_;
};

using Vec = std::vector<RingElem>;

class BaseRing {
 public:
  BaseRing() = default;

  static BaseRing finite_field(long p, int e = 1);
  static BaseRing rationals();
  static BaseRing localized(std::vector<long> primes);
  static BaseRing truncated(long p, int precision);
  static BaseRing product(std::vector<BaseRing> factors);

  RingKind kind() const { return kind_; }
  long prime() const { return p_; }
  int degree() const { return e_; }
  int precision() const { return n_; }
  const std::vector<long>& primes() const { return primes_; }
  const std::vector<BaseRing>& factors() const { return factors_; }
  // Defining polynomial of F_{p^e} (monic, low degree first, length e + 1).
  const std::vector<std::int64_t>& modulus() const { return modulus_; }
  // p^N for truncated rings, p for prime fields.
  const mpz_class& residue_modulus() const { return pn_; }

  bool is_field() const;
  bool is_finite() const;
  // Characteristic of a finite field; 0 for rationals and localized integers.
  long characteristic() const;
  std::string name() const;

  bool operator==(const BaseRing& o) const;
  bool operator!=(const BaseRing& o) const { return !(*this == o); }

  RingElem zero() const;
  RingElem one() const;
  RingElem from_int(long v) const;
  RingElem from_integer(const mpz_class& v) const;
  // Throws NotInDomain when the fraction has no image in this ring.
  RingElem from_rational(const mpq_class& v) const;
  // F_{p^e} element from coefficient vector (low degree first).
  RingElem from_poly(std::vector<std::int64_t> coeffs) const;
  RingElem from_parts(std::vector<RingElem> parts) const;

  RingElem add(const RingElem& a, const RingElem& b) const;
  RingElem sub(const RingElem& a, const RingElem& b) const;
  RingElem neg(const RingElem& a) const;
  RingElem mul(const RingElem& a, const RingElem& b) const;
  RingElem pow(const RingElem& a, mpz_class k) const;
  bool is_zero(const RingElem& a) const;
  bool is_one(const RingElem& a) const { return a == one(); }
  bool is_unit(const RingElem& a) const;
  // Throws NotInvertible unless is_unit(a).
  RingElem inverse(const RingElem& a) const;
  bool contains(const RingElem& a) const;

  // Finite rings only: cardinality and a bijection with [0, cardinality).
  std::uint64_t cardinality() const;
  RingElem element_at(std::uint64_t index) const;
  std::uint64_t index_of(const RingElem& a) const;

  std::string format(const RingElem& a) const;

 private:
  RingElem reduce_integer(mpz_class v) const;
  RingElem poly_mul(const RingElem& a, const RingElem& b) const;

  RingKind kind_ = RingKind::Rationals;
  long p_ = 0;
  int e_ = 1;
  int n_ = 0;
  mpz_class pn_;
  std::vector<long> primes_;
  std::vector<BaseRing> factors_;
  std::vector<std::int64_t> modulus_;
};

mpz_class ipow(long p, unsigned long k);
// p-adic valuation of a nonzero integer.
int valuation(mpz_class v, long p);
int valuation(const mpq_class& v, long p);

// Canonical homomorphism between supported pairs of base rings (identity,
// localized/rational -> residue fields, truncated rings, coarser localizations;
// truncated -> lower precision or residue field; prime field -> extension
// field; anything -> product by the diagonal).
RingElem ring_hom(const BaseRing& src, const BaseRing& dst, const RingElem& x);
bool ring_hom_supported(const BaseRing& src, const BaseRing& dst);

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const RingElem& fill)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix zero(const BaseRing& R, std::size_t rows, std::size_t cols) {
    return Matrix(rows, cols, R.zero());
  }
  static Matrix identity(const BaseRing& R, std::size_t n);
  static Matrix from_rows(const std::vector<Vec>& rows);
  static Matrix from_columns(const std::vector<Vec>& cols, std::size_t height);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  RingElem& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const RingElem& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  Vec row(std::size_t i) const;
  Vec column(std::size_t j) const;

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }
  bool operator!=(const Matrix& o) const { return !(*this == o); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<RingElem> data_;
};

Vec zero_vec(const BaseRing& R, std::size_t n);
Vec unit_vec(const BaseRing& R, std::size_t n, std::size_t i);
Vec vec_add(const BaseRing& R, const Vec& a, const Vec& b);
Vec vec_sub(const BaseRing& R, const Vec& a, const Vec& b);
Vec vec_neg(const BaseRing& R, const Vec& a);
Vec vec_scale(const BaseRing& R, const RingElem& c, const Vec& a);
bool vec_is_zero(const BaseRing& R, const Vec& a);
Vec vec_map(const BaseRing& src, const BaseRing& dst, const Vec& a);

Matrix mat_mul(const BaseRing& R, const Matrix& a, const Matrix& b);
Matrix mat_add(const BaseRing& R, const Matrix& a, const Matrix& b);
Matrix mat_sub(const BaseRing& R, const Matrix& a, const Matrix& b);
Matrix mat_scale(const BaseRing& R, const RingElem& c, const Matrix& a);
Matrix transpose(const Matrix& a);
Vec mat_apply(const BaseRing& R, const Matrix& a, const Vec& v);
Matrix mat_map(const BaseRing& src, const BaseRing& dst, const Matrix& a);

struct SolveResult {
  bool consistent = false;
  Vec particular;
  std::vector<Vec> kernel;
};

// Exact solution of A x = b.  Over fields this is plain row reduction; over
// truncated local rings pivots must be units and a column carrying only
// non-unit nonzero entries raises PrecisionLoss.  Localized integers and
// rationals are solved over the fraction field.
SolveResult solve_linear(const BaseRing& R, const Matrix& A, const Vec& b);

// R-basis of {x : A x = 0}.  Over localized integers the returned basis spans
// the saturated kernel (kernel over Q intersected with R^n).
std::vector<Vec> kernel_basis(const BaseRing& R, const Matrix& A);

// Rank over a field (rationals and localized integers use Q).
std::size_t rank(const BaseRing& R, const Matrix& A);

// Linearly independent generators of the R-span of the given vectors.  Over
// localized integers this is a Hermite-style basis of the generated module.
std::vector<Vec> span_basis(const BaseRing& R, const std::vector<Vec>& gens, std::size_t dim);

// Coordinates of v in the R-span of independent `basis`, if v lies in it.
std::optional<Vec> span_coordinates(const BaseRing& R, const std::vector<Vec>& basis, const Vec& v);
bool in_span(const BaseRing& R, const std::vector<Vec>& basis, const Vec& v);

RingElem determinant(const BaseRing& R, const Matrix& A);
std::optional<Matrix> inverse(const BaseRing& R, const Matrix& A);

}  // namespace unitary
