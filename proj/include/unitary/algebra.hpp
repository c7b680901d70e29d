#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "unitary/arithmetic.hpp"
#include "unitary/ring_core.hpp"

namespace unitary {

using AlgElem = Vec;

// Finite-rank algebra over a base ring, given by structure constants
// e_i e_j = sum_k c_{ijk} e_k.
class Algebra {
 public:
  Algebra() = default;
  Algebra(BaseRing base, std::size_t rank, std::vector<RingElem> structure, AlgElem unit);

  const BaseRing& base() const { return base_; }
  std::size_t rank() const { return rank_; }
  const RingElem& c(std::size_t i, std::size_t j, std::size_t k) const {
    return structure_[(i * rank_ + j) * rank_ + k];
  }
  const std::vector<RingElem>& structure() const { return structure_; }

  AlgElem zero() const { return zero_vec(base_, rank_); }
  const AlgElem& one() const { return unit_; }
  AlgElem basis(std::size_t i) const { return unit_vec(base_, rank_, i); }
  AlgElem scalar(const RingElem& r) const { return vec_scale(base_, r, unit_); }

  AlgElem add(const AlgElem& a, const AlgElem& b) const { return vec_add(base_, a, b); }
  AlgElem sub(const AlgElem& a, const AlgElem& b) const { return vec_sub(base_, a, b); }
  AlgElem neg(const AlgElem& a) const { return vec_neg(base_, a); }
  AlgElem scale(const RingElem& r, const AlgElem& a) const { return vec_scale(base_, r, a); }
  AlgElem mul(const AlgElem& a, const AlgElem& b) const;
  AlgElem pow(const AlgElem& a, mpz_class k) const;
  bool is_zero(const AlgElem& a) const { return vec_is_zero(base_, a); }

  // Column j is a * e_j (resp. e_j * a).
  Matrix left_mult(const AlgElem& a) const;
  Matrix right_mult(const AlgElem& a) const;
  bool is_unit(const AlgElem& a) const;
  std::optional<AlgElem> inverse(const AlgElem& a) const;
  bool is_commutative() const;

  // Violated axioms (associativity on basis triples, two-sided unit).
  std::vector<std::string> check() const;
  // Entrywise image of the structure constants under a base change.
  Algebra map(const BaseRing& dst) const;
  std::string format(const AlgElem& a) const;

 private:
  BaseRing base_;
  std::size_t rank_ = 0;
  std::vector<RingElem> structure_;
  AlgElem unit_;
  // Nonzero structure constants per (i, j).
  std::vector<std::vector<std::pair<std::size_t, RingElem>>> sparse_;
};

// Algebra with involution sigma (column j holds the coordinates of sigma(e_j)),
// central u with sigma(u) u = 1 and form parameter Lambda.
struct UnitaryRing {
  Algebra algebra;
  Matrix sigma;
  AlgElem u;
  std::vector<AlgElem> lambda;

  const BaseRing& base() const { return algebra.base(); }
  std::size_t rank() const { return algebra.rank(); }
  AlgElem apply_sigma(const AlgElem& a) const { return mat_apply(algebra.base(), sigma, a); }
  bool in_lambda(const AlgElem& a) const { return in_span(algebra.base(), lambda, a); }
};

using UnitaryRingPtr = std::shared_ptr<const UnitaryRing>;

// Normalizes the Lambda generators to a basis.
UnitaryRingPtr make_unitary(Algebra algebra, Matrix sigma, AlgElem u, std::vector<AlgElem> lambda);

std::vector<std::string> check_unitary(const UnitaryRing& U);

struct LambdaBounds {
  std::vector<AlgElem> min;
  std::vector<AlgElem> max;
};
LambdaBounds lambda_min_max(const Algebra& A, const Matrix& sigma, const AlgElem& u);

// ----------------------------------------------------------- constructors

enum class MatrixInvolution { Transpose, Symplectic };
enum class TiledInvolution { Transpose, ReversedTranspose };

// Lambda defaults to Lambda^min(u).
UnitaryRingPtr scalar_ring(const BaseRing& base, const RingElem& u, bool lambda_max = false);
UnitaryRingPtr matrix_algebra(const BaseRing& base, std::size_t n, MatrixInvolution inv,
                              const RingElem& u_sign);
UnitaryRingPtr matrix_algebra(const BaseRing& base, std::size_t n, MatrixInvolution inv);
// Order R + pi R x + pi R y + pi R xy in the quaternion algebra (u, v), with the
// involution fixing x, y and negating xy, form element 1 and Lambda^min(1).
UnitaryRingPtr quaternion_order(const BaseRing& base, const mpq_class& u, const mpq_class& v,
                                const mpq_class& pi);
// Tiled order {(a_ij) : a_ij in prod_p p^{m_ij(p)} R} inside M_n.
UnitaryRingPtr tiled_order(const BaseRing& base, std::size_t n,
                           const std::vector<std::pair<long, std::vector<std::vector<int>>>>& pattern,
                           TiledInvolution inv);
// A x A^op with the exchange involution, u = 1, Lambda^min.
UnitaryRingPtr exchange_ring(const Algebra& A);
// R[x]/(x^2 - a x - b) with conjugation x -> a - x, u = 1, Lambda^min.
UnitaryRingPtr quadratic_extension(const BaseRing& base, const RingElem& a, const RingElem& b);
UnitaryRingPtr direct_product(const UnitaryRing& a, const UnitaryRing& b);

// ------------------------------------------------------ structure theory

// Basis (over a field) or generating set (over a truncated ring) of Jac(A).
std::vector<AlgElem> jacobson_radical(const Algebra& A);
std::vector<AlgElem> center_basis(const Algebra& A);

// Coordinates with respect to an echelon basis of a subspace of K^n.
class Subspace {
 public:
  Subspace() = default;
  Subspace(const BaseRing& K, const std::vector<Vec>& gens, std::size_t ambient);
  std::size_t dim() const { return basis_.size(); }
  const std::vector<Vec>& basis() const { return basis_; }
  bool contains(const Vec& v) const;
  // Coordinates of v (assumed in the subspace).
  Vec coords(const Vec& v) const;
  // Coordinates of the class of v in the quotient K^n / subspace, with respect
  // to the standard vectors at non-pivot positions.
  Vec quotient_coords(const Vec& v) const;
  const std::vector<std::size_t>& pivots() const { return pivots_; }
  const std::vector<std::size_t>& complement() const { return complement_; }

 private:
  BaseRing K_;
  std::size_t ambient_ = 0;
  std::vector<Vec> basis_;
  std::vector<std::size_t> pivots_;
  std::vector<std::size_t> complement_;
};

struct QuotientRing {
  UnitaryRingPtr ring;
  // Row-major projection matrix (quotient rank x source rank).
  Matrix projection;
  // Standard lift of the quotient basis (source rank x quotient rank).
  Matrix lift;
};

// U / J for a sigma-stable two-sided ideal J over a field.
QuotientRing quotient_by_ideal(const UnitaryRing& U, const std::vector<AlgElem>& ideal);

struct ReducedRing {
  UnitaryRingPtr raw;   // entrywise reduction mod p
  QuotientRing bar;     // raw / Jac(raw)
};

// Reduction of a ring over localized integers, rationals or a truncated local
// ring modulo p, followed by the quotient by the Jacobson radical.
ReducedRing reduce_unitary(const UnitaryRing& U, long p);
// Bar object for a ring over a field (quotient by the radical).
QuotientRing semisimple_quotient(const UnitaryRing& U);

// Entrywise base change of a unitary ring; Lambda becomes the image span.
UnitaryRingPtr scalar_extend(const UnitaryRing& U, const BaseRing& dst);
// The same ring viewed over the prime field of its F_{p^e} base; the basis
// element theta^k e_i sits at index i*e + k, theta generating F_{p^e}.
UnitaryRingPtr restrict_scalars(const UnitaryRing& U);

enum class InvolutionKind { First, Second };
enum class Classification {
  SplitOrthogonal,
  OrthogonalUndecidedSplit,
  OrthogonalNonsplit,
  NotOrthogonal,
  SecondKind,
};
enum class SplitHint { Split, Division, Unknown };

const char* classification_name(Classification c);

struct ComponentReport {
  std::size_t index = 0;
  AlgElem idempotent;        // central idempotent in parent coordinates
  Matrix projection;         // a -> coordinates of e_i a (dimension x parent rank)
  Matrix inclusion;          // component basis in parent coordinates (parent rank x dimension)
  UnitaryRingPtr ring;       // component unitary ring in its own coordinates
  std::vector<AlgElem> center;  // center basis in component coordinates
  std::size_t dimension = 0;
  std::size_t center_dimension = 0;
  std::size_t deg = 0;
  std::size_t lambda_dimension = 0;  // over the base field
  bool lambda_is_center_space = false;
  bool division_part_is_F2 = false;
  InvolutionKind involution_kind = InvolutionKind::First;
  Classification classification = Classification::NotOrthogonal;
  std::optional<std::size_t> n;

  // Coordinates of e_i a for a parent element a.
  AlgElem project(const AlgElem& parent_elem) const;
  // Parent coordinates of a component element.
  AlgElem include(const AlgElem& comp_elem) const;
};

struct SimpleFactorization {
  std::vector<ComponentReport> components;
  std::vector<AlgElem> idempotents;
  std::vector<std::size_t> split_orthogonal;  // indices forming the set I
  std::vector<int> xi;                        // n_i mod 2 for i in I
};

// Requires Jac = 0 over a finite field or Q.
SimpleFactorization semisimple_factorization(const UnitaryRing& U);

// Classification with extra splitness information; `place` selects a
// completion of Q for quaternion components (nullopt means Q itself).
Classification classify_component(const ComponentReport& c, SplitHint hint,
                                  std::optional<Place> place = std::nullopt);

// Quaternion presentation (a, b) of a 4-dimensional central simple algebra over
// Q; nullopt when a nonzero nilpotent was found (so the algebra is split).
struct QuaternionPresentation {
  bool split_by_nilpotent = false;
  mpq_class a, b;
};
QuaternionPresentation quaternion_presentation(const Algebra& A);

}  // namespace unitary
