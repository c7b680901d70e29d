#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "unitary/algebra.hpp"

namespace unitary {

// Vector in the free module A^m (coordinates with respect to the standard basis).
using AVec = std::vector<AlgElem>;

// Matrix over an algebra, row-major.
class AMat {
 public:
  AMat() = default;
  AMat(std::size_t rows, std::size_t cols, const AlgElem& fill)
      : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}

  static AMat zero(const Algebra& A, std::size_t rows, std::size_t cols) { return AMat(rows, cols, A.zero()); }
  static AMat identity(const Algebra& A, std::size_t m);
  static AMat diagonal(const Algebra& A, const std::vector<AlgElem>& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  AlgElem& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const AlgElem& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  const std::vector<AlgElem>& entries() const { return entries_; }

  bool operator==(const AMat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && entries_ == o.entries_;
  }
  bool operator!=(const AMat& o) const { return !(*this == o); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<AlgElem> entries_;
};

AMat amat_mul(const Algebra& A, const AMat& x, const AMat& y);
AMat amat_add(const Algebra& A, const AMat& x, const AMat& y);
AMat amat_sub(const Algebra& A, const AMat& x, const AMat& y);
AVec amat_apply(const Algebra& A, const AMat& x, const AVec& v);
// (X^*)_{st} = sigma(X_{ts}).
AMat amat_star(const UnitaryRing& U, const AMat& x);
AMat amat_map(const Algebra& A, const BaseRing& dst, const AMat& x);
AMat block_diag(const Algebra& A, const AMat& x, const AMat& y);
// Base-ring matrix of v -> X v on A^cols; row s*n+i, column t*n+j.
Matrix block_expansion(const Algebra& A, const AMat& x);
bool amat_is_invertible(const Algebra& A, const AMat& x);
std::optional<AMat> amat_inverse(const Algebra& A, const AMat& x);

// Sesquilinear form on P = A^m with Gram entries g_st = f(x_s, x_t), so that
// f(x, y) = sum_{s,t} sigma(x_s) g_st y_t.
struct SesqForm {
  UnitaryRingPtr ring;
  AMat gram;
  std::size_t rank() const { return gram.rows(); }
};

// A quadratic space, stored by a representative of its class modulo Lambda_P.
struct QuadClass {
  SesqForm rep;
  std::size_t rank() const { return rep.rank(); }
  const UnitaryRing& ring() const { return *rep.ring; }
};

// Sesquilinear form with h_ts = sigma(h_st) u.
struct HermForm {
  SesqForm form;
  std::size_t rank() const { return form.rank(); }
};

SesqForm make_form(UnitaryRingPtr ring, AMat gram);
QuadClass make_quad(UnitaryRingPtr ring, AMat gram);
QuadClass diagonal_quad(UnitaryRingPtr ring, const std::vector<AlgElem>& diag);
// Throws InvalidInput unless the Gram matrix is u-hermitian.
HermForm make_herm(UnitaryRingPtr ring, AMat gram);

AlgElem form_value(const SesqForm& f, const AVec& x, const AVec& y);
bool is_hermitian(const SesqForm& f);
bool same_ring(const UnitaryRing& a, const UnitaryRing& b);

// h_f = f + f^* omega_P, entrywise h_st = g_st + sigma(g_ts) u.
HermForm herm_of(const QuadClass& q);
AMat herm_gram(const UnitaryRing& U, const AMat& g);

// Basis criterion for membership in Lambda_P: diagonal entries in Lambda and
// d_ts = -sigma(d_st) u off the diagonal.
bool in_lambda_P(const UnitaryRing& U, const AMat& d);
bool quad_equal(const QuadClass& a, const QuadClass& b);

// Gram matrix of phi^* g phi.
AMat pullback(const UnitaryRing& U, const AMat& phi, const AMat& g);

bool is_unimodular(const QuadClass& q);
bool is_unimodular(const HermForm& h);

// True iff phi is an isometry from (P, a) to (P, b), i.e. [phi^* b phi] = [a].
// Throws NotInvertible when phi is not invertible.
bool is_isometry(const AMat& phi, const QuadClass& a, const QuadClass& b);

QuadClass orth_sum(const QuadClass& a, const QuadClass& b);

// Entrywise base change into `target`, which must be the matching extension of
// the parent ring (for instance from scalar_extend(U, dst)).
QuadClass scalar_extend(const QuadClass& q, const UnitaryRingPtr& target);
QuadClass scalar_extend(const QuadClass& q, const BaseRing& dst);

// Basis (over a field base) of Lambda_P inside M_m(A), computed by linear
// algebra from the defining conditions d = -d^* omega and d_ss in Lambda.
std::vector<AMat> lambda_P_basis(const UnitaryRing& U, std::size_t m);

// Reduction of a unitary ring to its semisimple residue ring together with the
// simple factorization of the latter.
struct Residue {
  UnitaryRingPtr source;
  UnitaryRingPtr raw;  // source mod p (or the source itself over a field)
  QuotientRing bar;    // raw / Jac(raw)
  SimpleFactorization factorization;

  AlgElem to_raw(const AlgElem& a) const;
  AlgElem to_bar(const AlgElem& a) const;
  AlgElem to_component(std::size_t i, const AlgElem& a) const;
  AMat component_matrix(std::size_t i, const AMat& x) const;
};

// `p` is required for localized integers with several primes; a field base
// needs none and a truncated ring uses its own prime.
Residue make_residue(UnitaryRingPtr U, std::optional<long> p = std::nullopt);

struct ComponentForms {
  Residue residue;
  std::vector<std::pair<std::size_t, QuadClass>> forms;
};

ComponentForms reduce_components(const QuadClass& q, std::optional<long> p = std::nullopt);

}  // namespace unitary
