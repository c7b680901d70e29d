#pragma once

#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "unitary/quadratic_space.hpp"

namespace unitary {

using Idx = std::uint32_t;
// Row-major square matrix over a tabulated ring.
using IdxMat = std::vector<Idx>;

constexpr std::uint64_t kDefaultBudget = 4000000;

// A unitary ring over a finite local base (F_q or Z/p^N) with all elements
// indexed and addition, multiplication and the involution tabulated.
class FiniteUnitary {
 public:
  explicit FiniteUnitary(UnitaryRingPtr U, std::uint64_t max_elements = 1024);

  const UnitaryRing& ring() const { return *U_; }
  const UnitaryRingPtr& ring_ptr() const { return U_; }
  Idx size() const { return N_; }
  std::size_t rank() const { return n_; }

  AlgElem element(Idx a) const;
  Idx index(const AlgElem& a) const;

  Idx zero() const { return 0; }
  Idx one() const { return one_; }
  Idx u() const { return u_; }
  Idx add(Idx a, Idx b) const { return add_[a * N_ + b]; }
  Idx mul(Idx a, Idx b) const { return mul_[a * N_ + b]; }
  Idx neg(Idx a) const { return neg_[a]; }
  Idx sub(Idx a, Idx b) const { return add(a, neg(b)); }
  Idx sigma(Idx a) const { return sigma_[a]; }
  bool is_unit(Idx a) const { return inv_[a] != kNone; }
  Idx inverse(Idx a) const;
  bool in_lambda(Idx a) const { return lambda_canon_[a] == 0; }
  // Smallest index in the coset a + Lambda.
  Idx lambda_canon(Idx a) const { return lambda_canon_[a]; }
  const std::vector<Idx>& lambda_elements() const { return lambda_; }

  // Index of the image under an additional involution (for systems of forms).
  std::vector<Idx> sigma_table(const Matrix& sigma) const;

  IdxMat identity(std::size_t m) const;
  IdxMat mat_mul(const IdxMat& x, const IdxMat& y, std::size_t m) const;
  // phi^* g phi for the involution table `sig`.
  IdxMat pullback(const IdxMat& phi, const IdxMat& g, std::size_t m, const std::vector<Idx>& sig) const;
  IdxMat pullback(const IdxMat& phi, const IdxMat& g, std::size_t m) const { return pullback(phi, g, m, sigma_); }
  bool is_invertible(const IdxMat& x, std::size_t m) const;

  IdxMat from_amat(const AMat& x) const;
  AMat to_amat(const IdxMat& x, std::size_t m) const;

  // Canonical representative of the class modulo Lambda_P: zero above the
  // diagonal, hermitian entries below it and Lambda-reduced diagonal.
  IdxMat quad_canon(const IdxMat& g, std::size_t m) const;
  IdxMat herm(const IdxMat& g, std::size_t m) const;
  std::uint64_t code(const IdxMat& x) const;

  // All invertible m x m matrices, in lexicographic order; cached.
  const std::vector<IdxMat>& general_linear(std::size_t m, std::uint64_t budget = kDefaultBudget) const;

 private:
  static constexpr Idx kNone = 0xffffffffu;
  UnitaryRingPtr U_;
  BaseRing R_;
  std::size_t n_ = 0;
  Idx r_ = 0;  // base cardinality
  Idx N_ = 0;
  Idx one_ = 0, u_ = 0;
  std::vector<Idx> add_, mul_, neg_, sigma_, inv_, lambda_canon_, lambda_;
  // Base ring tables and left multiplication matrices in base indices.
  std::vector<Idx> badd_, bmul_, bneg_, binv_;
  std::vector<Idx> lmat_;
  mutable std::map<std::size_t, std::vector<IdxMat>> gl_cache_;
};

enum class Flavor { Quadratic, Hermitian, System };

struct ClassifyOptions {
  Flavor flavor = Flavor::Quadratic;
  std::size_t rank = 1;
  bool unimodular_only = false;
  // Involutions of the system flavor (column convention, as UnitaryRing::sigma).
  std::vector<Matrix> system_involutions;
  std::uint64_t budget = kDefaultBudget;
};

struct FormClass {
  IdxMat representative;  // canonical; for systems the forms are concatenated
  std::uint64_t orbit_size = 0;
  std::uint64_t stabilizer_size = 0;
  bool unimodular = false;
};

struct FormClassification {
  Flavor flavor = Flavor::Quadratic;
  std::size_t rank = 0;
  std::vector<FormClass> classes;
  std::uint64_t total_forms = 0;
  std::uint64_t group_order = 0;
  // Canonical code -> class index, for every enumerated form.
  std::unordered_map<std::uint64_t, std::size_t> class_of;

  // Class index of a form given by any representative (quadratic forms are
  // canonicalized first); -1 if it was not enumerated.
  long find(const FiniteUnitary& F, const IdxMat& g) const;
};

FormClassification brute_force_classify(const FiniteUnitary& F, const ClassifyOptions& opts);

// Some phi with [phi^* b phi] = [a] (quadratic flavor), if one exists.
std::optional<IdxMat> find_isometry(const FiniteUnitary& F, const IdxMat& a, const IdxMat& b, std::size_t m,
                                    std::uint64_t budget = kDefaultBudget);

}  // namespace unitary
