#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "unitary/finite_engine.hpp"
#include "unitary/quadratic_space.hpp"

namespace unitary {

// Datum of the pseudo-reflection s_{y,c}(x) = x - y c^{-1} h(y, x); requires
// c - f(y, y) in Lambda and c a unit.
struct Reflection {
  AVec y;
  AlgElem c;
};

// Matrix of s_{y,c}; throws NotUnit, NotInQuadraticValue, and checks the
// result is an isometry of q.
AMat reflection_map(const Reflection& r, const QuadClass& q);
// s_{y,c}^{-1} = s_{y, sigma(c) u}.
Reflection inverse_reflection(const Reflection& r, const UnitaryRing& U);
// r_1 r_2 ... r_t (identity for an empty list).
AMat reflection_product(const std::vector<Reflection>& rs, const QuadClass& q);

// A finite matrix group over a tabulated ring, elements sorted lexicographically.
struct GroupEnumeration {
  std::size_t m = 0;
  std::vector<IdxMat> elements;
  std::vector<IdxMat> generators;
  std::unordered_map<std::uint64_t, std::size_t> position;

  std::size_t size() const { return elements.size(); }
  std::optional<std::size_t> find(const FiniteUnitary& F, const IdxMat& x) const;
  bool contains(const FiniteUnitary& F, const IdxMat& x) const { return find(F, x).has_value(); }
  IdxMat multiply(const FiniteUnitary& F, const IdxMat& a, const IdxMat& b) const { return F.mat_mul(a, b, m); }
};

// O([f]) by exhaustion over GL_m; q must live over F.ring().
GroupEnumeration orthogonal_group(const FiniteUnitary& F, const QuadClass& q, std::uint64_t budget = kDefaultBudget);

// Closure of all reflections of q, i.e. O'([f]).
GroupEnumeration reflection_subgroup(const FiniteUnitary& F, const QuadClass& q,
                                     std::uint64_t budget = kDefaultBudget);
// Every valid reflection datum of q, one per distinct matrix.
std::vector<std::pair<Reflection, IdxMat>> all_reflections(const FiniteUnitary& F, const QuadClass& q);

struct DicksonSignature {
  std::vector<int> bits;  // indexed by the split-orthogonal components
  bool operator==(const DicksonSignature& o) const { return bits == o.bits; }
  bool operator!=(const DicksonSignature& o) const { return bits != o.bits; }
  bool operator<(const DicksonSignature& o) const { return bits < o.bits; }
};

struct DicksonValue {
  int delta = 0;
  // Sign exponent of the reduced norm, when the degree of E times the center
  // degree is odd and the characteristic is not 2.
  std::optional<int> norm_delta;
};

// Dickson invariants of isometries of a fixed form, computed on the residue
// components.  E = End(P_i) is found once per component as a centralizer.
class DicksonContext {
 public:
  explicit DicksonContext(const QuadClass& q, std::optional<long> p = std::nullopt);

  const Residue& residue() const { return residue_; }
  const std::vector<std::size_t>& components() const { return residue_.factorization.split_orthogonal; }
  const std::vector<int>& xi() const { return residue_.factorization.xi; }
  std::size_t rank() const { return m_; }

  // Value on the k-th split-orthogonal component of a component matrix.
  DicksonValue component_value(std::size_t k, const AMat& phi_component) const;
  // phi over the source ring of q.
  DicksonSignature signature(const AMat& phi) const;
  // Dimension of E over the base field, per split-orthogonal component.
  std::size_t endomorphism_dimension(std::size_t k) const { return comps_[k].e_dim; }

 private:
  struct Comp {
    std::size_t index = 0;
    std::vector<Matrix> e_basis;
    std::size_t e_dim = 0, deg_e = 0, center_deg = 0;
  };
  Residue residue_;
  std::size_t m_ = 0;
  std::vector<Comp> comps_;
};

// Dickson invariant of an isometry of the component form on c.ring^m.
// Throws NotSplitOrthogonal when c is not split-orthogonal.
int dickson(const AMat& phi, const ComponentReport& c);
DicksonSignature dickson_signature(const AMat& phi, const QuadClass& q);
// Same computation for an orthogonal component that need not be split over
// its base field (the value does not change under field extension).
DicksonValue dickson_value(const AMat& phi, const ComponentReport& c);

struct GenerationReport {
  bool hypotheses_hold = true;
  std::string violation;
  std::uint64_t order = 0;           // |O|
  std::uint64_t reflection_order = 0;  // |O'| by closure
  std::uint64_t preimage_order = 0;  // |Delta^{-1}({0, xi})|
  bool equal = false;                // O' and the preimage agree element for element
  bool contained = false;            // O' inside the preimage
  std::uint64_t index = 0;
  bool index_power_of_two = false;
  bool delta_onto = false;
  std::vector<int> xi;
};

GenerationReport verify_gen_by_reflections(const FiniteUnitary& F, const QuadClass& q,
                                           std::uint64_t budget = kDefaultBudget);

// Factorization phi = r_1 r_2 ... r_t into at most 2m reflections.  Needs a
// rank-one algebra with trivial involution and u = 1 over F_q or Z/p^N (p
// odd), and a unimodular diagonal form.
std::vector<Reflection> cd_factorize(const AMat& phi, const QuadClass& q);

// Exact isometry over the localized integers of q congruent to phi (an
// isometry over Z/p^N) modulo p^N.  Throws DicksonObstruction when the residue
// Dickson signature of phi lies outside {0, xi}.
AMat weak_approximate(const AMat& phi, const BaseRing& truncated, const QuadClass& q);

}  // namespace unitary
