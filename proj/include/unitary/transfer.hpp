#pragma once

#include <string>
#include <vector>

#include "unitary/finite_engine.hpp"
#include "unitary/quadratic_space.hpp"

namespace unitary {

// Transfer along a unimodular hermitian space (Q, h) with Q = A^m.  The target
// B = End_A(Q) = M_m(A) has basis E_st a_k at index (s*m + t)*n + k, involution
// tau(X) = h^{-1} X^* h, u = 1 and form parameter Gamma = h^{-1} Lambda_Q.
struct TransferContext {
  UnitaryRingPtr source;
  HermForm base_form;
  UnitaryRingPtr target;
  AMat h_inverse;
  std::size_t m = 0;

  AlgElem to_target(const AMat& x) const;
  AMat to_source(const AlgElem& b) const;
};

// Throws NotUnimodular when h is not unimodular; the target is checked with
// check_unitary.  Needs a field base (Lambda_Q is computed by linear algebra).
TransferContext make_transfer(UnitaryRingPtr U, const HermForm& h);

// Rank-one class over the target with Gram entry h^{-1} f.
QuadClass transfer_form(const TransferContext& ctx, const QuadClass& q);

struct TransferReport {
  bool unimodularity_equivalence = false;
  bool group_equality = false;
  bool class_bijection = false;
  bool dickson_commutes = false;
  bool split_orthogonal_preserved = false;
  std::uint64_t group_order = 0;
  std::size_t source_classes = 0;
  std::size_t target_classes = 0;
  std::vector<std::string> failures;

  bool all() const {
    return unimodularity_equivalence && group_equality && class_bijection && dickson_commutes &&
           split_orthogonal_preserved;
  }
};

// Exhaustive checks over a finite field base: unimodularity of every class,
// O([f]) = O([T_h f]) through the dictionary, the class map being a bijection
// (and sending [q] ~ [q'] to [T q] ~ [T q']), Dickson invariants agreeing on
// all of O([f]), and split-orthogonal components corresponding.
TransferReport verify_transfer(const TransferContext& ctx, const QuadClass& q, const QuadClass& q2,
                               std::uint64_t budget = kDefaultBudget);

// Extending scalars and transferring agree with transferring and extending:
// same structure constants, involution, Gamma and transferred Gram entry.
bool transfer_commutes_with_extension(const TransferContext& ctx, const BaseRing& dst, const QuadClass& q);

}  // namespace unitary
