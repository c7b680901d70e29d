#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "unitary/algebra.hpp"

using namespace unitary;

namespace {

BaseRing F(long p, int e = 1) { return BaseRing::finite_field(p, e); }

// k[eps]/(eps^2) over a field k.
Algebra dual_numbers(const BaseRing& K) {
  std::vector<RingElem> sc(8, K.zero());
  sc[0] = K.one();              // 1*1 = 1
  sc[(0 * 2 + 1) * 2 + 1] = K.one();  // 1*eps = eps
  sc[(1 * 2 + 0) * 2 + 1] = K.one();  // eps*1 = eps
  return Algebra(K, 2, sc, unit_vec(K, 2, 0));
}

// Upper triangular 2x2 matrices: basis e11, e12, e22.
Algebra upper_triangular(const BaseRing& K) {
  std::vector<RingElem> sc(27, K.zero());
  auto set = [&](std::size_t i, std::size_t j, std::size_t k) { sc[(i * 3 + j) * 3 + k] = K.one(); };
  set(0, 0, 0);
  set(0, 1, 1);
  set(1, 2, 1);
  set(2, 2, 2);
  AlgElem one = zero_vec(K, 3);
  one[0] = K.one();
  one[2] = K.one();
  return Algebra(K, 3, sc, one);
}

// Q[x]/(x^3 - 2x) with the identity involution.
UnitaryRingPtr cubic_etale() {
  BaseRing Q = BaseRing::rationals();
  std::vector<RingElem> sc(27, Q.zero());
  auto at = [&](std::size_t i, std::size_t j, std::size_t k) -> RingElem& { return sc[(i * 3 + j) * 3 + k]; };
  // basis 1, x, x^2 with x^3 = 2x
  at(0, 0, 0) = Q.one();
  at(0, 1, 1) = Q.one();
  at(1, 0, 1) = Q.one();
  at(0, 2, 2) = Q.one();
  at(2, 0, 2) = Q.one();
  at(1, 1, 2) = Q.one();
  at(1, 2, 1) = Q.from_int(2);
  at(2, 1, 1) = Q.from_int(2);
  at(2, 2, 2) = Q.from_int(2);
  Algebra A(Q, 3, sc, unit_vec(Q, 3, 0));
  return make_unitary(A, Matrix::identity(Q, 3), A.one(), {});
}

void check_radical_invariants(const Algebra& A, const std::vector<AlgElem>& J) {
  const BaseRing& K = A.base();
  Subspace S(K, J, A.rank());
  for (const auto& x : S.basis())
    for (std::size_t j = 0; j < A.rank(); ++j) {
      CHECK(S.contains(A.mul(x, A.basis(j))));
      CHECK(S.contains(A.mul(A.basis(j), x)));
    }
  // J^rank = 0: every product of rank-many basis elements vanishes.
  std::vector<AlgElem> prods = S.basis();
  for (std::size_t k = 1; k < A.rank() && !prods.empty(); ++k) {
    std::vector<AlgElem> next;
    for (const auto& p : prods)
      for (const auto& x : S.basis()) next.push_back(A.mul(p, x));
    prods = span_basis(K, next, A.rank());
  }
  CHECK(prods.empty());
  auto U = make_unitary(A, Matrix::identity(K, A.rank()), A.one(), {});
  QuotientRing Q = quotient_by_ideal(*U, J);
  CHECK(jacobson_radical(Q.ring->algebra).empty());
}

}  // namespace

TEST_CASE("check_unitary examples") {
  BaseRing F5 = F(5);
  CHECK(check_unitary(*scalar_ring(F5, F5.one())).empty());
  Algebra A(F5, 1, {F5.one()}, {F5.one()});
  auto bad = make_unitary(A, Matrix::identity(F5, 1), {F5.one()}, {{F5.one()}});
  auto diag = check_unitary(*bad);
  REQUIRE(diag.size() == 1);
  CHECK(diag[0] == "Lambda not contained in Lambda^max");
  auto M2 = matrix_algebra(F(3), 2, MatrixInvolution::Transpose);
  CHECK(check_unitary(*M2).empty());
  REQUIRE(M2->lambda.size() == 1);
  BaseRing F3 = F(3);
  AlgElem skew{F3.zero(), F3.one(), F3.neg(F3.one()), F3.zero()};
  CHECK(M2->in_lambda(skew));
}

TEST_CASE("lambda_min_max examples") {
  BaseRing F5 = F(5);
  Algebra A(F5, 1, {F5.one()}, {F5.one()});
  LambdaBounds b = lambda_min_max(A, Matrix::identity(F5, 1), {F5.neg(F5.one())});
  CHECK(b.min.size() == 1);
  CHECK(b.max.size() == 1);

  auto M2 = matrix_algebra(F(3), 2, MatrixInvolution::Transpose);
  LambdaBounds m = lambda_min_max(M2->algebra, M2->sigma, M2->u);
  CHECK(m.min.size() == 1);
  CHECK(m.max.size() == 1);
  CHECK(in_span(F(3), m.max, m.min[0]));

  auto X = exchange_ring(A);
  LambdaBounds x = lambda_min_max(X->algebra, X->sigma, X->u);
  REQUIRE(x.min.size() == 1);
  CHECK(x.max.size() == 1);
  CHECK(F5.add(x.min[0][0], x.min[0][1]) == F5.zero());
}

TEST_CASE("Lambda^min equals Lambda^max in odd characteristic") {
  std::vector<UnitaryRingPtr> rings{
      scalar_ring(F(3), F(3).one()), scalar_ring(F(5), F(5).from_int(-1)),
      matrix_algebra(F(3), 2, MatrixInvolution::Transpose),
      matrix_algebra(F(5), 2, MatrixInvolution::Symplectic),
      matrix_algebra(F(3), 2, MatrixInvolution::Transpose, F(3).from_int(-1)),
      exchange_ring(matrix_algebra(F(3), 2, MatrixInvolution::Transpose)->algebra),
      quadratic_extension(F(7), F(7).from_int(1), F(7).from_int(1)),
      scalar_extend(*matrix_algebra(F(3), 2, MatrixInvolution::Transpose), F(3, 2))};
  for (const auto& U : rings) {
    CHECK(check_unitary(*U).empty());
    LambdaBounds b = lambda_min_max(U->algebra, U->sigma, U->u);
    CHECK(b.min.size() == b.max.size());
    for (const auto& v : b.max) CHECK(in_span(U->base(), b.min, v));
  }
}

TEST_CASE("jacobson_radical examples and invariants") {
  CHECK(jacobson_radical(matrix_algebra(F(3), 2, MatrixInvolution::Transpose)->algebra).empty());

  BaseRing Q = BaseRing::rationals();
  auto J = jacobson_radical(upper_triangular(Q));
  REQUIRE(J.size() == 1);
  CHECK(J[0] == Vec{Q.zero(), Q.one(), Q.zero()});
  check_radical_invariants(upper_triangular(Q), J);

  for (const auto& K : {F(3), F(2), F(3, 2), F(5)}) {
    CAPTURE(K.name());
    auto R = jacobson_radical(dual_numbers(K));
    REQUIRE(R.size() == 1);
    CHECK(R[0] == Vec{K.zero(), K.one()});
    check_radical_invariants(dual_numbers(K), R);
    auto T = jacobson_radical(upper_triangular(K));
    REQUIRE(T.size() == 1);
    check_radical_invariants(upper_triangular(K), T);
  }
}

TEST_CASE("reduce_unitary of orders") {
  BaseRing Z3 = BaseRing::localized({3});
  auto H = quaternion_order(Z3, -1, -1, 3);
  CHECK(check_unitary(*H).empty());
  ReducedRing r = reduce_unitary(*H, 3);
  CHECK(jacobson_radical(r.raw->algebra).size() == 3);
  CHECK(r.bar.ring->rank() == 1);

  auto M = matrix_algebra(Z3, 2, MatrixInvolution::Transpose);
  ReducedRing m = reduce_unitary(*M, 3);
  CHECK(m.bar.ring->rank() == 4);
  CHECK(jacobson_radical(m.raw->algebra).empty());

  auto T = tiled_order(Z3, 2, {{3, {{0, 1}, {0, 0}}}}, TiledInvolution::ReversedTranspose);
  CHECK(check_unitary(*T).empty());
  ReducedRing t = reduce_unitary(*T, 3);
  CHECK(jacobson_radical(t.raw->algebra).size() == 2);
  CHECK(t.bar.ring->rank() == 2);
  CHECK(t.bar.ring->algebra.is_commutative());
  SimpleFactorization f = semisimple_factorization(*t.bar.ring);
  // the reversed transpose exchanges the two diagonal idempotents
  REQUIRE(f.components.size() == 1);
  CHECK(f.components[0].classification == Classification::SecondKind);
}

TEST_CASE("semisimple_factorization examples") {
  BaseRing F5 = F(5);
  Algebra A(F5, 1, {F5.one()}, {F5.one()});
  auto X = semisimple_factorization(*exchange_ring(A));
  REQUIRE(X.components.size() == 1);
  CHECK(X.components[0].involution_kind == InvolutionKind::Second);
  CHECK(X.components[0].classification == Classification::SecondKind);

  auto M = semisimple_factorization(*matrix_algebra(F(3), 2, MatrixInvolution::Transpose));
  REQUIRE(M.components.size() == 1);
  CHECK(M.components[0].classification == Classification::SplitOrthogonal);
  CHECK(M.components[0].deg == 2);
  CHECK(*M.components[0].n == 2);
  CHECK(M.xi == std::vector<int>{0});

  BaseRing Q = BaseRing::rationals();
  auto H = quaternion_order(Q, -1, -1, 1);
  auto fh = semisimple_factorization(*H);
  REQUIRE(fh.components.size() == 1);
  CHECK(fh.components[0].classification == Classification::OrthogonalUndecidedSplit);
  CHECK(classify_component(fh.components[0], SplitHint::Unknown) == Classification::OrthogonalNonsplit);
  CHECK(classify_component(fh.components[0], SplitHint::Unknown, Place::at(3)) ==
        Classification::SplitOrthogonal);
  CHECK(classify_component(fh.components[0], SplitHint::Unknown, Place::infinity()) ==
        Classification::OrthogonalNonsplit);

  auto M2Q = semisimple_factorization(*matrix_algebra(Q, 2, MatrixInvolution::Transpose));
  CHECK(classify_component(M2Q.components[0], SplitHint::Unknown) == Classification::SplitOrthogonal);

  auto symp = semisimple_factorization(*matrix_algebra(F(5), 2, MatrixInvolution::Symplectic));
  CHECK(symp.components[0].classification == Classification::NotOrthogonal);
}

TEST_CASE("factorization invariants") {
  std::vector<UnitaryRingPtr> rings{
      direct_product(*matrix_algebra(F(3), 2, MatrixInvolution::Transpose),
                     *matrix_algebra(F(3), 2, MatrixInvolution::Transpose)),
      direct_product(*scalar_ring(F(5), F(5).one()), *exchange_ring(matrix_algebra(F(5), 1, MatrixInvolution::Transpose)->algebra)),
      quadratic_extension(F(5), F(5).zero(), F(5).one()),   // x^2 = 1 splits
      quadratic_extension(F(5), F(5).zero(), F(5).from_int(2)),  // x^2 = 2 is a field
      scalar_extend(*quadratic_extension(F(3), F(3).zero(), F(3).from_int(2)), F(3, 2)),
      cubic_etale()};
  std::vector<std::size_t> expected_components{2, 2, 1, 1, 1, 2};
  for (std::size_t r = 0; r < rings.size(); ++r) {
    const auto& U = *rings[r];
    CAPTURE(r);
    auto f = semisimple_factorization(U);
    CHECK(f.components.size() == expected_components[r]);
    const Algebra& A = U.algebra;
    AlgElem sum = A.zero();
    std::size_t dim = 0;
    for (std::size_t i = 0; i < f.idempotents.size(); ++i) {
      const auto& e = f.idempotents[i];
      CHECK(A.mul(e, e) == e);
      CHECK(U.apply_sigma(e) == e);
      for (std::size_t j = 0; j < f.idempotents.size(); ++j)
        if (i != j) CHECK(A.is_zero(A.mul(e, f.idempotents[j])));
      sum = A.add(sum, e);
      dim += f.components[i].dimension;
      const auto& c = f.components[i];
      CHECK(check_unitary(*c.ring).empty());
      // multiplication of the component reconstructs the parent product
      for (std::size_t a = 0; a < c.dimension; ++a)
        for (std::size_t b = 0; b < c.dimension; ++b) {
          AlgElem ea = c.include(unit_vec(U.base(), c.dimension, a));
          AlgElem eb = c.include(unit_vec(U.base(), c.dimension, b));
          CHECK(c.include(c.ring->algebra.mul(unit_vec(U.base(), c.dimension, a),
                                              unit_vec(U.base(), c.dimension, b))) == A.mul(ea, eb));
        }
      if (c.classification == Classification::SplitOrthogonal)
        CHECK(c.lambda_dimension == c.center_dimension * *c.n * (*c.n - 1) / 2);
    }
    CHECK(sum == A.one());
    CHECK(dim == A.rank());
  }
  auto split = semisimple_factorization(*rings[2]);
  CHECK(split.components[0].classification == Classification::SecondKind);
}
