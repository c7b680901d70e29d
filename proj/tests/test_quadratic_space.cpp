#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "unitary/finite_engine.hpp"
#include "unitary/quadratic_space.hpp"

using namespace unitary;

namespace {

AlgElem scalar(const UnitaryRing& U, long v) { return U.algebra.scalar(U.base().from_int(v)); }

AlgElem random_elem(const UnitaryRing& U, std::mt19937_64& rng) {
  const BaseRing& R = U.base();
  AlgElem a;
  for (std::size_t k = 0; k < U.rank(); ++k) a.push_back(R.element_at(rng() % R.cardinality()));
  return a;
}

AMat random_mat(const UnitaryRing& U, std::size_t m, std::mt19937_64& rng) {
  AMat x = AMat::zero(U.algebra, m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) x(i, j) = random_elem(U, rng);
  return x;
}

// Random element of Lambda_P via the basis criterion.
AMat random_lambda_P(const UnitaryRing& U, std::size_t m, std::mt19937_64& rng) {
  const Algebra& A = U.algebra;
  const BaseRing& R = U.base();
  AMat d = AMat::zero(A, m, m);
  for (std::size_t s = 0; s < m; ++s) {
    AlgElem l = A.zero();
    for (const auto& b : U.lambda) l = A.add(l, A.scale(R.element_at(rng() % R.cardinality()), b));
    d(s, s) = l;
    for (std::size_t t = s + 1; t < m; ++t) {
      d(s, t) = random_elem(U, rng);
      d(t, s) = A.neg(A.mul(U.apply_sigma(d(s, t)), U.u));
    }
  }
  return d;
}

std::vector<UnitaryRingPtr> sample_rings() {
  BaseRing F2 = BaseRing::finite_field(2), F3 = BaseRing::finite_field(3), F5 = BaseRing::finite_field(5);
  return {scalar_ring(F5, F5.one()),
          scalar_ring(F3, F3.from_int(-1)),
          scalar_ring(F2, F2.one(), true),
          matrix_algebra(F3, 2, MatrixInvolution::Transpose),
          matrix_algebra(F3, 2, MatrixInvolution::Symplectic),
          quadratic_extension(F2, F2.one(), F2.one()),
          scalar_ring(BaseRing::truncated(3, 2), BaseRing::truncated(3, 2).one())};
}

}  // namespace

TEST_CASE("herm_of examples") {
  BaseRing F5 = BaseRing::finite_field(5);
  auto U = scalar_ring(F5, F5.one());
  CHECK(herm_of(diagonal_quad(U, {scalar(*U, 1)})).form.gram == AMat::diagonal(U->algebra, {scalar(*U, 2)}));
  AMat g = AMat::zero(U->algebra, 2, 2);
  g(0, 1) = scalar(*U, 1);
  AMat hyp = AMat::zero(U->algebra, 2, 2);
  hyp(0, 1) = hyp(1, 0) = scalar(*U, 1);
  CHECK(herm_of(make_quad(U, g)).form.gram == hyp);

  BaseRing F3 = BaseRing::finite_field(3);
  auto M = matrix_algebra(F3, 2, MatrixInvolution::Transpose);
  AlgElem e11 = M->algebra.basis(0);
  AlgElem diag20 = M->algebra.scale(F3.from_int(2), e11);
  CHECK(herm_of(diagonal_quad(M, {e11})).form.gram == AMat::diagonal(M->algebra, {diag20}));
}

TEST_CASE("quad_equal examples") {
  BaseRing F5 = BaseRing::finite_field(5);
  auto U = scalar_ring(F5, F5.one());
  REQUIRE(U->lambda.empty());
  QuadClass a = diagonal_quad(U, {scalar(*U, 1)});
  CHECK(quad_equal(a, a));
  AMat x = AMat::zero(U->algebra, 2, 2), y = AMat::zero(U->algebra, 2, 2);
  x(0, 1) = scalar(*U, 1);
  y(1, 0) = scalar(*U, 1);
  AMat d = amat_sub(U->algebra, x, y);
  CHECK(d(0, 1) == scalar(*U, 1));
  CHECK(d(1, 0) == scalar(*U, -1));
  CHECK(quad_equal(make_quad(U, x), make_quad(U, y)));
  CHECK_FALSE(quad_equal(a, diagonal_quad(U, {scalar(*U, 2)})));
}

TEST_CASE("is_unimodular examples") {
  BaseRing F5 = BaseRing::finite_field(5);
  auto U = scalar_ring(F5, F5.one());
  CHECK(is_unimodular(diagonal_quad(U, {scalar(*U, 1)})));
  AMat g = AMat::zero(U->algebra, 2, 2);
  g(0, 1) = scalar(*U, 1);
  CHECK(is_unimodular(make_quad(U, g)));
  BaseRing Z3 = BaseRing::localized({3});
  auto V = scalar_ring(Z3, Z3.one());
  CHECK_FALSE(is_unimodular(diagonal_quad(V, {scalar(*V, 3)})));
  CHECK(is_unimodular(diagonal_quad(V, {scalar(*V, 1)})));
}

TEST_CASE("is_isometry examples") {
  BaseRing F5 = BaseRing::finite_field(5);
  auto U = scalar_ring(F5, F5.one());
  const Algebra& A = U->algebra;
  QuadClass f = diagonal_quad(U, {scalar(*U, 1), scalar(*U, 1)});
  CHECK(is_isometry(AMat::identity(A, 2), f, f));
  AMat swap = AMat::zero(A, 2, 2);
  swap(0, 1) = swap(1, 0) = scalar(*U, 1);
  CHECK(is_isometry(swap, f, f));
  CHECK_FALSE(is_isometry(AMat::identity(A, 2), f, diagonal_quad(U, {scalar(*U, 1), scalar(*U, 2)})));
  try {
    is_isometry(AMat::zero(A, 2, 2), f, f);
    FAIL("expected not invertible");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotInvertible);
  }
}

TEST_CASE("orth_sum examples") {
  BaseRing F5 = BaseRing::finite_field(5);
  auto U = scalar_ring(F5, F5.one());
  QuadClass a = diagonal_quad(U, {scalar(*U, 1)}), b = diagonal_quad(U, {scalar(*U, 2)});
  CHECK(orth_sum(a, b).rep.gram == AMat::diagonal(U->algebra, {scalar(*U, 1), scalar(*U, 2)}));
  QuadClass empty = make_quad(U, AMat::zero(U->algebra, 0, 0));
  CHECK(orth_sum(empty, a).rep.gram == a.rep.gram);
  AMat g = AMat::zero(U->algebra, 2, 2);
  g(0, 1) = scalar(*U, 1);
  QuadClass hyp = make_quad(U, g);
  QuadClass h4 = orth_sum(hyp, hyp);
  CHECK(h4.rank() == 4);
  CHECK(h4.rep.gram(2, 3) == scalar(*U, 1));
  CHECK(U->algebra.is_zero(h4.rep.gram(0, 3)));
}

TEST_CASE("scalar_extend examples") {
  BaseRing Z3 = BaseRing::localized({3});
  BaseRing F3 = BaseRing::finite_field(3);
  auto V = scalar_ring(Z3, Z3.one());
  QuadClass q = diagonal_quad(V, {scalar(*V, 1), scalar(*V, 2)});
  QuadClass r = scalar_extend(q, F3);
  CHECK(r.rep.gram == AMat::diagonal(r.ring().algebra, {{F3.from_int(1)}, {F3.from_int(2)}}));

  auto Q = quaternion_order(Z3, -1, -1, 3);
  BaseRing Z81 = BaseRing::truncated(3, 4);
  AlgElem x = Q->algebra.basis(1);
  QuadClass qq = diagonal_quad(Q, {Q->algebra.one(), x});
  QuadClass red = scalar_extend(qq, Z81);
  CHECK(red.rep.gram(1, 1) == vec_map(Z3, Z81, x));
  CHECK(red.ring().base() == Z81);

  BaseRing F9 = BaseRing::finite_field(3, 2);
  auto U3 = scalar_ring(F3, F3.one());
  QuadClass f3 = diagonal_quad(U3, {scalar(*U3, 1), scalar(*U3, 2)});
  QuadClass f9 = scalar_extend(f3, F9);
  CHECK(f9.rep.gram(1, 1) == AlgElem{F9.from_int(2)});
}

TEST_CASE("reduce_components examples") {
  BaseRing Z3 = BaseRing::localized({3});
  auto Q = quaternion_order(Z3, -1, -1, 3);
  QuadClass q = diagonal_quad(Q, {Q->algebra.one()});
  REQUIRE(is_unimodular(q));
  ComponentForms cf = reduce_components(q);
  REQUIRE(cf.forms.size() == 1);
  CHECK(cf.forms[0].second.ring().rank() == 1);
  CHECK(cf.forms[0].second.rep.gram(0, 0) == cf.forms[0].second.ring().algebra.one());
  CHECK(is_unimodular(cf.forms[0].second));

  BaseRing F3 = BaseRing::finite_field(3);
  auto M = matrix_algebra(F3, 2, MatrixInvolution::Transpose);
  auto MM = direct_product(*M, *M);
  QuadClass p = diagonal_quad(MM, {MM->algebra.one()});
  ComponentForms pf = reduce_components(p);
  CHECK(pf.forms.size() == 2);
  for (const auto& [i, f] : pf.forms) CHECK(is_unimodular(f));
}

TEST_CASE("reduction of unimodular forms stays unimodular") {
  std::mt19937_64 rng(41);
  BaseRing F3 = BaseRing::finite_field(3);
  auto M = matrix_algebra(F3, 2, MatrixInvolution::Transpose);
  std::vector<UnitaryRingPtr> rings = {direct_product(*M, *scalar_ring(F3, F3.one())),
                                       quaternion_order(BaseRing::localized({5}), -1, -1, 5)};
  for (const auto& U : rings) {
    int seen = 0;
    for (int t = 0; t < 200 && seen < 10; ++t) {
      QuadClass q = make_quad(U, AMat::zero(U->algebra, 1, 1));
      AlgElem a;
      if (U->base().is_finite()) a = random_elem(*U, rng);
      else
        for (std::size_t k = 0; k < U->rank(); ++k) a.push_back(U->base().from_int(static_cast<long>(rng() % 7) - 3));
      q.rep.gram(0, 0) = a;
      if (!is_unimodular(q)) continue;
      ++seen;
      for (const auto& [i, f] : reduce_components(q).forms) CHECK(is_unimodular(f));
    }
    CHECK(seen > 0);
  }
}

TEST_CASE("herm_of depends only on the class") {
  std::mt19937_64 rng(3);
  for (const auto& U : sample_rings())
    for (std::size_t m = 1; m <= 3; ++m)
      for (int t = 0; t < 20; ++t) {
        AMat g = random_mat(*U, m, rng);
        AMat g2 = amat_add(U->algebra, g, random_lambda_P(*U, m, rng));
        QuadClass a = make_quad(U, g), b = make_quad(U, g2);
        CHECK(quad_equal(a, b));
        CHECK(herm_of(a).form.gram == herm_of(b).form.gram);
        CHECK(is_hermitian(herm_of(a).form));
      }
}

TEST_CASE("quad_equal is an equivalence relation") {
  std::mt19937_64 rng(5);
  for (const auto& U : sample_rings()) {
    for (int t = 0; t < 30; ++t) {
      std::size_t m = 1 + rng() % 2;
      AMat g = random_mat(*U, m, rng);
      QuadClass a = make_quad(U, g);
      QuadClass b = make_quad(U, amat_add(U->algebra, g, random_lambda_P(*U, m, rng)));
      QuadClass c = make_quad(U, amat_add(U->algebra, b.rep.gram, random_lambda_P(*U, m, rng)));
      QuadClass d = make_quad(U, random_mat(*U, m, rng));
      CHECK(quad_equal(a, a));
      CHECK(quad_equal(a, b) == quad_equal(b, a));
      CHECK(quad_equal(a, c));
      CHECK(quad_equal(a, d) == quad_equal(d, a));
      if (quad_equal(a, d)) CHECK(quad_equal(c, d));
    }
  }
}

TEST_CASE("is_isometry does not depend on representatives") {
  std::mt19937_64 rng(9);
  for (const auto& U : sample_rings()) {
    FiniteUnitary F(U);
    for (int t = 0; t < 20; ++t) {
      std::size_t m = 1 + rng() % 2;
      AMat phi;
      do phi = random_mat(*U, m, rng);
      while (!amat_is_invertible(U->algebra, phi));
      QuadClass b = make_quad(U, random_mat(*U, m, rng));
      QuadClass a = make_quad(U, pullback(*U, phi, b.rep.gram));
      QuadClass a2 = make_quad(U, amat_add(U->algebra, a.rep.gram, random_lambda_P(*U, m, rng)));
      QuadClass b2 = make_quad(U, amat_add(U->algebra, b.rep.gram, random_lambda_P(*U, m, rng)));
      CHECK(is_isometry(phi, a, b));
      CHECK(is_isometry(phi, a2, b2));
      CHECK(F.is_invertible(F.from_amat(phi), m));
    }
  }
}

TEST_CASE("scalar extension commutes with herm_of and orth_sum") {
  std::mt19937_64 rng(13);
  BaseRing F3 = BaseRing::finite_field(3), F27 = BaseRing::finite_field(3, 3);
  std::vector<UnitaryRingPtr> rings = {scalar_ring(F3, F3.one()), matrix_algebra(F3, 2, MatrixInvolution::Transpose),
                                       matrix_algebra(F3, 2, MatrixInvolution::Symplectic)};
  for (const auto& U : rings) {
    auto UK = scalar_extend(*U, F27);
    for (int t = 0; t < 20; ++t) {
      QuadClass a = make_quad(U, random_mat(*U, 1 + rng() % 2, rng));
      QuadClass b = make_quad(U, random_mat(*U, 1 + rng() % 2, rng));
      CHECK(herm_of(scalar_extend(a, UK)).form.gram == amat_map(U->algebra, F27, herm_of(a).form.gram));
      CHECK(orth_sum(scalar_extend(a, UK), scalar_extend(b, UK)).rep.gram ==
            scalar_extend(orth_sum(a, b), UK).rep.gram);
    }
  }
}

TEST_CASE("Lambda_P dimension multiplies by the extension degree") {
  BaseRing F2 = BaseRing::finite_field(2);
  for (long q : {2L, 3L, 5L})
    for (int e : {2, 3}) {
      BaseRing Fq = BaseRing::finite_field(q), Fqe = BaseRing::finite_field(q, e);
      std::vector<UnitaryRingPtr> rings = {scalar_ring(Fq, Fq.one()), scalar_ring(Fq, Fq.from_int(-1)),
                                           matrix_algebra(Fq, 2, MatrixInvolution::Transpose)};
      if (q == 2) rings.push_back(scalar_ring(F2, F2.one(), true));
      for (const auto& U : rings)
        for (std::size_t m = 1; m <= 2; ++m) {
          auto LP = lambda_P_basis(*U, m);
          auto UK = scalar_extend(*U, Fqe);
          // F_q-dimension of Lambda_{P_K}, computed over the restricted ring.
          auto LK = lambda_P_basis(*restrict_scalars(*UK), m);
          CHECK(LK.size() == static_cast<std::size_t>(e) * LP.size());
          // The K-span of the image of Lambda_P is all of Lambda_{P_K}.
          std::vector<Vec> image, full;
          auto flat = [](const AMat& d) {
            Vec v;
            for (const auto& x : d.entries()) v.insert(v.end(), x.begin(), x.end());
            return v;
          };
          for (const auto& d : LP) image.push_back(flat(amat_map(U->algebra, Fqe, d)));
          for (const auto& d : lambda_P_basis(*UK, m)) full.push_back(flat(d));
          std::size_t dim = m * m * U->rank();
          CHECK(span_basis(Fqe, image, dim).size() == full.size());
          for (const auto& v : full) CHECK(in_span(Fqe, span_basis(Fqe, image, dim), v));
          for (const auto& d : LP) CHECK(in_lambda_P(*U, d));
        }
    }
}

TEST_CASE("brute_force_classify examples") {
  BaseRing F3 = BaseRing::finite_field(3), F5 = BaseRing::finite_field(5);
  FiniteUnitary T3(scalar_ring(F3, F3.one()));
  ClassifyOptions o;
  o.rank = 1;
  o.unimodular_only = true;
  auto c1 = brute_force_classify(T3, o);
  CHECK(c1.classes.size() == 2);
  o.rank = 2;
  auto c2 = brute_force_classify(T3, o);
  CHECK(c2.classes.size() == 2);
  FiniteUnitary T5(scalar_ring(F5, F5.one()));
  ClassifyOptions all;
  all.rank = 1;
  auto c3 = brute_force_classify(T5, all);
  CHECK(c3.classes.size() == 3);
}

TEST_CASE("rank-2 classes over F_3 match the determinant oracle") {
  // Nondegenerate symmetric 2x2 matrices over F_3, split by det mod squares.
  std::size_t square = 0, nonsquare = 0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        int det = ((a * c - b * b) % 3 + 3) % 3;
        if (det == 1) ++square;
        if (det == 2) ++nonsquare;
      }
  BaseRing F3 = BaseRing::finite_field(3);
  FiniteUnitary T3(scalar_ring(F3, F3.one()));
  ClassifyOptions o;
  o.rank = 2;
  o.unimodular_only = true;
  o.flavor = Flavor::Hermitian;
  auto c = brute_force_classify(T3, o);
  REQUIRE(c.classes.size() == 2);
  std::vector<std::uint64_t> sizes = {c.classes[0].orbit_size, c.classes[1].orbit_size};
  std::sort(sizes.begin(), sizes.end());
  std::vector<std::uint64_t> expected = {std::min(square, nonsquare), std::max(square, nonsquare)};
  CHECK(sizes == expected);
}

TEST_CASE("orbit sizes sum to the total and match the group order") {
  BaseRing F3 = BaseRing::finite_field(3), F2 = BaseRing::finite_field(2);
  std::vector<UnitaryRingPtr> rings = {scalar_ring(F3, F3.one()), scalar_ring(F2, F2.one(), true),
                                       matrix_algebra(F3, 2, MatrixInvolution::Transpose),
                                       quadratic_extension(F2, F2.one(), F2.one()),
                                       scalar_ring(BaseRing::truncated(3, 2), BaseRing::truncated(3, 2).one())};
  for (const auto& U : rings) {
    FiniteUnitary F(U);
    for (Flavor fl : {Flavor::Quadratic, Flavor::Hermitian})
      for (std::size_t m = 1; m <= 2; ++m) {
        if (U->rank() * m * m > 4) continue;
        ClassifyOptions o;
        o.flavor = fl;
        o.rank = m;
        auto c = brute_force_classify(F, o);
        std::uint64_t sum = 0;
        for (const auto& k : c.classes) {
          sum += k.orbit_size;
          CHECK(k.orbit_size * k.stabilizer_size == c.group_order);
        }
        CHECK(sum == c.total_forms);
      }
  }
}

TEST_CASE("system flavor uses simultaneous congruence") {
  BaseRing F5 = BaseRing::finite_field(5);
  auto U = scalar_ring(F5, F5.one());
  FiniteUnitary F(U);
  ClassifyOptions o;
  o.flavor = Flavor::System;
  o.rank = 1;
  o.system_involutions = {U->sigma, U->sigma};
  auto c = brute_force_classify(F, o);
  std::uint64_t sum = 0;
  for (const auto& k : c.classes) sum += k.orbit_size;
  CHECK(sum == 25);
  // Pairs scale jointly by the squares {1, 4}: 1 + 2 + 2 + 8 orbits.
  CHECK(c.classes.size() == 13);
}

TEST_CASE("finite engine tables agree with the algebra") {
  std::mt19937_64 rng(17);
  for (const auto& U : sample_rings()) {
    FiniteUnitary F(U);
    const Algebra& A = U->algebra;
    CHECK(F.element(0) == A.zero());
    CHECK(F.element(F.one()) == A.one());
    for (int t = 0; t < 200; ++t) {
      AlgElem a = random_elem(*U, rng), b = random_elem(*U, rng);
      Idx ia = F.index(a), ib = F.index(b);
      CHECK(F.element(F.mul(ia, ib)) == A.mul(a, b));
      CHECK(F.element(F.add(ia, ib)) == A.add(a, b));
      CHECK(F.element(F.sigma(ia)) == U->apply_sigma(a));
      CHECK(F.is_unit(ia) == A.is_unit(a));
      CHECK(F.in_lambda(ia) == U->in_lambda(a));
    }
  }
}

TEST_CASE("budget guard") {
  BaseRing F5 = BaseRing::finite_field(5);
  FiniteUnitary F(matrix_algebra(F5, 2, MatrixInvolution::Transpose));
  ClassifyOptions o;
  o.rank = 2;
  o.budget = 1000;
  try {
    brute_force_classify(F, o);
    FAIL("expected budget exceeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BudgetExceeded);
  }
}
