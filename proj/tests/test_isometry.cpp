#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <random>

#include "unitary/isometry.hpp"

using namespace unitary;

namespace {

AlgElem scalar(const UnitaryRing& U, long v) { return U.algebra.scalar(U.base().from_int(v)); }

AVec basis_vec(const UnitaryRing& U, std::size_t m, std::size_t k) {
  AVec v(m, U.algebra.zero());
  v[k] = U.algebra.one();
  return v;
}

QuadClass ones(const UnitaryRingPtr& U, std::size_t m) {
  return diagonal_quad(U, std::vector<AlgElem>(m, U->algebra.one()));
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidInput;
}

// Random reflection datum over a finite or truncated scalar ring with unit value.
Reflection random_reflection(const QuadClass& q, std::mt19937_64& rng) {
  const UnitaryRing& U = q.ring();
  const BaseRing& R = U.base();
  for (;;) {
    AVec y;
    for (std::size_t i = 0; i < q.rank(); ++i) y.push_back(AlgElem{R.element_at(rng() % R.cardinality())});
    AlgElem c = form_value(q.rep, y, y);
    if (U.algebra.is_unit(c)) return Reflection{y, c};
  }
}

}  // namespace

TEST_CASE("reflection_map examples") {
  BaseRing F5 = BaseRing::finite_field(5);
  auto U = scalar_ring(F5, F5.one());
  QuadClass f = ones(U, 2);
  Reflection r{basis_vec(*U, 2, 0), scalar(*U, 1)};
  AMat s = reflection_map(r, f);
  CHECK(s == AMat::diagonal(U->algebra, {scalar(*U, -1), scalar(*U, 1)}));
  AMat si = reflection_map(inverse_reflection(r, *U), f);
  CHECK(amat_mul(U->algebra, s, si) == AMat::identity(U->algebra, 2));
  AVec zero(2, U->algebra.zero());
  CHECK(kind_of([&] { reflection_map(Reflection{zero, scalar(*U, 0)}, f); }) == ErrorKind::NotUnit);
  CHECK(kind_of([&] { reflection_map(Reflection{zero, scalar(*U, 1)}, f); }) == ErrorKind::NotInQuadraticValue);
  CHECK(kind_of([&] { reflection_map(Reflection{basis_vec(*U, 2, 0), scalar(*U, 2)}, f); }) ==
        ErrorKind::NotInQuadraticValue);
}

TEST_CASE("reflections are isometries with the inverse law") {
  std::mt19937_64 rng(5);
  BaseRing F3 = BaseRing::finite_field(3);
  std::vector<QuadClass> forms = {ones(scalar_ring(F3, F3.one()), 3),
                                  ones(scalar_ring(BaseRing::truncated(3, 3), BaseRing::truncated(3, 3).one()), 2),
                                  ones(matrix_algebra(F3, 2, MatrixInvolution::Transpose), 1),
                                  ones(scalar_ring(F3, F3.from_int(-1)), 2)};
  for (const auto& q : forms) {
    FiniteUnitary F(q.rep.ring);
    auto refl = all_reflections(F, q);
    REQUIRE(!refl.empty());
    for (std::size_t k = 0; k < refl.size() && k < 60; ++k) {
      const auto& [r, S] = refl[(k * 7919) % refl.size()];
      AMat s = reflection_map(r, q);
      CHECK(F.from_amat(s) == S);
      CHECK(is_isometry(s, q, q));
      AMat si = reflection_map(inverse_reflection(r, q.ring()), q);
      CHECK(amat_mul(q.ring().algebra, s, si) == AMat::identity(q.ring().algebra, q.rank()));
    }
  }
}

TEST_CASE("orthogonal_group examples") {
  BaseRing F3 = BaseRing::finite_field(3), F5 = BaseRing::finite_field(5);
  auto U3 = scalar_ring(F3, F3.one());
  FiniteUnitary F(U3);
  CHECK(orthogonal_group(F, ones(U3, 2)).size() == 8);
  CHECK(orthogonal_group(F, ones(U3, 1)).size() == 2);
  CHECK(orthogonal_group(F, ones(U3, 3)).size() == 48);

  auto U5 = scalar_ring(F5, F5.one());
  FiniteUnitary G(U5);
  AMat g = AMat::zero(U5->algebra, 2, 2);
  g(0, 1) = scalar(*U5, 1);
  QuadClass hyp = make_quad(U5, g);
  auto O = orthogonal_group(G, hyp);
  ClassifyOptions o;
  o.rank = 2;
  auto cls = brute_force_classify(G, o);
  long k = cls.find(G, G.from_amat(g));
  REQUIRE(k >= 0);
  CHECK(O.size() == cls.classes[static_cast<std::size_t>(k)].stabilizer_size);
  CHECK(O.size() == 8);  // diagonal t, t^{-1} and the swap
}

TEST_CASE("dickson examples") {
  BaseRing F3 = BaseRing::finite_field(3);
  auto U = scalar_ring(F3, F3.one());
  const Algebra& A = U->algebra;
  QuadClass f = ones(U, 2);
  DicksonContext ctx(f);
  REQUIRE(ctx.components().size() == 1);
  const ComponentReport& c = ctx.residue().factorization.components[ctx.components()[0]];
  CHECK(dickson(AMat::identity(A, 2), c) == 0);
  CHECK(dickson(AMat::diagonal(A, {scalar(*U, -1), scalar(*U, 1)}), c) == 1);
  CHECK(dickson(AMat::diagonal(A, {scalar(*U, -1), scalar(*U, -1)}), c) == 0);
  CHECK(ctx.endomorphism_dimension(0) == 4);

  // Degree-2 component: every reflection lies in the kernel.
  auto M = matrix_algebra(F3, 2, MatrixInvolution::Transpose);
  QuadClass g = ones(M, 1);
  FiniteUnitary FM(M);
  DicksonContext cm(g);
  REQUIRE(cm.components().size() == 1);
  CHECK(cm.xi() == std::vector<int>{0});
  for (const auto& [r, S] : all_reflections(FM, g)) CHECK(cm.signature(FM.to_amat(S, 1)).bits == std::vector<int>{0});

  BaseRing F2 = BaseRing::finite_field(2);
  auto exch = exchange_ring(scalar_ring(F2, F2.one())->algebra);
  const auto& ec = semisimple_factorization(*exch).components[0];
  CHECK(kind_of([&] { dickson(AMat::identity(exch->algebra, 1), ec); }) == ErrorKind::NotSplitOrthogonal);
}

TEST_CASE("dickson_signature examples") {
  BaseRing F3 = BaseRing::finite_field(3);
  auto U = scalar_ring(F3, F3.one());
  QuadClass f = ones(U, 3);
  CHECK(dickson_signature(AMat::identity(U->algebra, 3), f).bits == std::vector<int>{0});

  BaseRing Z3 = BaseRing::localized({3});
  auto Q = quaternion_order(Z3, -1, -1, 3);
  QuadClass q = ones(Q, 1);
  Reflection r{AVec{Q->algebra.one()}, Q->algebra.one()};
  AMat s = reflection_map(r, q);
  DicksonContext ctx(q);
  CHECK(ctx.xi() == std::vector<int>{1});
  CHECK(ctx.signature(s).bits == std::vector<int>{1});
  CHECK(dickson_signature(s, q).bits == std::vector<int>{1});
}

TEST_CASE("dickson_signature is a homomorphism") {
  std::mt19937_64 rng(11);
  BaseRing F3 = BaseRing::finite_field(3), F5 = BaseRing::finite_field(5);
  auto M = matrix_algebra(F3, 2, MatrixInvolution::Transpose);
  auto MS = direct_product(*M, *scalar_ring(F3, F3.one()));
  std::vector<QuadClass> forms = {ones(scalar_ring(F3, F3.one()), 3), ones(scalar_ring(F5, F5.one()), 2), ones(M, 1),
                                  ones(MS, 1)};
  for (const auto& q : forms) {
    FiniteUnitary F(q.rep.ring);
    auto O = orthogonal_group(F, q);
    DicksonContext ctx(q);
    std::vector<DicksonSignature> sig;
    for (const auto& x : O.elements) sig.push_back(ctx.signature(F.to_amat(x, q.rank())));
    for (int t = 0; t < 200; ++t) {
      std::size_t a = rng() % O.size(), b = rng() % O.size();
      auto ab = O.find(F, O.multiply(F, O.elements[a], O.elements[b]));
      REQUIRE(ab.has_value());
      for (std::size_t k = 0; k < sig[a].bits.size(); ++k)
        CHECK(sig[*ab].bits[k] == (sig[a].bits[k] + sig[b].bits[k]) % 2);
    }
  }
}

TEST_CASE("reduced norm agrees with Dickson in odd degree") {
  BaseRing F3 = BaseRing::finite_field(3), F5 = BaseRing::finite_field(5);
  for (const auto& q : {ones(scalar_ring(F3, F3.one()), 3), ones(scalar_ring(F5, F5.one()), 1),
                        ones(scalar_ring(F3, F3.one()), 1)}) {
    FiniteUnitary F(q.rep.ring);
    DicksonContext ctx(q);
    std::size_t checked = 0;
    for (const auto& x : orthogonal_group(F, q).elements) {
      auto phi = ctx.residue().component_matrix(ctx.components()[0], F.to_amat(x, q.rank()));
      DicksonValue v = ctx.component_value(0, phi);
      REQUIRE(v.norm_delta.has_value());
      CHECK(*v.norm_delta == v.delta);
      ++checked;
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("reflection_subgroup examples") {
  BaseRing F3 = BaseRing::finite_field(3), F5 = BaseRing::finite_field(5);
  auto U3 = scalar_ring(F3, F3.one());
  FiniteUnitary F(U3);
  QuadClass f = ones(U3, 2);
  CHECK(reflection_subgroup(F, f).size() == orthogonal_group(F, f).size());

  auto M = matrix_algebra(F3, 2, MatrixInvolution::Transpose);
  FiniteUnitary FM(M);
  QuadClass g = ones(M, 1);
  auto O = orthogonal_group(FM, g);
  auto Op = reflection_subgroup(FM, g);
  CHECK(O.size() == 2 * Op.size());
  DicksonContext ctx(g);
  std::size_t kernel = 0;
  for (const auto& x : O.elements)
    if (ctx.signature(FM.to_amat(x, 1)).bits[0] == 0) {
      ++kernel;
      CHECK(Op.contains(FM, x));
    }
  CHECK(kernel == Op.size());

  auto U5 = scalar_ring(F5, F5.one());
  FiniteUnitary F5u(U5);
  auto O5 = reflection_subgroup(F5u, ones(U5, 1));
  CHECK(O5.size() == 2);
  CHECK(O5.contains(F5u, IdxMat{F5u.index(scalar(*U5, -1))}));
}

TEST_CASE("verify_gen_by_reflections examples") {
  BaseRing F3 = BaseRing::finite_field(3);
  auto U3 = scalar_ring(F3, F3.one());
  FiniteUnitary F(U3);
  auto r = verify_gen_by_reflections(F, ones(U3, 2));
  CHECK(r.hypotheses_hold);
  CHECK(r.equal);
  CHECK(r.index == 1);
  CHECK(r.delta_onto);

  auto M = matrix_algebra(F3, 2, MatrixInvolution::Transpose);
  FiniteUnitary FM(M);
  auto rm = verify_gen_by_reflections(FM, ones(M, 1));
  CHECK(rm.equal);
  CHECK(rm.index == 2);
  CHECK(rm.index_power_of_two);
  CHECK(rm.delta_onto);

  BaseRing F2 = BaseRing::finite_field(2);
  auto U2 = scalar_ring(F2, F2.one(), true);
  FiniteUnitary F2u(U2);
  auto r2 = verify_gen_by_reflections(F2u, ones(U2, 1));
  CHECK_FALSE(r2.hypotheses_hold);
  CHECK(r2.violation == "hypothesis violated: D_i = F_2");
}

TEST_CASE("generation by reflections on mixed components") {
  BaseRing F3 = BaseRing::finite_field(3);
  auto M = matrix_algebra(F3, 2, MatrixInvolution::Transpose);
  auto MS = direct_product(*M, *scalar_ring(F3, F3.one()));
  FiniteUnitary F(MS, 1 << 12);
  auto r = verify_gen_by_reflections(F, ones(MS, 1));
  CHECK(r.hypotheses_hold);
  CHECK(r.contained);
  CHECK(r.equal);
  CHECK(r.index_power_of_two);
  CHECK(r.delta_onto);
}

TEST_CASE("cd_factorize examples") {
  BaseRing F5 = BaseRing::finite_field(5);
  auto U = scalar_ring(F5, F5.one());
  QuadClass f = ones(U, 2);
  CHECK(cd_factorize(AMat::identity(U->algebra, 2), f).empty());
  auto rs = cd_factorize(AMat::diagonal(U->algebra, {scalar(*U, -1), scalar(*U, 1)}), f);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].y == basis_vec(*U, 2, 0));
  CHECK(rs[0].c == scalar(*U, 1));

  BaseRing Z81 = BaseRing::truncated(3, 4);
  auto T = scalar_ring(Z81, Z81.one());
  QuadClass g = ones(T, 3);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    std::vector<Reflection> known;
    for (int k = 0; k < 4; ++k) known.push_back(random_reflection(g, rng));
    AMat phi = reflection_product(known, g);
    auto out = cd_factorize(phi, g);
    CHECK(out.size() <= 6);
    CHECK(reflection_product(out, g) == phi);
  }

  auto V = scalar_ring(BaseRing::finite_field(2), BaseRing::finite_field(2).one(), true);
  CHECK(kind_of([&] { cd_factorize(AMat::identity(V->algebra, 1), ones(V, 1)); }) == ErrorKind::Unsupported);
}

TEST_CASE("cd_factorize round-trips on all isometries") {
  BaseRing F3 = BaseRing::finite_field(3), F5 = BaseRing::finite_field(5);
  for (const auto& q : {ones(scalar_ring(F3, F3.one()), 3),
                        diagonal_quad(scalar_ring(F5, F5.one()), {AlgElem{F5.from_int(1)}, AlgElem{F5.from_int(2)}})}) {
    FiniteUnitary F(q.rep.ring);
    for (const auto& x : orthogonal_group(F, q).elements) {
      AMat phi = F.to_amat(x, q.rank());
      auto rs = cd_factorize(phi, q);
      CHECK(rs.size() <= 2 * q.rank());
      CHECK(reflection_product(rs, q) == phi);
    }
  }
}

TEST_CASE("weak_approximate examples") {
  BaseRing Z3 = BaseRing::localized({3});
  BaseRing Z81 = BaseRing::truncated(3, 4);
  auto V = scalar_ring(Z3, Z3.one());
  QuadClass q = ones(V, 3);
  QuadClass qN = scalar_extend(q, Z81);
  const Algebra& A = V->algebra;

  // Reduction of the rational reflection through (1, 1, 0).
  AVec y{A.one(), A.one(), A.zero()};
  AMat exact = reflection_map(Reflection{y, scalar(*V, 2)}, q);
  AMat phi = amat_map(A, Z81, exact);
  AMat psi = weak_approximate(phi, Z81, q);
  CHECK(is_isometry(psi, q, q));
  CHECK(amat_map(A, Z81, psi) == phi);

  std::mt19937_64 rng(9);
  AMat two = reflection_product({random_reflection(qN, rng), random_reflection(qN, rng)}, qN);
  AMat lifted = weak_approximate(two, Z81, q);
  CHECK(is_isometry(lifted, q, q));
  CHECK(amat_map(A, Z81, lifted) == two);

  CHECK(kind_of([&] { weak_approximate(AMat::identity(qN.ring().algebra, 3), BaseRing::finite_field(3), q); }) ==
        ErrorKind::InvalidInput);
}
