#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "unitary/ring_core.hpp"

using namespace unitary;

namespace {

RingElem random_elem(const BaseRing& R, std::mt19937_64& rng) {
  switch (R.kind()) {
    case RingKind::FiniteField:
    case RingKind::TruncatedLocal:
      return R.element_at(rng() % R.cardinality());
    case RingKind::Rationals: {
      long num = static_cast<long>(rng() % 41) - 20;
      long den = static_cast<long>(rng() % 9) + 1;
      return R.from_rational(mpq_class(num, den));
    }
    case RingKind::LocalizedIntegers: {
      long num = static_cast<long>(rng() % 61) - 30;
      long den = 1;
      for (int tries = 0; tries < 20; ++tries) {
        long d = static_cast<long>(rng() % 16) + 1;
        bool ok = true;
        for (long p : R.primes())
          if (d % p == 0) ok = false;
        if (ok) {
          den = d;
          break;
        }
      }
      return R.from_rational(mpq_class(num, den));
    }
    case RingKind::Product: {
      std::vector<RingElem> parts;
      for (const auto& f : R.factors()) parts.push_back(random_elem(f, rng));
      return R.from_parts(parts);
    }
  }
  return R.zero();
}

std::vector<BaseRing> sample_rings() {
  return {BaseRing::finite_field(5),        BaseRing::finite_field(3, 2),
          BaseRing::finite_field(3, 3),     BaseRing::rationals(),
          BaseRing::localized({3, 5}),      BaseRing::truncated(3, 4),
          BaseRing::product({BaseRing::finite_field(3), BaseRing::truncated(5, 2)})};
}

}  // namespace

TEST_CASE("is_unit on each ring kind") {
  CHECK(BaseRing::finite_field(5).is_unit(BaseRing::finite_field(5).from_int(2)));
  BaseRing Z35 = BaseRing::localized({3, 5});
  CHECK(Z35.is_unit(Z35.from_rational(mpq_class(7, 2))));
  CHECK_FALSE(Z35.is_unit(Z35.from_int(3)));
  BaseRing Z81 = BaseRing::truncated(3, 4);
  CHECK(Z81.is_unit(Z81.from_int(4)));
  CHECK_FALSE(Z81.is_unit(Z81.from_int(6)));
}

TEST_CASE("solve_linear examples") {
  BaseRing F3 = BaseRing::finite_field(3);
  SolveResult s = solve_linear(F3, Matrix::identity(F3, 2), {F3.from_int(1), F3.from_int(2)});
  REQUIRE(s.consistent);
  CHECK(s.particular == Vec{F3.from_int(1), F3.from_int(2)});
  CHECK(s.kernel.empty());

  BaseRing F5 = BaseRing::finite_field(5);
  Matrix A = Matrix::from_rows({{F5.from_int(1), F5.from_int(1)}, {F5.from_int(2), F5.from_int(2)}});
  SolveResult k = solve_linear(F5, A, zero_vec(F5, 2));
  REQUIRE(k.consistent);
  CHECK(k.kernel.size() == 1);

  BaseRing Z9 = BaseRing::truncated(3, 2);
  Matrix B = Matrix::from_rows({{Z9.from_int(3)}});
  try {
    solve_linear(Z9, B, {Z9.from_int(3)});
    FAIL("expected precision loss");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PrecisionLoss);
  }
}

TEST_CASE("inconsistent systems are reported") {
  BaseRing F5 = BaseRing::finite_field(5);
  Matrix A = Matrix::from_rows({{F5.from_int(1), F5.from_int(1)}, {F5.from_int(2), F5.from_int(2)}});
  CHECK_FALSE(solve_linear(F5, A, {F5.from_int(1), F5.from_int(1)}).consistent);
}

TEST_CASE("ring_hom examples") {
  BaseRing Z3 = BaseRing::localized({3});
  BaseRing F3 = BaseRing::finite_field(3);
  CHECK(ring_hom(Z3, F3, Z3.from_rational(mpq_class(7, 2))) == F3.from_int(2));
  BaseRing Z81 = BaseRing::truncated(3, 4);
  CHECK(ring_hom(Z3, Z81, Z3.from_rational(mpq_class(1, 2))) == Z81.from_int(41));
  BaseRing Q = BaseRing::rationals();
  BaseRing F5 = BaseRing::finite_field(5);
  try {
    ring_hom(Q, F5, Q.from_rational(mpq_class(1, 5)));
    FAIL("expected not in domain");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotInDomain);
  }
}

TEST_CASE("ring axioms hold on random elements") {
  std::mt19937_64 rng(7);
  for (const auto& R : sample_rings()) {
    CAPTURE(R.name());
    for (int i = 0; i < 200; ++i) {
      RingElem a = random_elem(R, rng), b = random_elem(R, rng), c = random_elem(R, rng);
      CHECK(R.mul(R.mul(a, b), c) == R.mul(a, R.mul(b, c)));
      CHECK(R.add(R.add(a, b), c) == R.add(a, R.add(b, c)));
      CHECK(R.mul(a, R.add(b, c)) == R.add(R.mul(a, b), R.mul(a, c)));
      CHECK(R.mul(R.add(a, b), c) == R.add(R.mul(a, c), R.mul(b, c)));
      CHECK(R.mul(a, b) == R.mul(b, a));
      CHECK(R.add(a, R.neg(a)) == R.zero());
      CHECK(R.mul(a, R.one()) == a);
      if (R.is_unit(a)) CHECK(R.mul(R.inverse(a), a) == R.one());
    }
  }
}

TEST_CASE("ring_hom is a unital homomorphism and composes") {
  std::mt19937_64 rng(11);
  BaseRing Z3 = BaseRing::localized({3});
  BaseRing Z81 = BaseRing::truncated(3, 4);
  BaseRing F3 = BaseRing::finite_field(3);
  BaseRing F27 = BaseRing::finite_field(3, 3);
  CHECK(ring_hom(Z3, Z81, Z3.one()) == Z81.one());
  for (int i = 0; i < 300; ++i) {
    RingElem a = random_elem(Z3, rng), b = random_elem(Z3, rng);
    CHECK(ring_hom(Z3, Z81, Z3.mul(a, b)) == Z81.mul(ring_hom(Z3, Z81, a), ring_hom(Z3, Z81, b)));
    CHECK(ring_hom(Z3, Z81, Z3.add(a, b)) == Z81.add(ring_hom(Z3, Z81, a), ring_hom(Z3, Z81, b)));
    CHECK(ring_hom(Z81, F3, ring_hom(Z3, Z81, a)) == ring_hom(Z3, F3, a));
    RingElem x = random_elem(F3, rng), y = random_elem(F3, rng);
    CHECK(ring_hom(F3, F27, F3.mul(x, y)) == F27.mul(ring_hom(F3, F27, x), ring_hom(F3, F27, y)));
  }
}

TEST_CASE("finite enumeration is a bijection") {
  for (const auto& R : sample_rings()) {
    if (!R.is_finite()) continue;
    for (std::uint64_t i = 0; i < R.cardinality(); ++i) CHECK(R.index_of(R.element_at(i)) == i);
  }
  BaseRing F9 = BaseRing::finite_field(3, 2);
  std::size_t units = 0;
  for (std::uint64_t i = 0; i < 9; ++i) units += F9.is_unit(F9.element_at(i));
  CHECK(units == 8);
}

TEST_CASE("determinant agrees between elimination and the division-free path") {
  std::mt19937_64 rng(5);
  BaseRing Z81 = BaseRing::truncated(3, 4);
  BaseRing Z3 = BaseRing::localized({3});
  for (int t = 0; t < 50; ++t) {
    std::size_t n = 1 + rng() % 4;
    Matrix A = Matrix::zero(Z3, n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) A(i, j) = random_elem(Z3, rng);
    RingElem d = determinant(Z3, A);
    CHECK(determinant(Z81, mat_map(Z3, Z81, A)) == ring_hom(Z3, Z81, d));
    auto inv = inverse(Z81, mat_map(Z3, Z81, A));
    CHECK(inv.has_value() == Z81.is_unit(ring_hom(Z3, Z81, d)));
    if (inv) CHECK(mat_mul(Z81, *inv, mat_map(Z3, Z81, A)) == Matrix::identity(Z81, n));
  }
}

TEST_CASE("saturated kernel over a localization") {
  BaseRing Z3 = BaseRing::localized({3});
  // x + 3y = 0 has saturated kernel spanned by (-3, 1); 3x + 9y = 0 likewise.
  Matrix A = Matrix::from_rows({{Z3.from_int(3), Z3.from_int(9)}});
  auto ker = kernel_basis(Z3, A);
  REQUIRE(ker.size() == 1);
  CHECK(mat_apply(Z3, A, ker[0]) == zero_vec(Z3, 1));
  CHECK((Z3.is_unit(ker[0][0]) || Z3.is_unit(ker[0][1])));

  auto basis = span_basis(Z3, {{Z3.from_int(3), Z3.from_int(0)}, {Z3.from_int(0), Z3.from_int(9)}}, 2);
  CHECK(basis.size() == 2);
  CHECK(in_span(Z3, basis, {Z3.from_int(6), Z3.from_int(18)}));
  CHECK_FALSE(in_span(Z3, basis, {Z3.from_int(1), Z3.from_int(0)}));
  CHECK(in_span(Z3, basis, {Z3.from_int(15), Z3.from_int(0)}));
}
