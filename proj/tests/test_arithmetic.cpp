#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "unitary/arithmetic.hpp"
#include "unitary/error.hpp"

using namespace unitary;

namespace {

bool is_odd_prime(long p) {
  if (p < 3 || p % 2 == 0) return false;
  for (long d = 3; d * d <= p; d += 2)
    if (p % d == 0) return false;
  return true;
}

long modp(long a, long m) { return ((a % m) + m) % m; }

// Nontrivial solution of z^2 = a x^2 + b y^2 over F_p, by exhaustion.
bool conic_has_point(long a, long b, long p) {
  for (long x = 0; x < p; ++x)
    for (long y = 0; y < p; ++y)
      for (long z = 0; z < p; ++z) {
        if (x == 0 && y == 0 && z == 0) continue;
        if (modp(z * z - a * x * x - b * y * y, p) == 0) return true;
      }
  return false;
}

// Primitive solution modulo p^2; decides local solvability at odd p when both
// arguments have valuation at most 1 (Hensel lifting from a simple zero).
bool primitive_point_mod_p2(long a, long b, long p) {
  long m = p * p;
  for (long x = 0; x < m; ++x)
    for (long y = 0; y < m; ++y)
      for (long z = 0; z < m; ++z) {
        if (x % p == 0 && y % p == 0 && z % p == 0) continue;
        if (modp(z * z - a * x * x - b * y * y, m) == 0) return true;
      }
  return false;
}

}  // namespace

TEST_CASE("legendre examples") {
  CHECK(legendre(2, 7) == 1);
  CHECK(legendre(3, 7) == -1);
  CHECK(legendre(7, 7) == 0);
  CHECK(legendre(-1, 5) == 1);
  CHECK(legendre(-1, 7) == -1);
}

TEST_CASE("hilbert symbol examples") {
  CHECK(hilbert_symbol(-1, -1, Place::infinity()) == -1);
  CHECK(hilbert_symbol(-1, -1, Place::at(3)) == 1);
  CHECK(hilbert_symbol(-1, -1, Place::at(2)) == -1);
  CHECK(hilbert_symbol(2, 3, Place::at(3)) == -1);
  CHECK(hilbert_symbol(mpq_class(1, 3), 2, Place::at(3)) == -1);
}

TEST_CASE("unit pairs agree with the conic point count for p <= 50") {
  for (long p = 3; p <= 50; ++p) {
    if (!is_odd_prime(p)) continue;
    for (long a = 1; a < p; ++a)
      for (long b = 1; b < p; ++b) {
        int expected = conic_has_point(a, b, p) ? 1 : -1;
        CHECK(hilbert_symbol(a, b, Place::at(p)) == expected);
      }
  }
}

TEST_CASE("valuation-one arguments agree with the mod p^2 oracle") {
  for (long p : {3L, 5L, 7L}) {
    std::vector<long> reps;
    for (long u = 1; u < p; ++u) {
      reps.push_back(u);
      reps.push_back(p * u);
    }
    for (long a : reps)
      for (long b : reps) {
        int expected = primitive_point_mod_p2(a, b, p) ? 1 : -1;
        CAPTURE(p);
        CAPTURE(a);
        CAPTURE(b);
        CHECK(hilbert_symbol(a, b, Place::at(p)) == expected);
      }
  }
}

TEST_CASE("product formula, symmetry and bilinearity on random inputs") {
  std::mt19937_64 rng(2024);
  auto random_rational = [&]() {
    long num = 0;
    while (num == 0) num = static_cast<long>(rng() % 401) - 200;
    long den = static_cast<long>(rng() % 30) + 1;
    return mpq_class(num, den);
  };
  for (int i = 0; i < 500; ++i) {
    mpq_class a = random_rational(), b = random_rational(), c = random_rational();
    int prod = 1;
    for (const auto& v : relevant_places(a, b)) prod *= hilbert_symbol(a, b, v);
    CHECK(prod == 1);
    for (const auto& v : relevant_places(a * c, b)) {
      CHECK(hilbert_symbol(a, b, v) == hilbert_symbol(b, a, v));
      CHECK(hilbert_symbol(a * c, b, v) == hilbert_symbol(a, b, v) * hilbert_symbol(c, b, v));
    }
  }
}

TEST_CASE("quaternion splitting") {
  CHECK(quaternion_division_over_Q(-1, -1));
  CHECK(quaternion_splits_at(-1, -1, Place::at(3)));
  CHECK_FALSE(quaternion_splits_at(-1, -1, Place::infinity()));
  for (long v : {-7L, -3L, 2L, 5L, 30L}) {
    CHECK_FALSE(quaternion_division_over_Q(1, v));
    for (const auto& place : relevant_places(1, v)) CHECK(quaternion_splits_at(1, v, place));
  }
}

TEST_CASE("conic search agrees with the Hilbert symbol on units") {
  for (long p : {2L, 3L, 5L, 7L, 11L, 13L}) {
    long n = p == 2 ? 8 : p;
    for (long a = 1; a < n; ++a)
      for (long b = 1; b < n; ++b) {
        if (a % p == 0 || b % p == 0) continue;
        CHECK(conic_symbol(a, b, p) == hilbert_symbol(a, b, Place::at(p)));
        CHECK(conic_symbol(-a, b, p) == hilbert_symbol(-a, b, Place::at(p)));
      }
  }
  CHECK(conic_symbol(-1, -1, 2) == -1);
  CHECK(conic_symbol(3, 3, 2) == -1);
  CHECK(conic_symbol(3, 5, 2) == 1);
  CHECK_THROWS_AS(conic_symbol(3, 1, 3), Error);
}
