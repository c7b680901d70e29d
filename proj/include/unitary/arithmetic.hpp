#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace unitary {

// A place of Q: a prime p, or the archimedean place (prime == 0).
struct Place {
  long prime = 0;

  static Place infinity() { return Place{0}; }
  static Place at(long p) { return Place{p}; }
  bool is_infinite() const { return prime == 0; }
  std::string name() const { return is_infinite() ? "inf" : std::to_string(prime); }
  bool operator==(const Place& o) const { return prime == o.prime; }
};

// Euler's criterion; p an odd prime.
int legendre(const mpz_class& a, long p);

// (a, b)_v for nonzero rationals.
int hilbert_symbol(const mpq_class& a, const mpq_class& b, Place v);

// Places at which (a, b) can ramify: infinity, 2 and the odd primes dividing
// a numerator or denominator.
std::vector<Place> relevant_places(const mpq_class& a, const mpq_class& b);

bool quaternion_splits_at(const mpq_class& u, const mpq_class& v, Place place);
bool quaternion_division_over_Q(const mpq_class& u, const mpq_class& v);

// Independent check of (a, b)_p for p-adic units a, b: +1 iff the conic
// z^2 = a x^2 + b y^2 has a point, found by exhaustive search modulo p
// (odd p) or 16 (p = 2).
int conic_symbol(long a, long b, long p);

}  // namespace unitary
