#include "unitary/arithmetic.hpp"

#include <algorithm>

#include "unitary/error.hpp"

namespace unitary {

namespace {

int vp(mpz_class& v, long p) {
  int k = 0;
  while (mpz_divisible_ui_p(v.get_mpz_t(), static_cast<unsigned long>(p))) {
    v /= p;
    ++k;
  }
  return k;
}

// Writes a nonzero rational as p^k * w with w a p-adic unit integer
// (numerator times denominator has the same square class as the fraction).
int split_valuation(const mpq_class& a, long p, mpz_class& unit) {
  mpz_class num = a.get_num(), den = a.get_den();
  int k = vp(num, p) - vp(den, p);
  unit = num * den;
  return k;
}

int mod8(const mpz_class& w) {
  mpz_class r;
  mpz_fdiv_r_ui(r.get_mpz_t(), w.get_mpz_t(), 8);
  return static_cast<int>(r.get_ui());
}

void add_prime_divisors(mpz_class n, std::vector<long>& out) {
  if (n < 0) n = -n;
  for (long d = 2; mpz_class(d) * d <= n; ++d) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(d))) {
      out.push_back(d);
      while (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(d))) n /= d;
    }
  }
  if (n > 1) {
    if (!n.fits_slong_p()) fail(ErrorKind::Unsupported, "prime factor too large");
    out.push_back(n.get_si());
  }
}

}  // namespace

int legendre(const mpz_class& a, long p) {
  if (p <= 2) fail(ErrorKind::InvalidInput, "legendre symbol needs an odd prime");
  mpz_class r, m = p, e = (p - 1) / 2;
  mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  if (r == 0) return 0;
  mpz_powm(r.get_mpz_t(), r.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
  return r == 1 ? 1 : -1;
}

int hilbert_symbol(const mpq_class& a, const mpq_class& b, Place v) {
  if (a == 0 || b == 0) fail(ErrorKind::InvalidInput, "hilbert symbol of zero");
  if (v.is_infinite()) return (a < 0 && b < 0) ? -1 : 1;
  long p = v.prime;
  mpz_class u, w;
  int alpha = split_valuation(a, p, u);
  int beta = split_valuation(b, p, w);
  if (p == 2) {
    auto eps = [](const mpz_class& x) { return ((mod8(x) - 1) / 2) % 2; };
    auto omega = [](const mpz_class& x) {
      int r = mod8(x);
      return ((r * r - 1) / 8) % 2;
    };
    int e = (eps(u) * eps(w) + alpha * omega(w) + beta * omega(u)) % 2;
    return e ? -1 : 1;
  }
  long eps_p = ((p - 1) / 2) % 2;
  int sign = ((static_cast<long>(alpha) * beta * eps_p) % 2) ? -1 : 1;
  if (beta % 2) sign *= legendre(u, p);
  if (alpha % 2) sign *= legendre(w, p);
  return sign;
}

std::vector<Place> relevant_places(const mpq_class& a, const mpq_class& b) {
  std::vector<long> primes{2};
  for (const mpq_class* x : {&a, &b}) {
    add_prime_divisors(x->get_num(), primes);
    add_prime_divisors(x->get_den(), primes);
  }
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  std::vector<Place> out{Place::infinity()};
  for (long p : primes) out.push_back(Place::at(p));
  return out;
}

bool quaternion_splits_at(const mpq_class& u, const mpq_class& v, Place place) {
  return hilbert_symbol(u, v, place) == 1;
}

bool quaternion_division_over_Q(const mpq_class& u, const mpq_class& v) {
  for (const auto& place : relevant_places(u, v))
    if (hilbert_symbol(u, v, place) == -1) return true;
  return false;
}

int conic_symbol(long a, long b, long p) {
  if (p == 2 ? (a % 2 == 0 || b % 2 == 0) : (a % p == 0 || b % p == 0))
    fail(ErrorKind::InvalidInput, "conic oracle needs unit arguments");
  // Nonzero points mod p are smooth for odd p and lift; for p = 2 a primitive
  // point mod 16 decides.
  long n = p == 2 ? 16 : p;
  auto mod = [n](long x) { return ((x % n) + n) % n; };
  std::vector<char> square(static_cast<std::size_t>(n), 0);
  for (long z = 0; z < n; ++z) square[static_cast<std::size_t>(z * z % n)] = 1;
  for (long x = 0; x < n; ++x)
    for (long y = 0; y < n; ++y) {
      long c = mod(mod(a) * (x * x % n) + mod(b) * (y * y % n));
      if (p == 2) {
        for (long z = 0; z < n; ++z)
          if ((x % 2 || y % 2 || z % 2) && z * z % n == c) return 1;
      } else if ((x || y) ? square[static_cast<std::size_t>(c)] : false) {
        return 1;
      }
    }
  return -1;
}

}  // namespace unitary
