#include "unitary/ring_core.hpp"

#include <algorithm>
#include <sstream>

namespace unitary {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::NotInDomain: return "not in domain";
    case ErrorKind::PrecisionLoss: return "precision loss";
    case ErrorKind::NotInvertible: return "not invertible";
    case ErrorKind::NotUnit: return "c not a unit";
    case ErrorKind::NotInQuadraticValue: return "c not in f^(y)";
    case ErrorKind::BudgetExceeded: return "budget exceeded";
    case ErrorKind::HypothesisViolated: return "hypothesis violated";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::CenterFactorizationFailed: return "center factorization failed";
    case ErrorKind::SplitnessUndecidable: return "splitness undecidable";
    case ErrorKind::NotSplitOrthogonal: return "component not split-orthogonal";
    case ErrorKind::NotUnimodular: return "not unimodular";
    case ErrorKind::RankMismatch: return "rank mismatch";
    case ErrorKind::DicksonObstruction: return "Dickson obstruction";
    case ErrorKind::ResidueFieldTooSmall: return "residue field too small";
    case ErrorKind::NotIdempotent: return "not an idempotent";
  }
  return "unknown";
}

bool RingElem::operator<(const RingElem& o) const {
  if (value_ != o.value_) return value_ < o.value_;
  if (poly_ != o.poly_) return poly_ < o.poly_;
  return parts_ < o.parts_;
}

mpz_class ipow(long p, unsigned long k) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), k);
  return r;
}

int valuation(mpz_class v, long p) {
  if (v == 0) fail(ErrorKind::InvalidInput, "valuation of zero");
  int k = 0;
  while (mpz_divisible_ui_p(v.get_mpz_t(), static_cast<unsigned long>(p))) {
    v /= p;
    ++k;
  }
  return k;
}

int valuation(const mpq_class& v, long p) {
  return valuation(mpz_class(v.get_num()), p) - valuation(mpz_class(v.get_den()), p);
}

namespace {

bool is_prime(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

std::int64_t mod(std::int64_t a, std::int64_t p) {
  a %= p;
  return a < 0 ? a + p : a;
}

using Poly = std::vector<std::int64_t>;

void trim(Poly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

// Remainder of f modulo g over F_p (g nonzero).
Poly poly_rem(Poly f, const Poly& g, std::int64_t p) {
  trim(f);
  std::int64_t lead_inv = 1;
  {
    mpz_class l = g.back(), m = p, r;
    mpz_invert(r.get_mpz_t(), l.get_mpz_t(), m.get_mpz_t());
    lead_inv = r.get_si();
  }
  while (f.size() >= g.size()) {
    std::int64_t c = mod(f.back() * lead_inv, p);
    std::size_t shift = f.size() - g.size();
    for (std::size_t i = 0; i < g.size(); ++i) f[shift + i] = mod(f[shift + i] - c * g[i], p);
    trim(f);
  }
  return f;
}

bool poly_irreducible(const Poly& f, std::int64_t p) {
  int deg = static_cast<int>(f.size()) - 1;
  for (int d = 1; 2 * d <= deg; ++d) {
    std::int64_t count = 1;
    for (int i = 0; i < d; ++i) count *= p;
    for (std::int64_t idx = 0; idx < count; ++idx) {
      Poly g(d + 1, 0);
      std::int64_t t = idx;
      for (int i = 0; i < d; ++i) {
        g[i] = t % p;
        t /= p;
      }
      g[d] = 1;
      if (poly_rem(f, g, p).empty()) return false;
    }
  }
  return true;
}

Poly find_irreducible(std::int64_t p, int e) {
  std::int64_t count = 1;
  for (int i = 0; i < e; ++i) count *= p;
  for (std::int64_t idx = 0; idx < count; ++idx) {
    Poly f(e + 1, 0);
    std::int64_t t = idx;
    for (int i = 0; i < e; ++i) {
      f[i] = t % p;
      t /= p;
    }
    f[e] = 1;
    if (f[0] == 0) continue;
    if (poly_irreducible(f, p)) return f;
  }
  fail(ErrorKind::InvalidInput, "no irreducible polynomial found");
}

std::string join_primes(const std::vector<long>& ps) {
  std::ostringstream os;
  for (std::size_t i = 0; i < ps.size(); ++i) os << (i ? "," : "") << ps[i];
  return os.str();
}

}  // namespace

BaseRing BaseRing::finite_field(long p, int e) {
  if (!is_prime(p)) fail(ErrorKind::InvalidInput, "finite field characteristic must be prime");
  if (e < 1 || e > 12) fail(ErrorKind::InvalidInput, "finite field degree out of range");
  BaseRing R;
  R.kind_ = RingKind::FiniteField;
  R.p_ = p;
  R.e_ = e;
  R.pn_ = p;
  R.factors_.clear();
  if (e > 1) R.modulus_ = find_irreducible(p, e);
  return R;
}

BaseRing BaseRing::rationals() { return BaseRing(); }

BaseRing BaseRing::localized(std::vector<long> primes) {
  if (primes.empty()) fail(ErrorKind::InvalidInput, "localization needs at least one prime");
  std::sort(primes.begin(), primes.end());
  if (std::adjacent_find(primes.begin(), primes.end()) != primes.end())
    fail(ErrorKind::InvalidInput, "localization primes must be distinct");
  for (long p : primes)
    if (!is_prime(p)) fail(ErrorKind::InvalidInput, "localization at a non-prime");
  BaseRing R = rationals();
  R.kind_ = RingKind::LocalizedIntegers;
  R.primes_ = std::move(primes);
  return R;
}

BaseRing BaseRing::truncated(long p, int precision) {
  if (!is_prime(p)) fail(ErrorKind::InvalidInput, "truncated ring needs a prime");
  if (precision < 1) fail(ErrorKind::InvalidInput, "precision must be at least 1");
  BaseRing R = rationals();
  R.kind_ = RingKind::TruncatedLocal;
  R.p_ = p;
  R.n_ = precision;
  R.pn_ = ipow(p, static_cast<unsigned long>(precision));
  return R;
}

BaseRing BaseRing::product(std::vector<BaseRing> factors) {
  if (factors.empty()) fail(ErrorKind::InvalidInput, "empty product ring");
  BaseRing R = rationals();
  R.kind_ = RingKind::Product;
  R.factors_ = std::move(factors);
  return R;
}

bool BaseRing::is_field() const {
  return kind_ == RingKind::FiniteField || kind_ == RingKind::Rationals;
}

bool BaseRing::is_finite() const {
  switch (kind_) {
    case RingKind::FiniteField:
    case RingKind::TruncatedLocal: return true;
    case RingKind::Product:
      return std::all_of(factors_.begin(), factors_.end(),
                         [](const BaseRing& f) { return f.is_finite(); });
    default: return false;
  }
}

long BaseRing::characteristic() const {
  if (kind_ == RingKind::FiniteField) return p_;
  if (kind_ == RingKind::TruncatedLocal) fail(ErrorKind::Unsupported, "truncated ring characteristic is p^N");
  return 0;
}

std::string BaseRing::name() const {
  std::ostringstream os;
  switch (kind_) {
    case RingKind::FiniteField: {
      mpz_class q = ipow(p_, static_cast<unsigned long>(e_));
      os << "F" << q.get_str();
      break;
    }
    case RingKind::Rationals: os << "Q"; break;
    case RingKind::LocalizedIntegers: os << "Z_(" << join_primes(primes_) << ")"; break;
    case RingKind::TruncatedLocal: os << "Z/" << pn_.get_str(); break;
    case RingKind::Product:
      for (std::size_t i = 0; i < factors_.size(); ++i) os << (i ? "x" : "") << factors_[i].name();
      break;
  }
  return os.str();
}

bool BaseRing::operator==(const BaseRing& o) const {
  if (kind_ != o.kind_) return false;
  switch (kind_) {
    case RingKind::FiniteField: return p_ == o.p_ && e_ == o.e_;
    case RingKind::Rationals: return true;
    case RingKind::LocalizedIntegers: return primes_ == o.primes_;
    case RingKind::TruncatedLocal: return p_ == o.p_ && n_ == o.n_;
    case RingKind::Product: return factors_ == o.factors_;
  }
  return false;
}

RingElem BaseRing::reduce_integer(mpz_class v) const {
  RingElem r;
  switch (kind_) {
    case RingKind::FiniteField:
    case RingKind::TruncatedLocal: {
      mpz_class m;
      mpz_mod(m.get_mpz_t(), v.get_mpz_t(), pn_.get_mpz_t());
      if (kind_ == RingKind::FiniteField && e_ > 1) {
        r.poly_.assign(static_cast<std::size_t>(e_), 0);
        r.poly_[0] = m.get_si();
      } else {
        r.value_ = m;
      }
      return r;
    }
    case RingKind::Rationals:
    case RingKind::LocalizedIntegers: r.value_ = v; return r;
    case RingKind::Product:
      for (const auto& f : factors_) r.parts_.push_back(f.reduce_integer(v));
      return r;
  }
  return r;
}

RingElem BaseRing::zero() const { return reduce_integer(0); }
RingElem BaseRing::one() const { return reduce_integer(1); }
RingElem BaseRing::from_int(long v) const { return reduce_integer(v); }
RingElem BaseRing::from_integer(const mpz_class& v) const { return reduce_integer(v); }

RingElem BaseRing::from_rational(const mpq_class& v0) const {
  mpq_class v = v0;
  v.canonicalize();
  switch (kind_) {
    case RingKind::Rationals: return RingElem(v);
    case RingKind::LocalizedIntegers: {
      for (long p : primes_)
        if (mpz_divisible_ui_p(v.get_den_mpz_t(), static_cast<unsigned long>(p)))
          fail(ErrorKind::NotInDomain, "denominator divisible by " + std::to_string(p));
      return RingElem(v);
    }
    case RingKind::FiniteField:
    case RingKind::TruncatedLocal: {
      mpz_class den = v.get_den(), inv;
      if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), pn_.get_mpz_t()) == 0)
        fail(ErrorKind::NotInDomain, "denominator divisible by " + std::to_string(p_));
      return reduce_integer(mpz_class(v.get_num()) * inv);
    }
    case RingKind::Product: {
      RingElem r;
      for (const auto& f : factors_) r.parts_.push_back(f.from_rational(v));
      return r;
    }
  }
  return RingElem();
}

RingElem BaseRing::from_poly(std::vector<std::int64_t> coeffs) const {
  if (kind_ != RingKind::FiniteField) fail(ErrorKind::InvalidInput, "polynomial element outside a finite field");
  if (coeffs.size() > static_cast<std::size_t>(e_)) fail(ErrorKind::InvalidInput, "too many coefficients");
  coeffs.resize(static_cast<std::size_t>(e_), 0);
  for (auto& c : coeffs) c = mod(c, p_);
  if (e_ == 1) return RingElem(mpq_class(coeffs[0]));
  RingElem r;
  r.poly_ = std::move(coeffs);
  return r;
}

RingElem BaseRing::from_parts(std::vector<RingElem> parts) const {
  if (kind_ != RingKind::Product || parts.size() != factors_.size())
    fail(ErrorKind::InvalidInput, "tuple does not match product ring");
  RingElem r;
  r.parts_ = std::move(parts);
  return r;
}

RingElem BaseRing::add(const RingElem& a, const RingElem& b) const {
  switch (kind_) {
    case RingKind::FiniteField:
      if (e_ > 1) {
        RingElem r;
        r.poly_.resize(a.poly_.size());
        for (std::size_t i = 0; i < a.poly_.size(); ++i) r.poly_[i] = (a.poly_[i] + b.poly_[i]) % p_;
        return r;
      }
      return reduce_integer(mpz_class(a.value_.get_num() + b.value_.get_num()));
    case RingKind::TruncatedLocal:
      return reduce_integer(mpz_class(a.value_.get_num() + b.value_.get_num()));
    case RingKind::Rationals:
    case RingKind::LocalizedIntegers: return RingElem(mpq_class(a.value_ + b.value_));
    case RingKind::Product: {
      RingElem r;
      for (std::size_t i = 0; i < factors_.size(); ++i)
        r.parts_.push_back(factors_[i].add(a.parts_[i], b.parts_[i]));
      return r;
    }
  }
  return RingElem();
}

RingElem BaseRing::neg(const RingElem& a) const {
  switch (kind_) {
    case RingKind::FiniteField:
      if (e_ > 1) {
        RingElem r;
        r.poly_.resize(a.poly_.size());
        for (std::size_t i = 0; i < a.poly_.size(); ++i) r.poly_[i] = (p_ - a.poly_[i]) % p_;
        return r;
      }
      return reduce_integer(mpz_class(-a.value_.get_num()));
    case RingKind::TruncatedLocal: return reduce_integer(mpz_class(-a.value_.get_num()));
    case RingKind::Rationals:
    case RingKind::LocalizedIntegers: return RingElem(mpq_class(-a.value_));
    case RingKind::Product: {
      RingElem r;
      for (std::size_t i = 0; i < factors_.size(); ++i) r.parts_.push_back(factors_[i].neg(a.parts_[i]));
      return r;
    }
  }
  return RingElem();
}

RingElem BaseRing::sub(const RingElem& a, const RingElem& b) const { return add(a, neg(b)); }

RingElem BaseRing::poly_mul(const RingElem& a, const RingElem& b) const {
  std::size_t e = static_cast<std::size_t>(e_);
  std::vector<std::int64_t> prod(2 * e - 1, 0);
  for (std::size_t i = 0; i < e; ++i)
    if (a.poly_[i] != 0)
      for (std::size_t j = 0; j < e; ++j) prod[i + j] = (prod[i + j] + a.poly_[i] * b.poly_[j]) % p_;
  for (std::size_t k = prod.size(); k-- > e;) {
    std::int64_t c = prod[k];
    if (c == 0) continue;
    // x^e = -(m_0 + ... + m_{e-1} x^{e-1})
    for (std::size_t i = 0; i < e; ++i) prod[k - e + i] = mod(prod[k - e + i] - c * modulus_[i], p_);
    prod[k] = 0;
  }
  RingElem r;
  r.poly_.assign(prod.begin(), prod.begin() + static_cast<std::ptrdiff_t>(e));
  return r;
}

RingElem BaseRing::mul(const RingElem& a, const RingElem& b) const {
  switch (kind_) {
    case RingKind::FiniteField:
      if (e_ > 1) return poly_mul(a, b);
      return reduce_integer(mpz_class(a.value_.get_num() * b.value_.get_num()));
    case RingKind::TruncatedLocal: return reduce_integer(mpz_class(a.value_.get_num() * b.value_.get_num()));
    case RingKind::Rationals:
    case RingKind::LocalizedIntegers: return RingElem(mpq_class(a.value_ * b.value_));
    case RingKind::Product: {
      RingElem r;
      for (std::size_t i = 0; i < factors_.size(); ++i)
        r.parts_.push_back(factors_[i].mul(a.parts_[i], b.parts_[i]));
      return r;
    }
  }
  return RingElem();
}

RingElem BaseRing::pow(const RingElem& a, mpz_class k) const {
  if (k < 0) return pow(inverse(a), -k);
  RingElem result = one(), base = a;
  while (k > 0) {
    if (mpz_odd_p(k.get_mpz_t())) result = mul(result, base);
    base = mul(base, base);
    k >>= 1;
  }
  return result;
}

bool BaseRing::is_zero(const RingElem& a) const {
  switch (kind_) {
    case RingKind::FiniteField:
      if (e_ > 1) return std::all_of(a.poly_.begin(), a.poly_.end(), [](std::int64_t c) { return c == 0; });
      return a.value_ == 0;
    case RingKind::Product:
      for (std::size_t i = 0; i < factors_.size(); ++i)
        if (!factors_[i].is_zero(a.parts_[i])) return false;
      return true;
    default: return a.value_ == 0;
  }
}

bool BaseRing::is_unit(const RingElem& a) const {
  switch (kind_) {
    case RingKind::FiniteField:
    case RingKind::Rationals: return !is_zero(a);
    case RingKind::LocalizedIntegers:
      if (a.value_ == 0) return false;
      for (long p : primes_)
        if (mpz_divisible_ui_p(a.value_.get_num_mpz_t(), static_cast<unsigned long>(p))) return false;
      return true;
    case RingKind::TruncatedLocal:
      return !mpz_divisible_ui_p(a.value_.get_num_mpz_t(), static_cast<unsigned long>(p_));
    case RingKind::Product:
      for (std::size_t i = 0; i < factors_.size(); ++i)
        if (!factors_[i].is_unit(a.parts_[i])) return false;
      return true;
  }
  return false;
}

RingElem BaseRing::inverse(const RingElem& a) const {
  if (!is_unit(a)) fail(ErrorKind::NotInvertible, "element " + format(a) + " is not a unit in " + name());
  switch (kind_) {
    case RingKind::FiniteField:
      if (e_ > 1) return pow(a, ipow(p_, static_cast<unsigned long>(e_)) - 2);
      [[fallthrough]];
    case RingKind::TruncatedLocal: {
      mpz_class r, v = a.value_.get_num();
      mpz_invert(r.get_mpz_t(), v.get_mpz_t(), pn_.get_mpz_t());
      return reduce_integer(r);
    }
    case RingKind::Rationals:
    case RingKind::LocalizedIntegers: return RingElem(mpq_class(1 / a.value_));
    case RingKind::Product: {
      RingElem r;
      for (std::size_t i = 0; i < factors_.size(); ++i) r.parts_.push_back(factors_[i].inverse(a.parts_[i]));
      return r;
    }
  }
  return RingElem();
}

bool BaseRing::contains(const RingElem& a) const {
  switch (kind_) {
    case RingKind::FiniteField:
      if (e_ > 1) {
        if (a.poly_.size() != static_cast<std::size_t>(e_)) return false;
        return std::all_of(a.poly_.begin(), a.poly_.end(), [&](std::int64_t c) { return c >= 0 && c < p_; });
      }
      [[fallthrough]];
    case RingKind::TruncatedLocal:
      return a.poly_.empty() && a.parts_.empty() && a.value_.get_den() == 1 && a.value_ >= 0 &&
             a.value_ < pn_;
    case RingKind::Rationals: return a.poly_.empty() && a.parts_.empty();
    case RingKind::LocalizedIntegers:
      if (!a.poly_.empty() || !a.parts_.empty()) return false;
      for (long p : primes_)
        if (mpz_divisible_ui_p(a.value_.get_den_mpz_t(), static_cast<unsigned long>(p))) return false;
      return true;
    case RingKind::Product:
      if (a.parts_.size() != factors_.size()) return false;
      for (std::size_t i = 0; i < factors_.size(); ++i)
        if (!factors_[i].contains(a.parts_[i])) return false;
      return true;
  }
  return false;
}

std::uint64_t BaseRing::cardinality() const {
  switch (kind_) {
    case RingKind::FiniteField:
      return ipow(p_, static_cast<unsigned long>(e_)).get_ui();
    case RingKind::TruncatedLocal: return pn_.get_ui();
    case RingKind::Product: {
      std::uint64_t c = 1;
      for (const auto& f : factors_) c *= f.cardinality();
      return c;
    }
    default: fail(ErrorKind::Unsupported, name() + " is infinite");
  }
}

RingElem BaseRing::element_at(std::uint64_t index) const {
  switch (kind_) {
    case RingKind::FiniteField:
      if (e_ > 1) {
        std::vector<std::int64_t> c(static_cast<std::size_t>(e_));
        for (auto& x : c) {
          x = static_cast<std::int64_t>(index % static_cast<std::uint64_t>(p_));
          index /= static_cast<std::uint64_t>(p_);
        }
        return from_poly(c);
      }
      [[fallthrough]];
    case RingKind::TruncatedLocal: return reduce_integer(mpz_class(static_cast<unsigned long>(index)));
    case RingKind::Product: {
      RingElem r;
      for (const auto& f : factors_) {
        std::uint64_t c = f.cardinality();
        r.parts_.push_back(f.element_at(index % c));
        index /= c;
      }
      return r;
    }
    default: fail(ErrorKind::Unsupported, name() + " is infinite");
  }
}

std::uint64_t BaseRing::index_of(const RingElem& a) const {
  switch (kind_) {
    case RingKind::FiniteField:
      if (e_ > 1) {
        std::uint64_t idx = 0;
        for (std::size_t i = a.poly_.size(); i-- > 0;) idx = idx * static_cast<std::uint64_t>(p_) + static_cast<std::uint64_t>(a.poly_[i]);
        return idx;
      }
      [[fallthrough]];
    case RingKind::TruncatedLocal: return mpz_class(a.value_.get_num()).get_ui();
    case RingKind::Product: {
      std::uint64_t idx = 0, scale = 1;
      for (std::size_t i = 0; i < factors_.size(); ++i) {
        idx += scale * factors_[i].index_of(a.parts_[i]);
        scale *= factors_[i].cardinality();
      }
      return idx;
    }
    default: fail(ErrorKind::Unsupported, name() + " is infinite");
  }
}

std::string BaseRing::format(const RingElem& a) const {
  std::ostringstream os;
  if (kind_ == RingKind::Product) {
    os << "(";
    for (std::size_t i = 0; i < factors_.size(); ++i) os << (i ? "," : "") << factors_[i].format(a.parts_[i]);
    os << ")";
  } else if (kind_ == RingKind::FiniteField && e_ > 1) {
    os << "[";
    for (std::size_t i = 0; i < a.poly_.size(); ++i) os << (i ? "," : "") << a.poly_[i];
    os << "]";
  } else {
    os << a.value_.get_str();
  }
  return os.str();
}

bool ring_hom_supported(const BaseRing& src, const BaseRing& dst) {
  if (src == dst) return true;
  if (dst.kind() == RingKind::Product) {
    return std::all_of(dst.factors().begin(), dst.factors().end(),
                       [&](const BaseRing& f) { return ring_hom_supported(src, f); });
  }
  switch (src.kind()) {
    case RingKind::Rationals:
    case RingKind::LocalizedIntegers:
      return dst.kind() != RingKind::Product;
    case RingKind::TruncatedLocal:
      if (dst.kind() == RingKind::TruncatedLocal) return dst.prime() == src.prime() && dst.precision() <= src.precision();
      return dst.kind() == RingKind::FiniteField && dst.prime() == src.prime();
    case RingKind::FiniteField:
      return dst.kind() == RingKind::FiniteField && dst.prime() == src.prime() && src.degree() == 1;
    case RingKind::Product: return false;
  }
  return false;
}

RingElem ring_hom(const BaseRing& src, const BaseRing& dst, const RingElem& x) {
  if (src == dst) return x;
  if (!ring_hom_supported(src, dst))
    fail(ErrorKind::Unsupported, "no canonical homomorphism " + src.name() + " -> " + dst.name());
  if (dst.kind() == RingKind::Product) {
    std::vector<RingElem> parts;
    for (const auto& f : dst.factors()) parts.push_back(ring_hom(src, f, x));
    return dst.from_parts(std::move(parts));
  }
  switch (src.kind()) {
    case RingKind::Rationals:
    case RingKind::LocalizedIntegers: return dst.from_rational(x.value());
    case RingKind::TruncatedLocal:
    case RingKind::FiniteField: return dst.from_integer(mpz_class(x.value().get_num()));
    case RingKind::Product: break;
  }
  fail(ErrorKind::Unsupported, "no canonical homomorphism");
}

// ---------------------------------------------------------------- matrices

Matrix Matrix::identity(const BaseRing& R, std::size_t n) {
  Matrix m = zero(R, n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = R.one();
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vec>& rows) {
  if (rows.empty()) return Matrix();
  Matrix m(rows.size(), rows[0].size(), RingElem());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols_) fail(ErrorKind::InvalidInput, "ragged matrix rows");
    for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Matrix Matrix::from_columns(const std::vector<Vec>& cols, std::size_t height) {
  Matrix m(height, cols.size(), RingElem());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].size() != height) fail(ErrorKind::InvalidInput, "ragged matrix columns");
    for (std::size_t i = 0; i < height; ++i) m(i, j) = cols[j][i];
  }
  return m;
}

Vec Matrix::row(std::size_t i) const {
  return Vec(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
             data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

Vec Matrix::column(std::size_t j) const {
  Vec v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

Vec zero_vec(const BaseRing& R, std::size_t n) { return Vec(n, R.zero()); }

Vec unit_vec(const BaseRing& R, std::size_t n, std::size_t i) {
  Vec v = zero_vec(R, n);
  v[i] = R.one();
  return v;
}

Vec vec_add(const BaseRing& R, const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = R.add(a[i], b[i]);
  return r;
}

Vec vec_sub(const BaseRing& R, const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = R.sub(a[i], b[i]);
  return r;
}

Vec vec_neg(const BaseRing& R, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = R.neg(a[i]);
  return r;
}

Vec vec_scale(const BaseRing& R, const RingElem& c, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = R.mul(c, a[i]);
  return r;
}

bool vec_is_zero(const BaseRing& R, const Vec& a) {
  return std::all_of(a.begin(), a.end(), [&](const RingElem& x) { return R.is_zero(x); });
}

Vec vec_map(const BaseRing& src, const BaseRing& dst, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = ring_hom(src, dst, a[i]);
  return r;
}

Matrix mat_mul(const BaseRing& R, const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) fail(ErrorKind::InvalidInput, "matrix product dimension mismatch");
  Matrix c = Matrix::zero(R, a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (R.is_zero(a(i, k))) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) = R.add(c(i, j), R.mul(a(i, k), b(k, j)));
    }
  return c;
}

Matrix mat_add(const BaseRing& R, const Matrix& a, const Matrix& b) {
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = R.add(a(i, j), b(i, j));
  return c;
}

Matrix mat_sub(const BaseRing& R, const Matrix& a, const Matrix& b) {
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = R.sub(a(i, j), b(i, j));
  return c;
}

Matrix mat_scale(const BaseRing& R, const RingElem& s, const Matrix& a) {
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = R.mul(s, a(i, j));
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows(), RingElem());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Vec mat_apply(const BaseRing& R, const Matrix& a, const Vec& v) {
  Vec r = zero_vec(R, a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (!R.is_zero(v[j])) r[i] = R.add(r[i], R.mul(a(i, j), v[j]));
  return r;
}

Matrix mat_map(const BaseRing& src, const BaseRing& dst, const Matrix& a) {
  Matrix r(a.rows(), a.cols(), RingElem());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = ring_hom(src, dst, a(i, j));
  return r;
}

// ---------------------------------------------------------- linear algebra

namespace {

// Arithmetic domain used for elimination: localized integers are handled in Q.
BaseRing elimination_ring(const BaseRing& R) {
  if (R.kind() == RingKind::LocalizedIntegers) return BaseRing::rationals();
  if (R.kind() == RingKind::Product) fail(ErrorKind::Unsupported, "linear algebra over a product ring");
  return R;
}

struct Echelon {
  Matrix m;
  std::vector<std::size_t> pivot_cols;
};

// Reduced row echelon form on the first `ncols` columns.  Pivots are units;
// a column whose remaining entries are nonzero non-units raises PrecisionLoss.
Echelon row_reduce(const BaseRing& K, Matrix m, std::size_t ncols) {
  Echelon out;
  std::size_t r = 0;
  for (std::size_t c = 0; c < ncols && r < m.rows(); ++c) {
    std::size_t piv = m.rows();
    bool nonunit_seen = false;
    for (std::size_t i = r; i < m.rows(); ++i) {
      if (K.is_zero(m(i, c))) continue;
      if (K.is_unit(m(i, c))) {
        piv = i;
        break;
      }
      nonunit_seen = true;
    }
    if (piv == m.rows()) {
      if (nonunit_seen)
        fail(ErrorKind::PrecisionLoss, "no unit pivot in column " + std::to_string(c) + " over " + K.name());
      continue;
    }
    if (piv != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(r, j));
    RingElem inv = K.inverse(m(r, c));
    for (std::size_t j = 0; j < m.cols(); ++j) m(r, j) = K.mul(inv, m(r, j));
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || K.is_zero(m(i, c))) continue;
      RingElem f = m(i, c);
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (!K.is_zero(m(r, j))) m(i, j) = K.sub(m(i, j), K.mul(f, m(r, j)));
    }
    out.pivot_cols.push_back(c);
    ++r;
  }
  out.m = std::move(m);
  return out;
}

std::vector<Vec> kernel_from_echelon(const BaseRing& K, const Echelon& e, std::size_t ncols) {
  std::vector<Vec> ker;
  std::vector<bool> is_pivot(ncols, false);
  for (auto c : e.pivot_cols) is_pivot[c] = true;
  for (std::size_t f = 0; f < ncols; ++f) {
    if (is_pivot[f]) continue;
    Vec v = zero_vec(K, ncols);
    v[f] = K.one();
    for (std::size_t r = 0; r < e.pivot_cols.size(); ++r) v[e.pivot_cols[r]] = K.neg(e.m(r, f));
    ker.push_back(std::move(v));
  }
  return ker;
}

struct Bezout {
  mpz_class g, s, t;
};

Bezout bezout(const mpz_class& a, const mpz_class& b) {
  Bezout r;
  mpz_gcdext(r.g.get_mpz_t(), r.s.get_mpz_t(), r.t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

// Saturated kernel over a localization of Z via unimodular column operations.
std::vector<Vec> kernel_localized(const BaseRing& R, const Matrix& A) {
  std::size_t n = A.cols();
  std::vector<std::vector<mpq_class>> M(A.rows(), std::vector<mpq_class>(n));
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < n; ++j) M[i][j] = A(i, j).value();
  std::vector<std::vector<mpq_class>> U(n, std::vector<mpq_class>(n, 0));
  for (std::size_t j = 0; j < n; ++j) U[j][j] = 1;
  auto col_op = [&](std::size_t k, std::size_t j, const mpq_class& a, const mpq_class& b,
                    const mpq_class& c, const mpq_class& d) {
    // (col_k, col_j) <- (a col_k + b col_j, c col_k + d col_j)
    for (auto* mat : {&M, &U})
      for (auto& row : *mat) {
        mpq_class x = row[k], y = row[j];
        row[k] = a * x + b * y;
        row[j] = c * x + d * y;
      }
  };
  std::size_t k = 0;
  for (std::size_t i = 0; i < M.size() && k < n; ++i) {
    for (std::size_t j = k + 1; j < n; ++j) {
      if (M[i][j] == 0) continue;
      if (M[i][k] == 0) {
        col_op(k, j, 0, 1, 1, 0);
        continue;
      }
      const mpq_class a = M[i][k], b = M[i][j];
      Bezout bz = bezout(a.get_num(), b.get_num());
      mpq_class s = bz.s * mpq_class(a.get_den()), t = bz.t * mpq_class(b.get_den());
      mpq_class g(bz.g);
      col_op(k, j, s, t, -b / g, a / g);
    }
    if (M[i][k] != 0) ++k;
  }
  std::vector<Vec> ker;
  for (std::size_t j = k; j < n; ++j) {
    Vec v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = R.from_rational(U[i][j]);
    ker.push_back(std::move(v));
  }
  return ker;
}

}  // namespace

SolveResult solve_linear(const BaseRing& R, const Matrix& A, const Vec& b) {
  if (b.size() != A.rows()) fail(ErrorKind::InvalidInput, "right-hand side has wrong length");
  BaseRing K = elimination_ring(R);
  Matrix aug(A.rows(), A.cols() + 1, K.zero());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) aug(i, j) = A(i, j);
    aug(i, A.cols()) = b[i];
  }
  Echelon e = row_reduce(K, aug, A.cols());
  SolveResult res;
  for (std::size_t i = e.pivot_cols.size(); i < aug.rows(); ++i)
    if (!K.is_zero(e.m(i, A.cols()))) return res;
  res.consistent = true;
  res.particular = zero_vec(K, A.cols());
  for (std::size_t r = 0; r < e.pivot_cols.size(); ++r) res.particular[e.pivot_cols[r]] = e.m(r, A.cols());
  res.kernel = kernel_from_echelon(K, e, A.cols());
  return res;
}

std::vector<Vec> kernel_basis(const BaseRing& R, const Matrix& A) {
  if (A.cols() == 0) return {};
  if (R.kind() == RingKind::LocalizedIntegers) return kernel_localized(R, A);
  BaseRing K = elimination_ring(R);
  Echelon e = row_reduce(K, A, A.cols());
  return kernel_from_echelon(K, e, A.cols());
}

std::size_t rank(const BaseRing& R, const Matrix& A) {
  BaseRing K = elimination_ring(R);
  if (!K.is_field()) fail(ErrorKind::Unsupported, "rank over a non-field");
  return row_reduce(K, A, A.cols()).pivot_cols.size();
}

std::vector<Vec> span_basis(const BaseRing& R, const std::vector<Vec>& gens, std::size_t dim) {
  std::vector<Vec> nonzero;
  for (const auto& g : gens)
    if (!vec_is_zero(R, g)) nonzero.push_back(g);
  if (nonzero.empty()) return {};
  if (R.kind() == RingKind::LocalizedIntegers) {
    // Row Hermite reduction with Bezout steps on integer numerators.
    std::vector<std::vector<mpq_class>> rows;
    for (const auto& g : nonzero) {
      std::vector<mpq_class> r(dim);
      for (std::size_t j = 0; j < dim; ++j) r[j] = g[j].value();
      rows.push_back(std::move(r));
    }
    std::size_t top = 0;
    for (std::size_t c = 0; c < dim && top < rows.size(); ++c) {
      for (std::size_t i = top + 1; i < rows.size(); ++i) {
        if (rows[i][c] == 0) continue;
        if (rows[top][c] == 0) {
          std::swap(rows[top], rows[i]);
          continue;
        }
        const mpq_class a = rows[top][c], b = rows[i][c];
        Bezout bz = bezout(a.get_num(), b.get_num());
        mpq_class s = bz.s * mpq_class(a.get_den()), t = bz.t * mpq_class(b.get_den());
        mpq_class g(bz.g);
        for (std::size_t j = 0; j < dim; ++j) {
          mpq_class x = rows[top][j], y = rows[i][j];
          rows[top][j] = s * x + t * y;
          rows[i][j] = (-b / g) * x + (a / g) * y;
        }
      }
      if (rows[top][c] != 0) ++top;
    }
    std::vector<Vec> out;
    for (std::size_t i = 0; i < top; ++i) {
      Vec v(dim);
      for (std::size_t j = 0; j < dim; ++j) v[j] = R.from_rational(rows[i][j]);
      out.push_back(std::move(v));
    }
    return out;
  }
  BaseRing K = elimination_ring(R);
  try {
    Echelon e = row_reduce(K, Matrix::from_rows(nonzero), dim);
    std::vector<Vec> out;
    for (std::size_t r = 0; r < e.pivot_cols.size(); ++r) out.push_back(e.m.row(r));
    return out;
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::PrecisionLoss) throw;
    return nonzero;
  }
}

std::optional<Vec> span_coordinates(const BaseRing& R, const std::vector<Vec>& basis, const Vec& v) {
  if (basis.empty()) {
    if (vec_is_zero(R, v)) return Vec{};
    return std::nullopt;
  }
  Matrix A = Matrix::from_columns(basis, v.size());
  SolveResult s = solve_linear(R, A, v);
  if (!s.consistent) return std::nullopt;
  if (R.kind() == RingKind::LocalizedIntegers) {
    Vec out;
    for (const auto& x : s.particular) {
      if (!R.contains(x)) return std::nullopt;
      out.push_back(x);
    }
    return out;
  }
  return s.particular;
}

bool in_span(const BaseRing& R, const std::vector<Vec>& basis, const Vec& v) {
  return span_coordinates(R, basis, v).has_value();
}

namespace {

RingElem berkowitz_det(const BaseRing& R, const Matrix& A) {
  std::size_t n = A.rows();
  if (n == 0) return R.one();
  std::vector<RingElem> vec{R.one(), R.neg(A(n - 1, n - 1))};
  for (std::size_t k = n - 1; k-- > 0;) {
    std::size_t s = n - 1 - k;
    std::vector<RingElem> t(s + 2, R.zero());
    t[0] = R.one();
    t[1] = R.neg(A(k, k));
    // powers M^j C, with M the trailing block and C the column below (k,k)
    Vec mc(s);
    for (std::size_t i = 0; i < s; ++i) mc[i] = A(k + 1 + i, k);
    for (std::size_t j = 2; j <= s + 1; ++j) {
      RingElem acc = R.zero();
      for (std::size_t i = 0; i < s; ++i) acc = R.add(acc, R.mul(A(k, k + 1 + i), mc[i]));
      t[j] = R.neg(acc);
      Vec next(s, R.zero());
      for (std::size_t i = 0; i < s; ++i)
        for (std::size_t l = 0; l < s; ++l) next[i] = R.add(next[i], R.mul(A(k + 1 + i, k + 1 + l), mc[l]));
      mc = std::move(next);
    }
    std::vector<RingElem> nv(s + 2, R.zero());
    for (std::size_t i = 0; i < s + 2; ++i)
      for (std::size_t j = 0; j <= std::min(i, s); ++j) nv[i] = R.add(nv[i], R.mul(t[i - j], vec[j]));
    vec = std::move(nv);
  }
  return n % 2 ? R.neg(vec[n]) : vec[n];
}

}  // namespace

RingElem determinant(const BaseRing& R, const Matrix& A) {
  if (A.rows() != A.cols()) fail(ErrorKind::InvalidInput, "determinant of a non-square matrix");
  if (!(R.is_field() || R.kind() == RingKind::LocalizedIntegers)) return berkowitz_det(R, A);
  BaseRing K = elimination_ring(R);
  Matrix m = A;
  RingElem det = K.one();
  std::size_t n = m.rows();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = n;
    for (std::size_t i = c; i < n; ++i)
      if (!K.is_zero(m(i, c))) {
        piv = i;
        break;
      }
    if (piv == n) return R.zero();
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(c, j));
      det = K.neg(det);
    }
    det = K.mul(det, m(c, c));
    RingElem inv = K.inverse(m(c, c));
    for (std::size_t i = c + 1; i < n; ++i) {
      if (K.is_zero(m(i, c))) continue;
      RingElem f = K.mul(m(i, c), inv);
      for (std::size_t j = c; j < n; ++j) m(i, j) = K.sub(m(i, j), K.mul(f, m(c, j)));
    }
  }
  return det;
}

std::optional<Matrix> inverse(const BaseRing& R, const Matrix& A) {
  if (A.rows() != A.cols()) fail(ErrorKind::InvalidInput, "inverse of a non-square matrix");
  std::size_t n = A.rows();
  BaseRing K = elimination_ring(R);
  Matrix aug = Matrix::zero(K, n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = A(i, j);
    aug(i, n + i) = K.one();
  }
  Echelon e;
  try {
    e = row_reduce(K, aug, n);
  } catch (const Error& err) {
    // Over a local ring a column without unit entries is singular mod p.
    if (err.kind() == ErrorKind::PrecisionLoss) return std::nullopt;
    throw;
  }
  if (e.pivot_cols.size() != n) return std::nullopt;
  Matrix inv(n, n, RingElem());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      inv(i, j) = e.m(i, n + j);
      if (!R.contains(inv(i, j))) return std::nullopt;
    }
  return inv;
}

}  // namespace unitary
