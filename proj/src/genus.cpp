#include "unitary/genus.hpp"

#include <algorithm>

#include "unitary/isometry.hpp"

namespace unitary {

namespace {

const char* const kDeclared = "R-declared";
const char* const kDivision = "R-division";
const char* const kHereditary = "R-hereditary";
const char* const kIdempotents = "R-enough-idempotents";
const char* const kLocalReflections = "R-local-reflections";
const char* const kBruteResidue = "R-brute-residue";

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::string bits_string(const Z2Vec& v) {
  std::string s;
  for (int b : v) s += b ? '1' : '0';
  return s;
}

// Rank over Z/2 of vectors of length <= 64.
std::size_t z2_rank(const std::vector<Z2Vec>& vs) {
  std::vector<std::uint64_t> rows;
  for (const auto& v : vs) {
    std::uint64_t x = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] & 1) x |= std::uint64_t{1} << i;
    for (auto r : rows) x = std::min(x, x ^ r);
    if (x) rows.push_back(x);
  }
  return rows.size();
}

std::vector<long> order_primes(const OrderSpec& spec) {
  if (!spec.primes.empty()) return spec.primes;
  if (spec.kind == OrderKind::Generic && spec.ring && spec.ring->base().kind() == RingKind::LocalizedIntegers)
    return spec.ring->base().primes();
  return {};
}

const std::vector<std::vector<int>>* pattern_at(const TiledPattern& pattern, long p) {
  for (const auto& [q, m] : pattern)
    if (q == p) return &m;
  return nullptr;
}

// Everything the rules share: the order, its rational algebra A_F with one
// fixed factorization, and the index set I.
struct Analysis {
  const OrderSpec* spec = nullptr;
  std::vector<long> primes;
  UnitaryRingPtr U, UF;
  QuadClass q;
  Residue rF;
  std::vector<IndexEntry> index;

  std::vector<std::size_t> coords(long p) const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < index.size(); ++k)
      if (index[k].prime == p) out.push_back(k);
    return out;
  }
  const ComponentReport& component(std::size_t i) const { return rF.factorization.components.at(i); }
};

bool split_at(const OrderSpec& spec, const ComponentReport& c, long p) {
  if (c.involution_kind == InvolutionKind::Second) return false;
  if (c.center_dimension != 1)
    fail(ErrorKind::Unsupported, "component " + std::to_string(c.index) + " of A_F has a center larger than Q");
  if (spec.kind == OrderKind::Tiled || c.deg == 1) return true;
  if (c.deg == 2) {
    QuaternionPresentation qp = quaternion_presentation(c.ring->algebra);
    return qp.split_by_nilpotent || quaternion_splits_at(qp.a, qp.b, Place::at(p));
  }
  fail(ErrorKind::Unsupported, "no splitness decision for a degree " + std::to_string(c.deg) + " component");
}

Analysis analyse(const OrderSpec& spec, const QuadClass& q) {
  Analysis a;
  a.spec = &spec;
  a.primes = order_primes(spec);
  a.U = build_order(spec);
  if (!same_ring(q.ring(), *a.U)) fail(ErrorKind::InvalidInput, "form lives over another ring than the order");
  a.q = q;
  a.UF = scalar_extend(*a.U, BaseRing::rationals());
  a.rF = make_residue(a.UF);
  SplitHint hint = spec.kind == OrderKind::Tiled ? SplitHint::Split : SplitHint::Unknown;
  for (long p : a.primes) {
    const auto& comps = a.rF.factorization.components;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const auto& c = comps[i];
      if (c.involution_kind == InvolutionKind::First && c.center_dimension != 1)
        fail(ErrorKind::Unsupported, "component " + std::to_string(i) + " of A_F has a center larger than Q");
      Classification cls;
      try {
        cls = classify_component(c, hint, Place::at(p));
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::SplitnessUndecidable) fail(ErrorKind::Unsupported, e.what());
        throw;
      }
      if (cls != Classification::SplitOrthogonal) continue;
      IndexEntry entry;
      entry.prime = p;
      entry.component = i;
      entry.deg = c.deg;
      if (c.classification == Classification::SplitOrthogonal)
        entry.provenance = "split-orthogonal over Q already";
      else if (spec.kind == OrderKind::Tiled)
        entry.provenance = "tiled order: A_F is a full matrix algebra";
      else {
        QuaternionPresentation qp = quaternion_presentation(c.ring->algebra);
        entry.provenance = "quaternion algebra (" + qp.a.get_str() + ", " + qp.b.get_str() +
                           ") splits at " + std::to_string(p);
      }
      a.index.push_back(entry);
    }
  }
  return a;
}

std::vector<Z2Vec> unit_vectors(const Analysis& a, const std::vector<std::size_t>& coords) {
  std::vector<Z2Vec> out;
  for (auto k : coords) {
    Z2Vec v(a.index.size(), 0);
    v[k] = 1;
    out.push_back(v);
  }
  return out;
}

// Image of a reflection: deg A_{K_i} mod 2 on the given coordinates.
std::vector<Z2Vec> degree_image(const Analysis& a, const std::vector<std::size_t>& coords) {
  Z2Vec v(a.index.size(), 0);
  bool nonzero = false;
  for (auto k : coords) {
    v[k] = static_cast<int>(a.index[k].deg % 2);
    nonzero = nonzero || v[k];
  }
  return nonzero ? std::vector<Z2Vec>{v} : std::vector<Z2Vec>{};
}

std::optional<DeltaImageCertificate> rule_declared(const Analysis& a, long place) {
  DeltaImageCertificate cert;
  cert.place = place;
  cert.rule = kDeclared;
  bool found = false;
  for (const auto& d : a.spec->declared) {
    if (d.place != place) continue;
    found = true;
    for (const auto& g : d.generators) {
      if (g.size() != a.index.size())
        fail(ErrorKind::InvalidInput, "declared generator has length " + std::to_string(g.size()) + ", expected " +
                                          std::to_string(a.index.size()));
      cert.generators.push_back(g);
    }
    cert.premises.push_back("declared: " + (d.provenance.empty() ? std::string("no provenance given") : d.provenance));
  }
  if (!found) return std::nullopt;
  return cert;
}

// A_F a division ring: O([f_F]) is generated by reflections, each with Delta
// equal to deg A_{K_i} mod 2 on every coordinate.
std::optional<DeltaImageCertificate> rule_division(const Analysis& a) {
  const auto& comps = a.rF.factorization.components;
  if (comps.size() != 1) return std::nullopt;
  const auto& c = comps[0];
  if (c.involution_kind != InvolutionKind::First || c.center_dimension != 1) return std::nullopt;
  DeltaImageCertificate cert;
  cert.place = 0;
  cert.rule = kDivision;
  if (c.dimension == 1) {
    cert.premises.push_back("A_F = Q is a field");
  } else if (c.deg == 2) {
    QuaternionPresentation qp = quaternion_presentation(c.ring->algebra);
    if (qp.split_by_nilpotent || !quaternion_division_over_Q(qp.a, qp.b)) return std::nullopt;
    std::vector<std::string> ram;
    for (const auto& v : relevant_places(qp.a, qp.b))
      if (!quaternion_splits_at(qp.a, qp.b, v)) ram.push_back(v.name());
    cert.premises.push_back("A_F is the quaternion algebra (" + qp.a.get_str() + ", " + qp.b.get_str() + ")");
    cert.premises.push_back("ramified at " + join(ram, ", ") + ", so A_F is a division algebra");
  } else {
    return std::nullopt;
  }
  std::vector<std::size_t> all(a.index.size());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  cert.generators = degree_image(a, all);
  return cert;
}

std::optional<DeltaImageCertificate> rule_hereditary(const Analysis& a, long p) {
  const OrderSpec& spec = *a.spec;
  DeltaImageCertificate cert;
  cert.place = p;
  cert.rule = kHereditary;
  if (spec.kind == OrderKind::Tiled) {
    if (!hereditary_tiled_check(spec.pattern, {p})) return std::nullopt;
    cert.premises.push_back("tiled pattern at " + std::to_string(p) + " is in standard hereditary form");
  } else if (spec.kind == OrderKind::Generic && spec.declared_hereditary) {
    cert.premises.push_back("hereditary at " + std::to_string(p) + " (declared by the caller)");
  } else {
    return std::nullopt;
  }
  cert.generators = unit_vectors(a, a.coords(p));
  return cert;
}

std::optional<DeltaImageCertificate> rule_idempotents(const Analysis& a, long p) {
  auto it = a.spec->idempotents.find(p);
  if (it == a.spec->idempotents.end()) return std::nullopt;
  IdempotentReport rep = idempotent_condition_check(*a.spec, {{p, it->second}});
  if (!rep.ok) return std::nullopt;
  DeltaImageCertificate cert;
  cert.place = p;
  cert.rule = kIdempotents;
  cert.premises.push_back(std::to_string(it->second.size()) + " idempotents at " + std::to_string(p) +
                          " generate A_K with local corners");
  cert.generators = unit_vectors(a, a.coords(p));
  return cert;
}

std::optional<DeltaImageCertificate> rule_local_reflections(const Analysis& a, long p) {
  Residue r = make_residue(a.U, p);
  const auto& f = r.factorization;
  if (f.components.size() != 1) return std::nullopt;
  const auto& c = f.components[0];
  if (c.deg != 1 || c.dimension != c.center_dimension) return std::nullopt;
  std::uint64_t size = c.ring->base().cardinality();
  for (std::size_t i = 1; i < c.dimension; ++i) size *= c.ring->base().cardinality();
  if (size == 2) return std::nullopt;
  if (f.split_orthogonal.size() > 1) return std::nullopt;
  if (f.split_orthogonal.size() == 1 && f.xi[0] != 1) return std::nullopt;

  DeltaImageCertificate cert;
  cert.place = p;
  cert.rule = kLocalReflections;
  cert.premises.push_back("A_S is local at " + std::to_string(p) + " with residue field of order " +
                          std::to_string(size));
  cert.premises.push_back("split-orthogonal residue components: " + std::to_string(f.split_orthogonal.size()) +
                          (f.split_orthogonal.empty() ? std::string() : ", xi = 1"));
  // Cross-check the generation statement on the residue form when it is small.
  std::size_t m = a.q.rank();
  double work = 1;
  for (std::size_t i = 0; i < m * m; ++i) work *= static_cast<double>(size);
  if (work <= 1e5) {
    ComponentForms cf = reduce_components(a.q, p);
    FiniteUnitary F(cf.forms.at(0).second.rep.ring, 1 << 12);
    GenerationReport g = verify_gen_by_reflections(F, cf.forms.at(0).second);
    if (!g.hypotheses_hold || !g.equal || g.reflection_order != g.order) return std::nullopt;
    cert.premises.push_back("residue form: reflections generate O, |O| = " + std::to_string(g.order));
  }
  cert.generators = degree_image(a, a.coords(p));
  return cert;
}

// Delta values of reflections of f over A_S with small y; a lower bound.
std::optional<DeltaImageCertificate> rule_brute_residue(const Analysis& a, long p) {
  auto coords = a.coords(p);
  if (coords.empty()) return std::nullopt;
  const UnitaryRing& U = *a.U;
  const Algebra& A = U.algebra;
  std::size_t m = a.q.rank(), n = A.rank();
  std::vector<AVec> ys;
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t j = 0; j < n; ++j) {
      AVec y(m, A.zero());
      y[s] = A.basis(j);
      ys.push_back(y);
    }
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t t = 0; t < m; ++t)
      for (std::size_t j = 0; t != s && j < n; ++j) {
        AVec y(m, A.zero());
        y[s] = A.one();
        y[t] = A.basis(j);
        ys.push_back(y);
      }
  std::vector<Z2Vec> gens;
  std::size_t evaluated = 0;
  for (const auto& y : ys) {
    AlgElem fy = form_value(a.q.rep, y, y);
    std::vector<AlgElem> cs{fy};
    for (const auto& l : U.lambda) cs.push_back(A.add(fy, l));
    for (const auto& c : cs) {
      if (!A.is_unit(c)) continue;
      AMat phi;
      try {
        phi = reflection_map(Reflection{y, c}, a.q);
      } catch (const Error&) {
        continue;
      }
      ++evaluated;
      AMat phiF = amat_map(A, BaseRing::rationals(), phi);
      Z2Vec v(a.index.size(), 0);
      for (auto k : coords) {
        std::size_t i = a.index[k].component;
        v[k] = dickson_value(a.rF.component_matrix(i, phiF), a.component(i)).delta;
      }
      std::vector<Z2Vec> trial = gens;
      trial.push_back(v);
      if (z2_rank(trial) > z2_rank(gens)) gens.push_back(v);
    }
  }
  DeltaImageCertificate cert;
  cert.place = p;
  cert.rule = kBruteResidue;
  cert.lower_bound = true;
  cert.generators = gens;
  cert.premises.push_back(std::to_string(evaluated) + " reflections of f over A_S evaluated");
  cert.premises.push_back("only reflections were used, so the image may be larger");
  return cert;
}

std::optional<DeltaImageCertificate> run_rule(const Analysis& a, long place, const std::string& rule) {
  if (rule == kDeclared) return rule_declared(a, place);
  if (place == 0) {
    if (rule == kDivision) return rule_division(a);
    return std::nullopt;
  }
  if (rule == kHereditary) return rule_hereditary(a, place);
  if (rule == kIdempotents) return rule_idempotents(a, place);
  if (rule == kLocalReflections) return rule_local_reflections(a, place);
  if (rule == kBruteResidue) return rule_brute_residue(a, place);
  return std::nullopt;
}

std::optional<DeltaImageCertificate> certify(const Analysis& a, long place) {
  static const std::vector<std::string> at_F{kDeclared, kDivision};
  static const std::vector<std::string> at_p{kDeclared, kHereditary, kIdempotents, kLocalReflections, kBruteResidue};
  for (const auto& rule : place == 0 ? at_F : at_p) {
    if (a.spec->disabled_rules.count(rule)) continue;
    if (auto cert = run_rule(a, place, rule)) return cert;
  }
  return std::nullopt;
}

void check_hypotheses(const OrderSpec& spec, const QuadClass& q) {
  for (long p : order_primes(spec))
    if (p == 2) fail(ErrorKind::HypothesisViolated, "hypothesis violated: the prime 2 is not supported");
  if (!is_unimodular(q)) fail(ErrorKind::HypothesisViolated, "hypothesis violated: q is not unimodular");
}

}  // namespace

UnitaryRingPtr build_order(const OrderSpec& spec) {
  std::vector<long> primes = order_primes(spec);
  for (long p : primes)
    if (p == 2) fail(ErrorKind::HypothesisViolated, "hypothesis violated: the prime 2 is not supported");
  switch (spec.kind) {
    case OrderKind::Quaternion: {
      if (primes.empty()) fail(ErrorKind::InvalidInput, "quaternion order needs at least one prime");
      for (long p : primes)
        if (spec.pi == 0 || valuation(spec.pi, p) < 1)
          fail(ErrorKind::InvalidInput, "pi must be divisible by " + std::to_string(p));
      return quaternion_order(BaseRing::localized(primes), spec.u, spec.v, spec.pi);
    }
    case OrderKind::Tiled: {
      if (primes.empty()) fail(ErrorKind::InvalidInput, "tiled order needs at least one prime");
      for (const auto& [p, m] : spec.pattern) {
        if (std::find(primes.begin(), primes.end(), p) == primes.end())
          fail(ErrorKind::InvalidInput, "pattern given for " + std::to_string(p) + ", which is not a base prime");
        if (m.size() != spec.n) fail(ErrorKind::InvalidInput, "pattern size differs from n");
        for (std::size_t i = 0; i < m.size(); ++i) {
          if (m[i].size() != spec.n) fail(ErrorKind::InvalidInput, "pattern size differs from n");
          for (std::size_t j = 0; j < spec.n; ++j)
            if (m[i][j] < 0 || (i == j && m[i][j] != 0))
              fail(ErrorKind::InvalidInput, "pattern needs m_ii = 0 and m_ij >= 0");
        }
      }
      return tiled_order(BaseRing::localized(primes), spec.n, spec.pattern, spec.involution);
    }
    case OrderKind::Generic: {
      if (!spec.ring) fail(ErrorKind::InvalidInput, "generic order without a ring");
      if (spec.ring->base().kind() != RingKind::LocalizedIntegers)
        fail(ErrorKind::Unsupported, "generic orders must live over localized integers");
      auto problems = check_unitary(*spec.ring);
      if (!problems.empty()) fail(ErrorKind::InvalidInput, "not a unitary ring: " + problems.front());
      return spec.ring;
    }
  }
  fail(ErrorKind::InvalidInput, "unknown order kind");
}

GenusReport genus_size(const OrderSpec& spec, const QuadClass& q) {
  check_hypotheses(spec, q);
  Analysis a = analyse(spec, q);
  GenusReport rep;
  rep.index_set = a.index;
  std::size_t k = a.index.size();
  if (k > 62) fail(ErrorKind::Unsupported, "index set too large");
  rep.module_note = "every form in the genus lives on a module isomorphic to P";
  std::vector<std::string> entries;
  for (const auto& e : a.index)
    entries.push_back("(" + std::to_string(e.prime) + ", A_F[" + std::to_string(e.component) + "], deg " +
                      std::to_string(e.deg) + ")");
  rep.trace.push_back("I = {" + join(entries, ", ") + "}, |I| = " + std::to_string(k));
  if (k == 0) {
    rep.exact = true;
    rep.size = 1;
    rep.divides = 1;
    rep.trace.push_back("I is empty, so the genus has one class");
    return rep;
  }

  bool missing = false, lower = false;
  std::vector<Z2Vec> gens;
  std::vector<long> places{0};
  places.insert(places.end(), a.primes.begin(), a.primes.end());
  for (long place : places) {
    std::string name = place == 0 ? std::string("F") : std::to_string(place);
    if (place != 0 && a.coords(place).empty()) {
      rep.trace.push_back("place " + name + ": no coordinates of I");
      continue;
    }
    auto cert = certify(a, place);
    if (!cert) {
      missing = true;
      rep.trace.push_back("place " + name + ": no rule applies, image unknown");
      continue;
    }
    std::vector<std::string> g;
    for (const auto& v : cert->generators) g.push_back(bits_string(v));
    rep.trace.push_back("place " + name + ": " + cert->rule + " gives <" + join(g, ", ") + ">" +
                        (cert->lower_bound ? " (lower bound)" : ""));
    lower = lower || cert->lower_bound;
    gens.insert(gens.end(), cert->generators.begin(), cert->generators.end());
    rep.certificates.push_back(std::move(*cert));
  }
  std::size_t r = z2_rank(gens);
  rep.image_rank = r;
  rep.divides = std::uint64_t{1} << (k - r);
  rep.exact = (!missing && !lower) || r == k;
  if (rep.exact) {
    rep.size = rep.divides;
    rep.trace.push_back("size = 2^" + std::to_string(k) + " / 2^" + std::to_string(r) + " = " +
                        std::to_string(*rep.size));
  } else {
    rep.trace.push_back("undecided: the size divides 2^" + std::to_string(k - r));
  }
  return rep;
}

bool reverify_certificate(const OrderSpec& spec, const QuadClass& q, const DeltaImageCertificate& cert) {
  try {
    check_hypotheses(spec, q);
    Analysis a = analyse(spec, q);
    auto again = run_rule(a, cert.place, cert.rule);
    return again && *again == cert;
  } catch (const Error&) {
    return false;
  }
}

bool hereditary_tiled_check(const TiledPattern& pattern, const std::vector<long>& primes) {
  for (long p : primes) {
    const auto* m = pattern_at(pattern, p);
    if (!m) continue;  // all exponents 0 at p: the maximal order
    std::size_t n = m->size();
    std::vector<int> key(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if ((*m)[i].size() != n || (*m)[i][i] != 0) return false;
      for (std::size_t j = 0; j < n; ++j) {
        if ((*m)[i][j] != 0 && (*m)[i][j] != 1) return false;
        key[i] += (*m)[i][j];
      }
    }
    // Sorting by the number of ones in a row gives the staircase order.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (((*m)[i][j] == 1) != (key[i] > key[j])) return false;
  }
  return true;
}

IdempotentReport idempotent_condition_check(const OrderSpec& spec, const std::map<long, std::vector<AlgElem>>& idem) {
  UnitaryRingPtr U = build_order(spec);
  const Algebra& A = U->algebra;
  UnitaryRingPtr UF = scalar_extend(*U, BaseRing::rationals());
  Residue rF = make_residue(UF);
  const BaseRing& Q = UF->base();
  const auto& comps = rF.factorization.components;
  IdempotentReport rep;
  if (idem.empty()) rep.reasons.push_back("no idempotents given");
  for (const auto& [p, es] : idem) {
    std::string at = " at " + std::to_string(p);
    std::vector<bool> covered(comps.size(), false);
    for (std::size_t j = 0; j < es.size(); ++j) {
      const AlgElem& e = es[j];
      if (e.size() != A.rank()) fail(ErrorKind::InvalidInput, "idempotent has the wrong length");
      if (A.mul(e, e) != e) fail(ErrorKind::NotIdempotent, "e_" + std::to_string(j) + at + " is not idempotent");
      AlgElem eF = vec_map(A.base(), Q, e);
      std::vector<std::size_t> hit;
      for (std::size_t i = 0; i < comps.size(); ++i)
        if (!comps[i].ring->algebra.is_zero(rF.to_component(i, eF))) hit.push_back(i);
      if (hit.empty()) continue;
      if (hit.size() > 1) {
        rep.reasons.push_back("e_" + std::to_string(j) + at + " meets several components, so its corner is not local");
        continue;
      }
      std::size_t i = hit[0];
      covered[i] = true;
      const auto& c = comps[i];
      const Algebra& C = c.ring->algebra;
      AlgElem pe = rF.to_component(i, eF);
      std::vector<Vec> corner;
      for (std::size_t b = 0; b < C.rank(); ++b) corner.push_back(C.mul(C.mul(pe, C.basis(b)), pe));
      std::size_t dim = span_basis(C.base(), corner, C.rank()).size();
      bool local = split_at(spec, c, p) ? dim == c.center_dimension : true;
      if (!local)
        rep.reasons.push_back("corner of e_" + std::to_string(j) + at + " has dimension " + std::to_string(dim) +
                              " in a split component, so it is not local");
    }
    for (std::size_t i = 0; i < comps.size(); ++i)
      if (!covered[i]) rep.reasons.push_back("no idempotent" + at + " meets component " + std::to_string(i));
  }
  rep.ok = rep.reasons.empty();
  return rep;
}

bool second_kind_check(const BaseRing& R, const RingElem& a, const RingElem& b) {
  RingElem d = R.add(R.mul(a, a), R.mul(R.from_int(4), b));
  return R.is_unit(d);
}

bool second_kind_check(const UnitaryRing& U, const AlgElem& a) {
  const Algebra& A = U.algebra;
  if (a.size() != A.rank()) fail(ErrorKind::InvalidInput, "element has the wrong length");
  if (!A.is_unit(A.sub(a, U.apply_sigma(a)))) return false;
  auto central = [](const Algebra& B, const AlgElem& x) {
    for (std::size_t i = 0; i < B.rank(); ++i)
      if (B.mul(x, B.basis(i)) != B.mul(B.basis(i), x)) return false;
    return true;
  };
  const BaseRing& R = A.base();
  if (R.is_field() && R.kind() != RingKind::TruncatedLocal) return central(A, a);
  std::vector<long> primes;
  if (R.kind() == RingKind::LocalizedIntegers) primes = R.primes();
  else if (R.kind() == RingKind::TruncatedLocal) primes = {R.prime()};
  else fail(ErrorKind::Unsupported, "second-kind check needs a field, localized or truncated base");
  auto ptr = std::make_shared<const UnitaryRing>(U);
  for (long p : primes) {
    Residue r = make_residue(ptr, p);
    if (!central(r.bar.ring->algebra, r.to_bar(a))) return false;
  }
  return true;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::True: return "true";
    case Verdict::False: return "false";
    case Verdict::Undecided: return "undecided";
  }
  return "?";
}

namespace {

using QMat = std::vector<std::vector<mpq_class>>;

// Diagonal entries of a congruent diagonalization of a symmetric matrix.
std::vector<mpq_class> diagonalize(QMat M) {
  std::size_t n = M.size();
  auto add_to = [&](std::size_t dst, std::size_t src) {
    for (std::size_t k = 0; k < n; ++k) M[dst][k] += M[src][k];
    for (std::size_t k = 0; k < n; ++k) M[k][dst] += M[k][src];
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (M[i][i] == 0) {
      for (std::size_t j = i + 1; j < n && M[i][i] == 0; ++j)
        if (M[j][j] != 0) {
          std::swap(M[i], M[j]);
          for (auto& row : M) std::swap(row[i], row[j]);
        }
      for (std::size_t j = i + 1; j < n && M[i][i] == 0; ++j)
        if (M[i][j] != 0) add_to(i, j);
    }
    if (M[i][i] == 0) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      mpq_class f = M[j][i] / M[i][i];
      if (f == 0) continue;
      for (std::size_t k = 0; k < n; ++k) M[j][k] -= f * M[i][k];
      for (std::size_t k = 0; k < n; ++k) M[k][j] -= f * M[k][i];
    }
  }
  std::vector<mpq_class> d;
  for (std::size_t i = 0; i < n; ++i) d.push_back(M[i][i]);
  return d;
}

bool is_rational_square(const mpq_class& x) {
  return x > 0 && mpz_perfect_square_p(x.get_num_mpz_t()) && mpz_perfect_square_p(x.get_den_mpz_t());
}

void collect_primes(mpz_class v, std::set<long>& out) {
  v = abs(v);
  for (long p = 2; v > 1; ++p) {
    if (p > 1000000) fail(ErrorKind::Unsupported, "cannot factor entries for Hasse invariants");
    if (mpz_divisible_ui_p(v.get_mpz_t(), static_cast<unsigned long>(p))) {
      out.insert(p);
      while (mpz_divisible_ui_p(v.get_mpz_t(), static_cast<unsigned long>(p))) v /= p;
    }
  }
}

int hasse(const std::vector<mpq_class>& d, Place v) {
  int h = 1;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j) h *= hilbert_symbol(d[i], d[j], v);
  return h;
}

// Hasse-Minkowski comparison of two nondegenerate symmetric forms over Q.
std::optional<std::string> rational_difference(const QMat& a, const QMat& b) {
  std::vector<mpq_class> da = diagonalize(a), db = diagonalize(b);
  mpq_class deta = 1, detb = 1;
  std::size_t nega = 0, negb = 0;
  for (const auto& x : da) {
    if (x == 0) return "degenerate over Q";
    deta *= x;
    nega += x < 0;
  }
  for (const auto& x : db) {
    if (x == 0) return "degenerate over Q";
    detb *= x;
    negb += x < 0;
  }
  if (nega != negb) return "signatures differ";
  if (!is_rational_square(deta / detb)) return "determinants differ modulo squares";
  std::set<long> primes{2};
  for (const auto* d : {&da, &db})
    for (const auto& x : *d) {
      collect_primes(x.get_num(), primes);
      collect_primes(x.get_den(), primes);
    }
  for (long p : primes)
    if (hasse(da, Place::at(p)) != hasse(db, Place::at(p))) return "Hasse invariants differ at " + std::to_string(p);
  return std::nullopt;
}

QMat rational_gram(const QuadClass& q) {
  AMat h = herm_gram(q.ring(), q.rep.gram);
  QMat M(h.rows(), std::vector<mpq_class>(h.cols()));
  for (std::size_t s = 0; s < h.rows(); ++s)
    for (std::size_t t = 0; t < h.cols(); ++t) M[s][t] = h(s, t)[0].value();
  return M;
}

}  // namespace

GenusEquality residue_genus_equal(const QuadClass& a, const QuadClass& b, const std::vector<long>& primes,
                                  const std::optional<AMat>& witness, std::uint64_t budget) {
  if (!same_ring(a.ring(), b.ring())) fail(ErrorKind::InvalidInput, "forms live over different rings");
  if (a.rank() != b.rank()) return {Verdict::False, "ranks differ"};
  bool ua = is_unimodular(a), ub = is_unimodular(b);
  if (!ua && !ub) fail(ErrorKind::InvalidInput, "neither form is unimodular");
  if (ua != ub) return {Verdict::False, "unimodularity differs"};
  if (quad_equal(a, b)) return {Verdict::True, "identical classes"};
  std::size_t m = a.rank();
  for (long p : primes) {
    BaseRing Fp = BaseRing::finite_field(p);
    QuadClass ap = scalar_extend(a, Fp), bp = scalar_extend(b, Fp);
    FiniteUnitary F(ap.rep.ring, 1 << 12);
    if (!find_isometry(F, F.from_amat(ap.rep.gram), F.from_amat(bp.rep.gram), m, budget))
      return {Verdict::False, "not isometric over F_" + std::to_string(p)};
  }
  BaseRing Q = BaseRing::rationals();
  QuadClass aQ = scalar_extend(a, Q), bQ = scalar_extend(b, Q);
  const Algebra& AQ = aQ.ring().algebra;
  if (witness) {
    if (witness->rows() != m || witness->cols() != m) fail(ErrorKind::InvalidInput, "witness has the wrong size");
    AMat w = AMat::zero(AQ, m, m);
    for (std::size_t s = 0; s < m; ++s)
      for (std::size_t t = 0; t < m; ++t) {
        if ((*witness)(s, t).size() != AQ.rank()) fail(ErrorKind::InvalidInput, "witness entry has the wrong length");
        for (std::size_t k = 0; k < AQ.rank(); ++k) w(s, t)[k] = Q.from_rational((*witness)(s, t)[k].value());
      }
    try {
      if (is_isometry(w, aQ, bQ) || is_isometry(w, bQ, aQ))
        return {Verdict::True, "isometric over every residue field and over Q (witness)"};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotInvertible) throw;
    }
    fail(ErrorKind::InvalidInput, "witness is not an isometry over Q");
  }
  const UnitaryRing& UQ = aQ.ring();
  if (UQ.rank() == 1 && UQ.sigma == Matrix::identity(Q, 1) && UQ.u == AQ.one()) {
    auto diff = rational_difference(rational_gram(aQ), rational_gram(bQ));
    if (diff) return {Verdict::False, "not isometric over Q: " + *diff};
    return {Verdict::True, "isometric over every residue field and over Q (Hasse-Minkowski)"};
  }
  return {Verdict::Undecided, "undecided at place 0"};
}

namespace {

std::string format_form(const FiniteUnitary& F, const IdxMat& g, std::size_t m) {
  const Algebra& A = F.ring().algebra;
  auto show = [&](Idx x) {
    AlgElem a = F.element(x);
    return A.rank() == 1 ? A.base().format(a[0]) : A.format(a);
  };
  bool diagonal = true;
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t t = 0; t < m; ++t)
      if (s != t && g[s * m + t] != F.zero()) diagonal = false;
  std::vector<std::string> parts;
  if (diagonal) {
    for (std::size_t s = 0; s < m; ++s) parts.push_back(show(g[s * m + s]));
    return "<" + join(parts, ", ") + ">";
  }
  for (std::size_t s = 0; s < m; ++s) {
    std::vector<std::string> row;
    for (std::size_t t = 0; t < m; ++t) row.push_back(show(g[s * m + t]));
    parts.push_back("[" + join(row, ", ") + "]");
  }
  return "[" + join(parts, ", ") + "]";
}

IdxMat block_sum(const IdxMat& x, std::size_t a, const IdxMat& y, std::size_t b) {
  std::size_t n = a + b;
  IdxMat out(n * n, 0);
  for (std::size_t s = 0; s < a; ++s)
    for (std::size_t t = 0; t < a; ++t) out[s * n + t] = x[s * a + t];
  for (std::size_t s = 0; s < b; ++s)
    for (std::size_t t = 0; t < b; ++t) out[(a + s) * n + a + t] = y[s * b + t];
  return out;
}

}  // namespace

SuiteReport cancellation_suite(const UnitaryRingPtr& U, std::size_t max_rank, std::uint64_t budget) {
  FiniteUnitary F(U, 1 << 12);
  const BaseRing& R = U->base();
  SuiteReport rep;
  rep.informational = !R.is_field() || R.characteristic() == 2;
  std::vector<FormClassification> cls(max_rank + 1);
  for (std::size_t r = 1; r <= max_rank; ++r) {
    ClassifyOptions o;
    o.flavor = Flavor::Hermitian;
    o.rank = r;
    o.budget = budget;
    cls[r] = brute_force_classify(F, o);
  }
  for (std::size_t a = 1; a < max_rank; ++a)
    for (std::size_t b = 1; a + b <= max_rank; ++b)
      for (const auto& f : cls[a].classes) {
        std::map<long, std::size_t> seen;
        for (std::size_t j = 0; j < cls[b].classes.size(); ++j) {
          ++rep.checked;
          const IdxMat& g = cls[b].classes[j].representative;
          long k = cls[a + b].find(F, block_sum(f.representative, a, g, b));
          if (k < 0) fail(ErrorKind::InvalidInput, "orthogonal sum was not classified");
          auto [it, fresh] = seen.emplace(k, j);
          if (fresh) continue;
          rep.passed = false;
          rep.counterexamples.push_back(format_form(F, f.representative, a) + " + " +
                                        format_form(F, cls[b].classes[it->second].representative, b) + " ~ " +
                                        format_form(F, f.representative, a) + " + " + format_form(F, g, b));
        }
      }
  return rep;
}

SuiteReport springer_suite(const UnitaryRingPtr& U, int e, std::size_t max_rank, std::uint64_t budget) {
  const BaseRing& R = U->base();
  if (R.kind() != RingKind::FiniteField || R.degree() != 1)
    fail(ErrorKind::Unsupported, "Springer suite needs a prime field base");
  if (e < 1) fail(ErrorKind::InvalidInput, "extension degree must be positive");
  if (U->rank() != 1 || U->sigma != Matrix::identity(R, 1) || U->u != U->algebra.one())
    fail(ErrorKind::Unsupported, "Springer suite needs (F_q, id, 1, Lambda)");
  BaseRing K = BaseRing::finite_field(R.prime(), e);
  UnitaryRingPtr UK = scalar_extend(*U, K);
  FiniteUnitary F(U, 1 << 12), FK(UK, 1 << 12);
  SuiteReport rep;
  for (std::size_t r = 1; r <= max_rank; ++r) {
    ClassifyOptions o;
    o.rank = r;
    o.budget = budget;
    FormClassification c = brute_force_classify(F, o), cK = brute_force_classify(FK, o);
    std::vector<long> image;
    for (const auto& cl : c.classes) {
      AMat x = amat_map(U->algebra, K, F.to_amat(cl.representative, r));
      image.push_back(cK.find(FK, FK.from_amat(x)));
    }
    for (std::size_t i = 0; i < image.size(); ++i)
      for (std::size_t j = i + 1; j < image.size(); ++j) {
        ++rep.checked;
        if (image[i] != image[j] || image[i] < 0) continue;
        rep.passed = false;
        rep.counterexamples.push_back(format_form(F, c.classes[i].representative, r) + " and " +
                                      format_form(F, c.classes[j].representative, r) +
                                      " become isometric over F_" + std::to_string(K.cardinality()));
      }
  }
  return rep;
}

}  // namespace unitary
