#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "unitary/finite_engine.hpp"
#include "unitary/quadratic_space.hpp"

namespace unitary {

enum class OrderKind { Quaternion, Tiled, Generic };

using TiledPattern = std::vector<std::pair<long, std::vector<std::vector<int>>>>;

// Bits over Z/2 indexed by the set I of (prime, split-orthogonal component) pairs.
using Z2Vec = std::vector<int>;

struct DeclaredImage {
  long place = 0;  // 0 for the fraction field
  std::vector<Z2Vec> generators;
  std::string provenance;
};

// An order over the semilocal ring Z_(p_1, ..., p_t).
struct OrderSpec {
  OrderKind kind = OrderKind::Generic;
  std::vector<long> primes;
  // Quaternion: R + pi R x + pi R y + pi R xy in (u, v).
  mpq_class u = -1, v = -1, pi = 1;
  // Tiled: exponents per prime, with the involution.
  std::size_t n = 0;
  TiledPattern pattern;
  TiledInvolution involution = TiledInvolution::Transpose;
  // Generic.
  UnitaryRingPtr ring;
  bool declared_hereditary = false;
  // Optional data used by the rules.
  std::map<long, std::vector<AlgElem>> idempotents;  // per prime, in order coordinates
  std::vector<DeclaredImage> declared;
  std::set<std::string> disabled_rules;
};

UnitaryRingPtr build_order(const OrderSpec& spec);

struct IndexEntry {
  long prime = 0;
  std::size_t component = 0;  // index in the factorization of A tensor Q
  std::size_t deg = 0;
  std::string provenance;
};

struct DeltaImageCertificate {
  long place = 0;  // 0 for the fraction field
  std::vector<Z2Vec> generators;
  std::string rule;  // R-division, R-local-reflections, R-hereditary, R-enough-idempotents, R-brute-residue, R-declared
  std::vector<std::string> premises;
  bool lower_bound = false;  // the true image may be larger

  bool operator==(const DeltaImageCertificate& o) const {
    return place == o.place && generators == o.generators && rule == o.rule && premises == o.premises &&
           lower_bound == o.lower_bound;
  }
};

struct GenusReport {
  std::vector<IndexEntry> index_set;
  std::vector<DeltaImageCertificate> certificates;
  bool exact = false;
  std::optional<std::uint64_t> size;
  std::uint64_t divides = 1;  // the genus size always divides this power of 2
  std::size_t image_rank = 0;  // rank of the certified images
  std::vector<std::string> trace;
  std::string module_note;
};

// |gen| = 2^{|I|} / |image at F + images at the primes|.  Throws HypothesisViolated
// for p = 2 or non-unimodular q, Unsupported when I cannot be computed.
GenusReport genus_size(const OrderSpec& spec, const QuadClass& q);

// Recomputes the certificate for its place and rule; true iff it comes out equal.
bool reverify_certificate(const OrderSpec& spec, const QuadClass& q, const DeltaImageCertificate& cert);

// Standard hereditary form at every prime: exponents in {0, 1}, and after a
// simultaneous permutation m_ij = 1 exactly above the diagonal blocks.
bool hereditary_tiled_check(const TiledPattern& pattern, const std::vector<long>& primes);

struct IdempotentReport {
  bool ok = false;
  std::vector<std::string> reasons;
};

// Throws NotIdempotent when some e_j^2 != e_j.
IdempotentReport idempotent_condition_check(const OrderSpec& spec, const std::map<long, std::vector<AlgElem>>& idem);

// R[x]/(x^2 - a x - b) is a Galois (etale) quadratic extension iff a^2 + 4b is a unit.
bool second_kind_check(const BaseRing& R, const RingElem& a, const RingElem& b);
// a central modulo the radical at every prime and a - sigma(a) a unit.
bool second_kind_check(const UnitaryRing& U, const AlgElem& a);

enum class Verdict { True, False, Undecided };
const char* verdict_name(Verdict v);

struct GenusEquality {
  Verdict verdict = Verdict::Undecided;
  std::string reason;
};

// Isometric over every F_p (brute force on the reductions) and over Q.  The Q
// decision uses a witness isometry, or Hasse-Minkowski invariants when A is
// commutative of rank one with trivial involution and u = 1.
GenusEquality residue_genus_equal(const QuadClass& a, const QuadClass& b, const std::vector<long>& primes,
                                  const std::optional<AMat>& witness = std::nullopt,
                                  std::uint64_t budget = kDefaultBudget);

struct SuiteReport {
  bool passed = true;
  bool informational = false;
  std::uint64_t checked = 0;
  std::vector<std::string> counterexamples;
};

// f + f' ~ f + f'' implies f' ~ f'' for hermitian forms of ranks summing to
// at most max_rank, unimodular or not.  `informational` marks rings outside
// the hypotheses (2 not a unit or a non-field base).
SuiteReport cancellation_suite(const UnitaryRingPtr& U, std::size_t max_rank, std::uint64_t budget = kDefaultBudget);

// Quadratic forms over F_q up to max_rank: isometric over F_{q^e} implies
// isometric over F_q.  Counterexamples are listed (expected for even e).
SuiteReport springer_suite(const UnitaryRingPtr& U, int e, std::size_t max_rank,
                           std::uint64_t budget = kDefaultBudget);

}  // namespace unitary
