#include <openssl/evp.h>

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "spec_io.hpp"
#include "unitary/isometry.hpp"
#include "unitary/transfer.hpp"

#ifndef UFORMS_VERSION
#define UFORMS_VERSION "dev"
#endif

using namespace unitary;
using uforms::json;

namespace {

enum Exit { kPass = 0, kVerdictFail = 1, kUsage = 2, kBudget = 3 };

struct Job {
  std::string command;
  std::string spec_path;
  std::string ring = "F3";
  std::string form;
  std::string flavor = "quadratic";
  std::size_t rank = 1;
  int precision = 4;
  std::uint64_t budget = kDefaultBudget;
  std::string format = "json";
  std::uint64_t seed = 1;
  int degree = 3;
  std::size_t count = 100;
  long bound = 50;
  std::size_t samples = 500;
  bool unimodular = false;
  std::string spec_text;

  json config() const {
    return {{"command", command}, {"spec", spec_path}, {"ring", ring},       {"form", form},
            {"flavor", flavor},   {"rank", rank},      {"precision", precision}, {"budget", budget},
            {"seed", seed},       {"degree", degree},  {"count", count},     {"bound", bound},
            {"samples", samples}, {"unimodular", unimodular}};
  }
};

struct Outcome {
  json result;
  bool pass = true;
};

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

void render_text(std::ostream& os, const json& j, const std::string& indent) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (v.is_structured() && !v.empty() && !(v.is_array() && !v[0].is_structured())) {
        os << indent << k << ":\n";
        render_text(os, v, indent + "  ");
      } else {
        os << indent << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
      }
    }
  } else if (j.is_array()) {
    for (const auto& v : j) {
      if (v.is_object()) {
        os << indent << "-\n";
        render_text(os, v, indent + "  ");
      } else {
        os << indent << "- " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
      }
    }
  } else {
    os << indent << j.dump() << "\n";
  }
}

void emit(const Job& job, const json& report) {
  if (job.format == "text") render_text(std::cout, report, "");
  else std::cout << report.dump(2) << "\n";
}

json envelope(const Job& job) {
  return {{"tool", "uforms"},
          {"version", UFORMS_VERSION},
          {"command", job.command},
          {"config", job.config()},
          {"input_sha256", sha256_hex(job.config().dump() + "\n" + job.spec_text)}};
}

// ------------------------------------------------------------------ commands

Outcome run_classify(const Job& job) {
  UnitaryRingPtr U = uforms::ring_by_name(job.ring);
  FiniteUnitary F(U, 1 << 12);
  ClassifyOptions o;
  if (job.flavor == "hermitian") o.flavor = Flavor::Hermitian;
  else if (job.flavor != "quadratic") fail(ErrorKind::InvalidInput, "--flavor must be quadratic or hermitian");
  o.rank = job.rank;
  o.unimodular_only = job.unimodular;
  o.budget = job.budget;
  FormClassification c = brute_force_classify(F, o);
  json classes = json::array();
  std::size_t uni = 0;
  for (const auto& cl : c.classes) {
    uni += cl.unimodular;
    classes.push_back({{"representative", uforms::amat_json(U->algebra, F.to_amat(cl.representative, job.rank))},
                       {"orbit_size", cl.orbit_size},
                       {"stabilizer_size", cl.stabilizer_size},
                       {"unimodular", cl.unimodular}});
  }
  Outcome out;
  out.result = {{"ring", job.ring},         {"rank", job.rank},         {"flavor", job.flavor},
                {"total_forms", c.total_forms}, {"group_order", c.group_order}, {"classes", classes},
                {"class_count", c.classes.size()}, {"unimodular_classes", uni}};
  return out;
}

Outcome run_group(const Job& job) {
  UnitaryRingPtr U = uforms::ring_by_name(job.ring);
  FiniteUnitary F(U, 1 << 12);
  QuadClass q = uforms::diagonal_from_list(job.form, U, job.rank);
  GroupEnumeration O = orthogonal_group(F, q, job.budget);
  GroupEnumeration R = reflection_subgroup(F, q, job.budget);
  DicksonContext ctx(q);
  std::map<std::string, std::uint64_t> table;
  for (const auto& x : O.elements) {
    std::string bits;
    for (int b : ctx.signature(F.to_amat(x, job.rank)).bits) bits += b ? '1' : '0';
    ++table[bits.empty() ? "-" : bits];
  }
  Outcome out;
  out.result = {{"ring", job.ring},
                {"form", uforms::amat_json(U->algebra, q.rep.gram)},
                {"order", O.size()},
                {"reflection_subgroup_order", R.size()},
                {"split_orthogonal_components", ctx.components()},
                {"xi", ctx.xi()},
                {"dickson_table", table}};
  return out;
}

Outcome run_verify_reflections(const Job& job) {
  UnitaryRingPtr U = uforms::ring_by_name(job.ring);
  FiniteUnitary F(U, 1 << 12);
  ClassifyOptions o;
  o.rank = job.rank;
  o.unimodular_only = true;
  o.budget = job.budget;
  FormClassification c = brute_force_classify(F, o);
  Outcome out;
  json forms = json::array();
  std::size_t checked = 0;
  for (const auto& cl : c.classes) {
    QuadClass q = make_quad(U, F.to_amat(cl.representative, job.rank));
    GenerationReport g = verify_gen_by_reflections(F, q, job.budget);
    json entry = {{"form", uforms::amat_json(U->algebra, q.rep.gram)}, {"hypotheses_hold", g.hypotheses_hold}};
    if (!g.hypotheses_hold) {
      entry["violation"] = g.violation;
    } else {
      ++checked;
      bool ok = g.equal && g.index_power_of_two && g.delta_onto;
      out.pass = out.pass && ok;
      entry.update({{"order", g.order},
                    {"reflection_order", g.reflection_order},
                    {"preimage_order", g.preimage_order},
                    {"equal", g.equal},
                    {"index", g.index},
                    {"index_power_of_two", g.index_power_of_two},
                    {"delta_onto", g.delta_onto},
                    {"xi", g.xi},
                    {"pass", ok}});
    }
    forms.push_back(entry);
  }
  if (checked == 0) out.pass = false;
  out.result = {{"ring", job.ring}, {"rank", job.rank}, {"forms", forms}, {"checked", checked}};
  return out;
}

Outcome run_verify_transfer(const Job& job) {
  UnitaryRingPtr U = uforms::ring_by_name(job.ring);
  HermForm h = make_herm(U, AMat::identity(U->algebra, job.rank));
  TransferContext ctx = make_transfer(U, h);
  QuadClass q = uforms::diagonal_from_list(job.form, U, job.rank);
  TransferReport r = verify_transfer(ctx, q, q, job.budget);
  Outcome out;
  out.pass = r.all();
  out.result = {{"ring", job.ring},
                {"rank", job.rank},
                {"unimodularity_equivalence", r.unimodularity_equivalence},
                {"group_equality", r.group_equality},
                {"class_bijection", r.class_bijection},
                {"dickson_commutes", r.dickson_commutes},
                {"split_orthogonal_preserved", r.split_orthogonal_preserved},
                {"group_order", r.group_order},
                {"source_classes", r.source_classes},
                {"target_classes", r.target_classes},
                {"failures", r.failures}};
  return out;
}

json suite_json(const SuiteReport& r) {
  return {{"passed", r.passed},
          {"informational", r.informational},
          {"checked", r.checked},
          {"counterexamples", r.counterexamples}};
}

Outcome run_verify_cancellation(const Job& job) {
  SuiteReport r = cancellation_suite(uforms::ring_by_name(job.ring), job.rank, job.budget);
  Outcome out;
  out.pass = r.passed || r.informational;
  out.result = suite_json(r);
  out.result["ring"] = job.ring;
  out.result["max_rank"] = job.rank;
  return out;
}

Outcome run_verify_springer(const Job& job) {
  SuiteReport r = springer_suite(uforms::ring_by_name(job.ring), job.degree, job.rank, job.budget);
  Outcome out;
  out.pass = r.passed;
  out.result = suite_json(r);
  out.result["ring"] = job.ring;
  out.result["degree"] = job.degree;
  out.result["max_rank"] = job.rank;
  return out;
}

Outcome run_verify_hilbert(const Job& job) {
  Outcome out;
  std::uint64_t pairs = 0;
  json mismatches = json::array();
  for (long p = 2; p <= job.bound; ++p) {
    bool prime = true;
    for (long d = 2; d * d <= p; ++d) prime = prime && p % d;
    if (!prime) continue;
    long n = p == 2 ? 8 : p;
    for (long a = 1; a < n; ++a)
      for (long b = 1; b < n; ++b) {
        if (a % p == 0 || b % p == 0) continue;
        for (long sa : {1L, -1L}) {
          ++pairs;
          int h = hilbert_symbol(sa * a, b, Place::at(p)), c = conic_symbol(sa * a, b, p);
          if (h != c) mismatches.push_back({{"p", p}, {"a", sa * a}, {"b", b}, {"symbol", h}, {"conic", c}});
        }
      }
  }
  std::mt19937_64 rng(job.seed);
  auto draw = [&] {
    std::uniform_int_distribution<long> num(-60, 60), den(1, 60);
    long x = 0;
    while (x == 0) x = num(rng);
    return mpq_class(x, den(rng));
  };
  json product_failures = json::array();
  for (std::size_t i = 0; i < job.samples; ++i) {
    mpq_class a = draw(), b = draw();
    a.canonicalize();
    b.canonicalize();
    int prod = 1;
    for (const auto& v : relevant_places(a, b)) prod *= hilbert_symbol(a, b, v);
    if (prod != 1) product_failures.push_back({{"a", a.get_str()}, {"b", b.get_str()}});
  }
  out.pass = mismatches.empty() && product_failures.empty();
  out.result = {{"bound", job.bound},
                {"unit_pairs", pairs},
                {"mismatches", mismatches},
                {"product_formula_samples", job.samples},
                {"product_formula_failures", product_failures}};
  return out;
}

Outcome run_genus(const Job& job) {
  if (job.spec_path.empty()) fail(ErrorKind::InvalidInput, "genus needs --spec");
  json j = json::parse(job.spec_text);
  OrderSpec spec = uforms::parse_order(j.at("order"));
  UnitaryRingPtr U = build_order(spec);
  QuadClass q = j.contains("form") ? uforms::parse_form(j.at("form"), U) : uforms::diagonal_from_list("", U, job.rank);
  GenusReport r = genus_size(spec, q);
  bool reverified = true;
  for (const auto& c : r.certificates) reverified = reverified && reverify_certificate(spec, q, c);
  Outcome out;
  out.pass = reverified;
  out.result = uforms::genus_json(r);
  out.result["certificates_reverified"] = reverified;
  if (j.contains("name")) out.result["name"] = j.at("name");
  return out;
}

Outcome run_approximate(const Job& job) {
  UnitaryRingPtr U = uforms::ring_by_name(job.ring);
  const BaseRing& R = U->base();
  if (R.kind() != RingKind::LocalizedIntegers || R.primes().size() != 1)
    fail(ErrorKind::InvalidInput, "approximate needs a ring Z(p)");
  if (job.precision < 1) fail(ErrorKind::InvalidInput, "--precision must be at least 1");
  long p = R.primes()[0];
  BaseRing T = BaseRing::truncated(p, job.precision);
  QuadClass q = uforms::diagonal_from_list(job.form, U, job.rank);
  QuadClass qN = scalar_extend(q, T);
  const Algebra& A = U->algebra;
  const Algebra& AN = qN.ring().algebra;
  std::mt19937_64 rng(job.seed);
  std::size_t ok = 0;
  json failures = json::array(), sample;
  for (std::size_t i = 0; i < job.count; ++i) {
    std::vector<Reflection> rs;
    std::size_t len = 1 + rng() % 4;
    while (rs.size() < len) {
      AVec y;
      for (std::size_t s = 0; s < job.rank; ++s) y.push_back(AlgElem{T.element_at(rng() % T.cardinality())});
      AlgElem c = form_value(qN.rep, y, y);
      if (AN.is_unit(c)) rs.push_back(Reflection{y, c});
    }
    AMat phi = reflection_product(rs, qN);
    AMat psi = weak_approximate(phi, T, q);
    bool good = is_isometry(psi, q, q) && amat_map(A, T, psi) == phi;
    if (good) ++ok;
    else failures.push_back({{"index", i}, {"phi", uforms::amat_json(AN, phi)}});
    if (i == 0) sample = {{"phi", uforms::amat_json(AN, phi)}, {"lift", uforms::amat_json(A, psi)}};
  }
  Outcome out;
  out.pass = failures.empty();
  out.result = {{"ring", job.ring},     {"modulus", T.name()}, {"count", job.count},
                {"verified", ok},       {"failures", failures}, {"sample", sample}};
  return out;
}

int exit_for(ErrorKind k) {
  return k == ErrorKind::BudgetExceeded || k == ErrorKind::PrecisionLoss ? kBudget : kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  Job job;
  CLI::App app{"Quadratic and hermitian forms over rings with involution"};
  app.set_version_flag("--version", std::string(UFORMS_VERSION));
  app.require_subcommand(1);

  auto common = [&job](CLI::App* sc) {
    sc->add_option("--spec", job.spec_path, "JSON spec file");
    sc->add_option("--ring", job.ring, "ring name, e.g. F3, F9, Z/81, Z(3), M2(F3), M2(F3)-sp, X(F5)");
    sc->add_option("--rank", job.rank, "rank of the free module")->check(CLI::PositiveNumber);
    sc->add_option("--form", job.form, "diagonal entries, comma separated (default all ones)");
    sc->add_option("--precision", job.precision, "precision N of Z/p^N")->check(CLI::PositiveNumber);
    sc->add_option("--budget", job.budget, "enumeration budget")->check(CLI::PositiveNumber);
    sc->add_option("--format", job.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    sc->add_option("--seed", job.seed, "seed for randomized checks");
  };

  std::map<CLI::App*, std::pair<std::string, Outcome (*)(const Job&)>> handlers;
  auto add = [&](CLI::App* parent, const std::string& name, const std::string& full, const std::string& help,
                 Outcome (*fn)(const Job&)) {
    CLI::App* sc = parent->add_subcommand(name, help);
    common(sc);
    handlers[sc] = {full, fn};
    return sc;
  };
  CLI::App* classify = add(&app, "classify", "classify", "isometry classes of forms", run_classify);
  classify->add_option("--flavor", job.flavor, "quadratic or hermitian")->check(CLI::IsMember({"quadratic", "hermitian"}));
  classify->add_flag("--unimodular", job.unimodular, "only unimodular forms");
  add(&app, "group", "group", "orthogonal group, reflection subgroup and Dickson table", run_group);
  CLI::App* verify = app.add_subcommand("verify", "theorem suites");
  verify->require_subcommand(1);
  add(verify, "reflections", "verify reflections", "generation by reflections", run_verify_reflections);
  add(verify, "transfer", "verify transfer", "transfer to the endomorphism ring", run_verify_transfer);
  add(verify, "cancellation", "verify cancellation", "Witt cancellation", run_verify_cancellation);
  CLI::App* springer = add(verify, "springer", "verify springer", "descent along odd extensions", run_verify_springer);
  springer->add_option("--degree", job.degree, "extension degree e")->check(CLI::PositiveNumber);
  CLI::App* hilbert = add(verify, "hilbert", "verify hilbert", "Hilbert symbols against conic search", run_verify_hilbert);
  hilbert->add_option("--bound", job.bound, "largest prime checked");
  hilbert->add_option("--samples", job.samples, "random product formula samples");
  add(&app, "genus", "genus", "genus size of an order", run_genus);
  CLI::App* approx = add(&app, "approximate", "approximate", "weak approximation round trip", run_approximate);
  approx->add_option("--count", job.count, "number of random isometries");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  Outcome (*fn)(const Job&) = nullptr;
  for (const auto& [sc, h] : handlers)
    if (sc->parsed()) {
      job.command = h.first;
      fn = h.second;
    }
  if (!fn) return kUsage;

  if (!job.spec_path.empty()) {
    std::ifstream in(job.spec_path);
    if (!in) {
      std::cerr << "cannot read " << job.spec_path << "\n";
      return kUsage;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    job.spec_text = ss.str();
  }

  json report = envelope(job);
  int code = kPass;
  try {
    Outcome o = fn(job);
    report["result"] = o.result;
    report["verdict"] = o.pass ? "pass" : "fail";
    code = o.pass ? kPass : kVerdictFail;
  } catch (const Error& e) {
    report["error"] = {{"kind", error_kind_name(e.kind())}, {"message", e.what()}};
    code = exit_for(e.kind());
    std::cerr << "error: " << e.what() << "\n";
  } catch (const json::exception& e) {
    report["error"] = {{"kind", error_kind_name(ErrorKind::InvalidInput)}, {"message", e.what()}};
    code = kUsage;
    std::cerr << "error: " << e.what() << "\n";
  }
  emit(job, report);
  return code;
}
