#include "spec_io.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace uforms {

using namespace unitary;

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorKind::InvalidInput, what); }

long parse_long(const std::string& s) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
    bad("expected a positive integer, got '" + s + "'");
  return std::stol(s);
}

// q = p^e with p prime.
std::pair<long, int> prime_power(long q) {
  if (q < 2) bad("not a prime power: " + std::to_string(q));
  long p = 2;
  while (q % p) ++p;
  int e = 0;
  long r = q;
  while (r % p == 0) {
    r /= p;
    ++e;
  }
  if (r != 1) bad("not a prime power: " + std::to_string(q));
  return {p, e};
}

std::vector<long> parse_prime_list(const std::string& s) {
  std::vector<long> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_long(item));
  if (out.empty()) bad("empty prime list");
  return out;
}

mpq_class json_rational(const json& j) {
  if (j.is_number_integer()) return mpq_class(j.get<long>());
  if (j.is_string()) {
    mpq_class v;
    if (v.set_str(j.get<std::string>(), 10) != 0) bad("not a rational number: " + j.get<std::string>());
    v.canonicalize();
    return v;
  }
  bad("expected an integer or a rational string, got " + j.dump());
}

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing key '") + key + "'");
  return j.at(key);
}

MatrixInvolution matrix_involution(const std::string& s) {
  if (s == "transpose") return MatrixInvolution::Transpose;
  if (s == "symplectic") return MatrixInvolution::Symplectic;
  bad("unknown matrix involution '" + s + "'");
}

TiledInvolution tiled_involution(const std::string& s) {
  if (s == "transpose") return TiledInvolution::Transpose;
  if (s == "reversed_transpose") return TiledInvolution::ReversedTranspose;
  bad("unknown tiled involution '" + s + "'");
}

BaseRing base_of(const json& j) {
  if (j.is_string()) return base_by_name(j.get<std::string>());
  bad("base ring must be given by name");
}

UnitaryRingPtr raw_ring(const json& j) {
  BaseRing R = base_of(need(j, "base"));
  std::size_t n = need(j, "rank").get<std::size_t>();
  const json& st = need(j, "structure");
  if (!st.is_array() || st.size() != n) bad("structure must be an n x n array of coordinate vectors");
  std::vector<RingElem> sc(n * n * n, R.zero());
  for (std::size_t i = 0; i < n; ++i) {
    if (!st[i].is_array() || st[i].size() != n) bad("structure must be an n x n array of coordinate vectors");
    for (std::size_t k = 0; k < n; ++k) {
      const json& v = st[i][k];
      if (!v.is_array() || v.size() != n) bad("structure entries must have length n");
      for (std::size_t l = 0; l < n; ++l) sc[(i * n + k) * n + l] = parse_scalar(R, v[l]);
    }
  }
  auto vec = [&](const json& v) {
    if (!v.is_array() || v.size() != n) bad("vector of length n expected, got " + v.dump());
    Vec out;
    for (const auto& x : v) out.push_back(parse_scalar(R, x));
    return out;
  };
  Algebra A(R, n, std::move(sc), vec(need(j, "unit")));
  auto problems = A.check();
  if (!problems.empty()) bad("structure constants: " + problems.front());
  std::vector<Vec> cols;
  for (const auto& c : need(j, "sigma")) cols.push_back(vec(c));
  if (cols.size() != n) bad("sigma must list the images of all basis elements");
  Matrix sigma = Matrix::from_columns(cols, n);
  AlgElem u = j.contains("u") ? vec(j.at("u")) : A.one();
  std::vector<AlgElem> lambda;
  const json lam = j.value("lambda", json("min"));
  if (lam.is_string()) {
    LambdaBounds b = lambda_min_max(A, sigma, u);
    if (lam == "min") lambda = b.min;
    else if (lam == "max") lambda = b.max;
    else bad("lambda must be \"min\", \"max\" or a list of vectors");
  } else {
    for (const auto& l : lam) lambda.push_back(vec(l));
  }
  return make_unitary(std::move(A), std::move(sigma), std::move(u), std::move(lambda));
}

json scalar_json(const BaseRing& R, const RingElem& x) {
  if (R.kind() == RingKind::FiniteField && R.degree() > 1) return json(x.poly());
  if (R.kind() == RingKind::Product) {
    json out = json::array();
    for (std::size_t i = 0; i < R.factors().size(); ++i) out.push_back(scalar_json(R.factors()[i], x.parts()[i]));
    return out;
  }
  if (x.value().get_den() == 1 && x.value().get_num().fits_slong_p()) return json(x.value().get_num().get_si());
  return json(x.value().get_str());
}

}  // namespace

BaseRing base_by_name(const std::string& name) {
  if (name == "Q") return BaseRing::rationals();
  if (name.size() > 1 && name[0] == 'F') {
    auto [p, e] = prime_power(parse_long(name.substr(1)));
    return BaseRing::finite_field(p, e);
  }
  if (name.rfind("Z/", 0) == 0) {
    auto [p, e] = prime_power(parse_long(name.substr(2)));
    return BaseRing::truncated(p, e);
  }
  if (name.rfind("Z(", 0) == 0 && name.back() == ')') return BaseRing::localized(parse_prime_list(name.substr(2, name.size() - 3)));
  if (name.rfind("Z_(", 0) == 0 && name.back() == ')')
    return BaseRing::localized(parse_prime_list(name.substr(3, name.size() - 4)));
  bad("unknown base ring '" + name + "'");
}

UnitaryRingPtr ring_by_name(const std::string& name) {
  if (name.size() > 3 && name[0] == 'M' && std::isdigit(static_cast<unsigned char>(name[1]))) {
    std::size_t open = name.find('('), close = name.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) bad("bad matrix ring name '" + name + "'");
    std::size_t n = static_cast<std::size_t>(parse_long(name.substr(1, open - 1)));
    std::string suffix = name.substr(close + 1);
    if (!suffix.empty() && suffix != "-sp") bad("unknown matrix ring suffix '" + suffix + "'");
    BaseRing R = base_by_name(name.substr(open + 1, close - open - 1));
    return matrix_algebra(R, n, suffix.empty() ? MatrixInvolution::Transpose : MatrixInvolution::Symplectic);
  }
  if (name.rfind("X(", 0) == 0 && name.back() == ')') {
    BaseRing R = base_by_name(name.substr(2, name.size() - 3));
    return exchange_ring(scalar_ring(R, R.one())->algebra);
  }
  BaseRing R = base_by_name(name);
  return scalar_ring(R, R.one());
}

UnitaryRingPtr parse_ring(const json& j) {
  if (j.is_string()) return ring_by_name(j.get<std::string>());
  if (!j.is_object()) bad("ring must be a name or an object");
  if (j.contains("name")) return ring_by_name(j.at("name").get<std::string>());
  if (!j.contains("constructor")) return raw_ring(j);
  std::string c = j.at("constructor").get<std::string>();
  BaseRing R = base_of(need(j, "base"));
  if (c == "scalar")
    return scalar_ring(R, parse_scalar(R, j.value("u", json(1))), j.value("lambda", std::string("min")) == "max");
  if (c == "matrix")
    return matrix_algebra(R, need(j, "n").get<std::size_t>(),
                          matrix_involution(j.value("involution", std::string("transpose"))));
  if (c == "quadratic_extension")
    return quadratic_extension(R, parse_scalar(R, need(j, "a")), parse_scalar(R, need(j, "b")));
  if (c == "quaternion")
    return quaternion_order(R, json_rational(need(j, "u")), json_rational(need(j, "v")),
                            json_rational(j.value("pi", json(1))));
  if (c == "exchange") return exchange_ring(scalar_ring(R, R.one())->algebra);
  bad("unknown ring constructor '" + c + "'");
}

RingElem parse_scalar(const BaseRing& R, const json& j) {
  if (R.kind() == RingKind::FiniteField && R.degree() > 1 && j.is_array())
    return R.from_poly(j.get<std::vector<std::int64_t>>());
  if (R.kind() == RingKind::Product && j.is_array()) {
    if (j.size() != R.factors().size()) bad("product element has the wrong number of parts");
    std::vector<RingElem> parts;
    for (std::size_t i = 0; i < j.size(); ++i) parts.push_back(parse_scalar(R.factors()[i], j[i]));
    return R.from_parts(parts);
  }
  return R.from_rational(json_rational(j));
}

AlgElem parse_element(const Algebra& A, const json& j) {
  if (!j.is_array()) return A.scalar(parse_scalar(A.base(), j));
  if (j.size() != A.rank()) bad("element " + j.dump() + " should have " + std::to_string(A.rank()) + " coordinates");
  AlgElem a;
  for (const auto& x : j) a.push_back(parse_scalar(A.base(), x));
  return a;
}

QuadClass parse_form(const json& j, const UnitaryRingPtr& U) {
  const Algebra& A = U->algebra;
  if (j.contains("diagonal")) {
    std::vector<AlgElem> d;
    for (const auto& x : j.at("diagonal")) d.push_back(parse_element(A, x));
    if (d.empty()) bad("empty diagonal");
    return diagonal_quad(U, d);
  }
  const json& g = need(j, "gram");
  std::size_t m = g.size();
  if (m == 0) bad("empty Gram matrix");
  AMat x = AMat::zero(A, m, m);
  for (std::size_t s = 0; s < m; ++s) {
    if (g[s].size() != m) bad("Gram matrix must be square");
    for (std::size_t t = 0; t < m; ++t) x(s, t) = parse_element(A, g[s][t]);
  }
  return make_quad(U, x);
}

QuadClass diagonal_from_list(const std::string& list, const UnitaryRingPtr& U, std::size_t rank) {
  const Algebra& A = U->algebra;
  std::vector<AlgElem> d;
  if (list.empty()) {
    d.assign(rank, A.one());
  } else {
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) d.push_back(parse_element(A, json(item)));
    if (d.size() != rank) bad("--form lists " + std::to_string(d.size()) + " entries but --rank is " + std::to_string(rank));
  }
  return diagonal_quad(U, d);
}

OrderSpec parse_order(const json& j) {
  OrderSpec s;
  std::string kind = need(j, "kind").get<std::string>();
  if (j.contains("primes")) s.primes = j.at("primes").get<std::vector<long>>();
  if (kind == "quaternion") {
    s.kind = OrderKind::Quaternion;
    s.u = json_rational(j.value("u", json(-1)));
    s.v = json_rational(j.value("v", json(-1)));
    s.pi = json_rational(need(j, "pi"));
  } else if (kind == "tiled") {
    s.kind = OrderKind::Tiled;
    s.n = need(j, "n").get<std::size_t>();
    s.involution = tiled_involution(j.value("involution", std::string("transpose")));
    for (const auto& [p, m] : need(j, "pattern").items())
      s.pattern.push_back({parse_long(p), m.get<std::vector<std::vector<int>>>()});
  } else if (kind == "generic") {
    s.kind = OrderKind::Generic;
    s.ring = parse_ring(need(j, "ring"));
    s.declared_hereditary = j.value("declared_hereditary", false);
  } else {
    bad("unknown order kind '" + kind + "'");
  }
  UnitaryRingPtr U = build_order(s);
  if (j.contains("idempotents"))
    for (const auto& [p, list] : j.at("idempotents").items())
      for (const auto& e : list) s.idempotents[parse_long(p)].push_back(parse_element(U->algebra, e));
  if (j.contains("declared"))
    for (const auto& d : j.at("declared"))
      s.declared.push_back({d.value("place", 0L), d.at("generators").get<std::vector<Z2Vec>>(),
                            d.value("provenance", std::string())});
  if (j.contains("disabled_rules"))
    for (const auto& r : j.at("disabled_rules")) s.disabled_rules.insert(r.get<std::string>());
  return s;
}

json element_json(const Algebra& A, const AlgElem& a) {
  if (A.rank() == 1) return scalar_json(A.base(), a[0]);
  json out = json::array();
  for (const auto& x : a) out.push_back(scalar_json(A.base(), x));
  return out;
}

json amat_json(const Algebra& A, const AMat& x) {
  json out = json::array();
  for (std::size_t s = 0; s < x.rows(); ++s) {
    json row = json::array();
    for (std::size_t t = 0; t < x.cols(); ++t) row.push_back(element_json(A, x(s, t)));
    out.push_back(row);
  }
  return out;
}

json genus_json(const GenusReport& r) {
  json out;
  json index = json::array();
  for (const auto& e : r.index_set)
    index.push_back({{"prime", e.prime}, {"component", e.component}, {"deg", e.deg}, {"provenance", e.provenance}});
  out["index_set"] = index;
  json certs = json::array();
  for (const auto& c : r.certificates)
    certs.push_back({{"place", c.place},
                     {"rule", c.rule},
                     {"generators", c.generators},
                     {"premises", c.premises},
                     {"lower_bound", c.lower_bound}});
  out["certificates"] = certs;
  out["exact"] = r.exact;
  out["size"] = r.size ? json(*r.size) : json(nullptr);
  out["divides"] = r.divides;
  out["image_rank"] = r.image_rank;
  out["trace"] = r.trace;
  out["module_note"] = r.module_note;
  return out;
}

}  // namespace uforms
