#include "unitary/isometry.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <set>

namespace unitary {

namespace {

std::size_t isqrt_exact(std::size_t n) {
  std::size_t r = 0;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

AVec column(const AMat& x, std::size_t t) {
  AVec v;
  for (std::size_t s = 0; s < x.rows(); ++s) v.push_back(x(s, t));
  return v;
}

AVec unit_avec(const Algebra& A, std::size_t m, std::size_t k) {
  AVec v(m, A.zero());
  v[k] = A.one();
  return v;
}

AVec avec_add(const Algebra& A, const AVec& a, const AVec& b) {
  AVec r;
  for (std::size_t i = 0; i < a.size(); ++i) r.push_back(A.add(a[i], b[i]));
  return r;
}

AVec avec_sub(const Algebra& A, const AVec& a, const AVec& b) {
  AVec r;
  for (std::size_t i = 0; i < a.size(); ++i) r.push_back(A.sub(a[i], b[i]));
  return r;
}

bool avec_is_zero(const Algebra& A, const AVec& a) {
  return std::all_of(a.begin(), a.end(), [&](const AlgElem& x) { return A.is_zero(x); });
}

// The same reflection with y rescaled so that its first unit coordinate is 1.
Reflection normalize(const UnitaryRing& U, Reflection r) {
  const Algebra& A = U.algebra;
  for (const auto& x : r.y)
    if (A.is_unit(x)) {
      AlgElem b = *A.inverse(x);
      for (auto& z : r.y) z = A.mul(z, b);
      r.c = A.mul(A.mul(U.apply_sigma(b), r.c), b);
      break;
    }
  return r;
}

bool is_power_of_two(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

void sort_group(const FiniteUnitary& F, GroupEnumeration& G) {
  std::sort(G.elements.begin(), G.elements.end());
  G.position.clear();
  for (std::size_t i = 0; i < G.elements.size(); ++i) G.position.emplace(F.code(G.elements[i]), i);
}

void require_ring(const FiniteUnitary& F, const QuadClass& q) {
  if (!same_ring(F.ring(), q.ring())) fail(ErrorKind::InvalidInput, "form does not live over the tabulated ring");
}

}  // namespace

AMat reflection_map(const Reflection& r, const QuadClass& q) {
  const UnitaryRing& U = q.ring();
  const Algebra& A = U.algebra;
  std::size_t m = q.rank();
  if (r.y.size() != m) fail(ErrorKind::RankMismatch, "reflection vector has the wrong length");
  auto cinv = A.inverse(r.c);
  if (!cinv) fail(ErrorKind::NotUnit, "c not a unit");
  if (!U.in_lambda(A.sub(r.c, form_value(q.rep, r.y, r.y))))
    fail(ErrorKind::NotInQuadraticValue, "c not in the quadratic value of y");
  AMat H = herm_of(q).form.gram;
  AMat S = AMat::identity(A, m);
  for (std::size_t t = 0; t < m; ++t) {
    AlgElem hy = A.zero();
    for (std::size_t k = 0; k < m; ++k) hy = A.add(hy, A.mul(U.apply_sigma(r.y[k]), H(k, t)));
    AlgElem w = A.mul(*cinv, hy);
    for (std::size_t i = 0; i < m; ++i) S(i, t) = A.sub(S(i, t), A.mul(r.y[i], w));
  }
  if (!is_isometry(S, q, q)) fail(ErrorKind::InvalidInput, "reflection is not an isometry");
  return S;
}

Reflection inverse_reflection(const Reflection& r, const UnitaryRing& U) {
  return Reflection{r.y, U.algebra.mul(U.apply_sigma(r.c), U.u)};
}

AMat reflection_product(const std::vector<Reflection>& rs, const QuadClass& q) {
  const Algebra& A = q.ring().algebra;
  AMat p = AMat::identity(A, q.rank());
  for (const auto& r : rs) p = amat_mul(A, p, reflection_map(r, q));
  return p;
}

// ------------------------------------------------------------ enumeration

std::optional<std::size_t> GroupEnumeration::find(const FiniteUnitary& F, const IdxMat& x) const {
  auto it = position.find(F.code(x));
  if (it == position.end()) return std::nullopt;
  return it->second;
}

GroupEnumeration orthogonal_group(const FiniteUnitary& F, const QuadClass& q, std::uint64_t budget) {
  require_ring(F, q);
  std::size_t m = q.rank();
  IdxMat g = F.from_amat(q.rep.gram);
  IdxMat target = F.quad_canon(g, m);
  GroupEnumeration G;
  G.m = m;
  for (const auto& phi : F.general_linear(m, budget))
    if (F.quad_canon(F.pullback(phi, g, m), m) == target) G.elements.push_back(phi);
  sort_group(F, G);
  G.generators = G.elements;
  if (!G.contains(F, F.identity(m))) fail(ErrorKind::InvalidInput, "isometry group misses the identity");
  // Closure on all pairs for small groups, on a fixed sample otherwise.
  std::size_t n = G.size();
  std::mt19937_64 rng(7);
  std::size_t pairs = n <= 64 ? n * n : 4096;
  for (std::size_t k = 0; k < pairs; ++k) {
    std::size_t a = n <= 64 ? k / n : rng() % n, b = n <= 64 ? k % n : rng() % n;
    if (!G.contains(F, G.multiply(F, G.elements[a], G.elements[b])))
      fail(ErrorKind::InvalidInput, "isometry group is not closed");
  }
  return G;
}

std::vector<std::pair<Reflection, IdxMat>> all_reflections(const FiniteUnitary& F, const QuadClass& q) {
  require_ring(F, q);
  std::size_t m = q.rank();
  IdxMat g = F.from_amat(q.rep.gram);
  IdxMat H = F.herm(g, m);
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < m; ++i) total *= F.size();
  std::vector<std::pair<Reflection, IdxMat>> out;
  std::set<IdxMat> seen;
  std::vector<Idx> y(m, 0);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c0 = code;
    for (std::size_t i = 0; i < m; ++i) {
      y[i] = static_cast<Idx>(c0 % F.size());
      c0 /= F.size();
    }
    Idx fyy = 0;
    for (std::size_t s = 0; s < m; ++s)
      for (std::size_t t = 0; t < m; ++t) fyy = F.add(fyy, F.mul(F.mul(F.sigma(y[s]), g[s * m + t]), y[t]));
    std::vector<Idx> hy(m, 0);
    for (std::size_t t = 0; t < m; ++t)
      for (std::size_t k = 0; k < m; ++k) hy[t] = F.add(hy[t], F.mul(F.sigma(y[k]), H[k * m + t]));
    for (Idx l : F.lambda_elements()) {
      Idx c = F.add(fyy, l);
      if (!F.is_unit(c)) continue;
      Idx ci = F.inverse(c);
      IdxMat S = F.identity(m);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t t = 0; t < m; ++t) S[i * m + t] = F.sub(S[i * m + t], F.mul(F.mul(y[i], ci), hy[t]));
      if (!seen.insert(S).second) continue;
      AVec yv;
      for (Idx a : y) yv.push_back(F.element(a));
      out.push_back({Reflection{yv, F.element(c)}, S});
    }
  }
  return out;
}

GroupEnumeration reflection_subgroup(const FiniteUnitary& F, const QuadClass& q, std::uint64_t budget) {
  std::size_t m = q.rank();
  GroupEnumeration G;
  G.m = m;
  for (auto& [r, S] : all_reflections(F, q)) G.generators.push_back(S);
  std::unordered_map<std::uint64_t, std::size_t> seen;
  std::deque<IdxMat> frontier;
  IdxMat id = F.identity(m);
  seen.emplace(F.code(id), 0);
  G.elements.push_back(id);
  frontier.push_back(id);
  while (!frontier.empty()) {
    IdxMat x = std::move(frontier.front());
    frontier.pop_front();
    for (const auto& s : G.generators) {
      IdxMat y = F.mat_mul(x, s, m);
      if (seen.emplace(F.code(y), G.elements.size()).second) {
        if (G.elements.size() >= budget) fail(ErrorKind::BudgetExceeded, "reflection closure exceeds the budget");
        G.elements.push_back(y);
        frontier.push_back(std::move(y));
      }
    }
  }
  sort_group(F, G);
  return G;
}

// ------------------------------------------------------------ Dickson

namespace {

// E = End_C(C^m) as the centralizer of the right C-action, over the base field.
std::vector<Matrix> endomorphism_basis(const Algebra& C, std::size_t m) {
  const BaseRing& K = C.base();
  std::size_t d = C.rank(), D = m * d;
  Matrix eq = Matrix::zero(K, d * D * D, D * D);
  for (std::size_t j = 0; j < d; ++j) {
    Matrix r = C.right_mult(C.basis(j));
    // Block-diagonal right multiplication: R(s*d+a, s*d+b) = r(a, b).
    auto R = [&](std::size_t x, std::size_t y) -> RingElem {
      if (x / d != y / d) return K.zero();
      return r(x % d, y % d);
    };
    for (std::size_t a = 0; a < D; ++a)
      for (std::size_t b = 0; b < D; ++b) {
        std::size_t row = (j * D + a) * D + b;
        // (T R - R T)_{ab}
        for (std::size_t c = 0; c < D; ++c) {
          RingElem rcb = R(c, b), rac = R(a, c);
          if (!K.is_zero(rcb)) eq(row, a * D + c) = K.add(eq(row, a * D + c), rcb);
          if (!K.is_zero(rac)) eq(row, c * D + b) = K.sub(eq(row, c * D + b), rac);
        }
      }
  }
  std::vector<Matrix> out;
  for (const auto& v : kernel_basis(K, eq)) {
    Matrix T = Matrix::zero(K, D, D);
    for (std::size_t a = 0; a < D; ++a)
      for (std::size_t b = 0; b < D; ++b) T(a, b) = v[a * D + b];
    out.push_back(std::move(T));
  }
  return out;
}

DicksonValue value_from_basis(const ComponentReport& c, const std::vector<Matrix>& e_basis, std::size_t deg_e,
                           const AMat& phi) {
  const Algebra& C = c.ring->algebra;
  const BaseRing& K = C.base();
  Matrix psi = block_expansion(C, phi);
  std::vector<Vec> image;
  for (const auto& T : e_basis) {
    Matrix D = mat_sub(K, T, mat_mul(K, psi, T));
    Vec v;
    for (std::size_t a = 0; a < D.rows(); ++a)
      for (std::size_t b = 0; b < D.cols(); ++b) v.push_back(D(a, b));
    image.push_back(std::move(v));
  }
  std::size_t r = image.empty() ? 0 : rank(K, Matrix::from_rows(image));
  std::size_t denom = c.center_dimension * deg_e;
  if (r % denom != 0) fail(ErrorKind::InvalidInput, "matrix is not an isometry of the component");
  DicksonValue out;
  out.delta = static_cast<int>((r / denom) % 2);
  // On P = C^m the determinant is the norm of the reduced norm raised to the
  // degree of C, so its sign survives when both degrees are odd.
  if (K.characteristic() != 2 && denom % 2 == 1) {
    RingElem det = determinant(K, psi);
    if (K.is_one(det)) out.norm_delta = 0;
    else if (K.is_one(K.neg(det))) out.norm_delta = 1;
    else fail(ErrorKind::InvalidInput, "isometry determinant is not a sign");
  }
  return out;
}

}  // namespace

DicksonContext::DicksonContext(const QuadClass& q, std::optional<long> p)
    : residue_(make_residue(q.rep.ring, p)), m_(q.rank()) {
  for (std::size_t i : residue_.factorization.split_orthogonal) {
    const ComponentReport& c = residue_.factorization.components[i];
    Comp k;
    k.index = i;
    k.e_basis = endomorphism_basis(c.ring->algebra, m_);
    k.e_dim = k.e_basis.size();
    k.center_deg = c.center_dimension;
    k.deg_e = isqrt_exact(k.e_dim / k.center_deg);
    if (k.e_dim != m_ * m_ * c.dimension || k.deg_e * k.deg_e * k.center_deg != k.e_dim)
      fail(ErrorKind::InvalidInput, "endomorphism ring has unexpected dimension");
    comps_.push_back(std::move(k));
  }
}

DicksonValue DicksonContext::component_value(std::size_t k, const AMat& phi_component) const {
  const Comp& c = comps_.at(k);
  return value_from_basis(residue_.factorization.components[c.index], c.e_basis, c.deg_e, phi_component);
}

DicksonSignature DicksonContext::signature(const AMat& phi) const {
  DicksonSignature s;
  for (std::size_t k = 0; k < comps_.size(); ++k) {
    DicksonValue v = component_value(k, residue_.component_matrix(comps_[k].index, phi));
    if (v.norm_delta && *v.norm_delta != v.delta)
      fail(ErrorKind::InvalidInput, "Dickson invariant disagrees with the reduced norm");
    s.bits.push_back(v.delta);
  }
  return s;
}

int dickson(const AMat& phi, const ComponentReport& c) {
  if (c.classification != Classification::SplitOrthogonal)
    fail(ErrorKind::NotSplitOrthogonal, "component not split-orthogonal");
  std::size_t m = phi.rows();
  auto basis = endomorphism_basis(c.ring->algebra, m);
  std::size_t deg_e = isqrt_exact(basis.size() / c.center_dimension);
  DicksonValue v = value_from_basis(c, basis, deg_e, phi);
  if (v.norm_delta && *v.norm_delta != v.delta)
    fail(ErrorKind::InvalidInput, "Dickson invariant disagrees with the reduced norm");
  return v.delta;
}

DicksonValue dickson_value(const AMat& phi, const ComponentReport& c) {
  auto basis = endomorphism_basis(c.ring->algebra, phi.rows());
  return value_from_basis(c, basis, isqrt_exact(basis.size() / c.center_dimension), phi);
}

DicksonSignature dickson_signature(const AMat& phi, const QuadClass& q) {
  if (!is_isometry(phi, q, q)) fail(ErrorKind::InvalidInput, "matrix is not an isometry of the form");
  return DicksonContext(q).signature(phi);
}

// ------------------------------------------------------------ generation

GenerationReport verify_gen_by_reflections(const FiniteUnitary& F, const QuadClass& q, std::uint64_t budget) {
  require_ring(F, q);
  GenerationReport rep;
  DicksonContext ctx(q);
  rep.xi = ctx.xi();
  for (const auto& c : ctx.residue().factorization.components)
    if (c.division_part_is_F2) {
      rep.hypotheses_hold = false;
      rep.violation = c.involution_kind == InvolutionKind::Second ? "hypothesis violated: D_i = F_2 x F_2"
                                                                  : "hypothesis violated: D_i = F_2";
      return rep;
    }
  if (!is_unimodular(q)) {
    rep.hypotheses_hold = false;
    rep.violation = "hypothesis violated: form not unimodular";
    return rep;
  }
  std::size_t m = q.rank();
  GroupEnumeration O = orthogonal_group(F, q, budget);
  GroupEnumeration Op = reflection_subgroup(F, q, budget);
  rep.order = O.size();
  rep.reflection_order = Op.size();
  DicksonSignature zero{std::vector<int>(rep.xi.size(), 0)}, xi{rep.xi};
  std::set<DicksonSignature> image;
  std::vector<bool> in_pre(O.size(), false);
  for (std::size_t i = 0; i < O.size(); ++i) {
    DicksonSignature s = ctx.signature(F.to_amat(O.elements[i], m));
    image.insert(s);
    in_pre[i] = s == zero || s == xi;
    if (in_pre[i]) ++rep.preimage_order;
  }
  rep.contained = true;
  for (const auto& x : Op.elements) {
    auto i = O.find(F, x);
    if (!i || !in_pre[*i]) rep.contained = false;
  }
  rep.equal = rep.contained && rep.preimage_order == rep.reflection_order;
  rep.index = O.size() % Op.size() == 0 ? O.size() / Op.size() : 0;
  rep.index_power_of_two = is_power_of_two(rep.index);
  rep.delta_onto = image.size() == (std::size_t{1} << rep.xi.size());
  return rep;
}

// ------------------------------------------------------------ factorization

std::vector<Reflection> cd_factorize(const AMat& phi, const QuadClass& q) {
  const UnitaryRing& U = q.ring();
  const Algebra& A = U.algebra;
  const BaseRing& R = U.base();
  bool odd_local = (R.kind() == RingKind::FiniteField || R.kind() == RingKind::TruncatedLocal) && R.prime() != 2;
  if (!odd_local) fail(ErrorKind::Unsupported, "factorization needs F_q or Z/p^N with p odd");
  if (A.rank() != 1 || U.sigma != Matrix::identity(R, 1) || U.u != A.one())
    fail(ErrorKind::Unsupported, "factorization needs a commutative ring with trivial involution and u = 1");
  std::size_t m = q.rank();
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t t = 0; t < m; ++t)
      if (s != t && !A.is_zero(q.rep.gram(s, t))) fail(ErrorKind::Unsupported, "factorization needs a diagonal form");
  if (!is_unimodular(q)) fail(ErrorKind::NotUnimodular, "form not unimodular");
  if (!is_isometry(phi, q, q)) fail(ErrorKind::InvalidInput, "matrix is not an isometry of the form");
  SesqForm h = herm_of(q).form;
  std::vector<Reflection> applied;
  AMat psi = phi;
  auto apply = [&](Reflection r) {
    r = normalize(U, std::move(r));
    psi = amat_mul(A, reflection_map(r, q), psi);
    applied.push_back(std::move(r));
  };
  for (std::size_t k = 0; k < m; ++k) {
    AVec e = unit_avec(A, m, k), pe = column(psi, k);
    AVec y = avec_sub(A, e, pe);
    if (avec_is_zero(A, y)) continue;
    if (A.is_unit(form_value(h, y, y))) {
      apply(Reflection{y, form_value(q.rep, y, y)});
      continue;
    }
    AVec z = avec_add(A, e, pe);
    if (!A.is_unit(form_value(h, z, z))) fail(ErrorKind::ResidueFieldTooSmall, "no reflection moves the basis vector");
    apply(Reflection{z, form_value(q.rep, z, z)});
    apply(Reflection{e, form_value(q.rep, e, e)});
  }
  if (psi != AMat::identity(A, m)) fail(ErrorKind::InvalidInput, "factorization did not reach the identity");
  std::vector<Reflection> out;
  for (const auto& r : applied) out.push_back(inverse_reflection(r, U));
  if (reflection_product(out, q) != phi) fail(ErrorKind::InvalidInput, "factorization does not reproduce phi");
  return out;
}

AMat weak_approximate(const AMat& phi, const BaseRing& truncated, const QuadClass& q) {
  const UnitaryRing& U = q.ring();
  const Algebra& A = U.algebra;
  const BaseRing& R = U.base();
  if (truncated.kind() != RingKind::TruncatedLocal) fail(ErrorKind::InvalidInput, "target must be Z/p^N");
  long p = truncated.prime();
  if (R.kind() != RingKind::LocalizedIntegers ||
      std::find(R.primes().begin(), R.primes().end(), p) == R.primes().end())
    fail(ErrorKind::InvalidInput, "form must live over localized integers containing p");
  if (!is_unimodular(q)) fail(ErrorKind::NotUnimodular, "form not unimodular");
  QuadClass qN = scalar_extend(q, truncated);
  if (!is_isometry(phi, qN, qN)) fail(ErrorKind::InvalidInput, "matrix is not an isometry mod p^N");
  DicksonContext ctx(qN);
  DicksonSignature s = ctx.signature(phi);
  DicksonSignature zero{std::vector<int>(s.bits.size(), 0)}, xi{ctx.xi()};
  if (s != zero && s != xi) fail(ErrorKind::DicksonObstruction, "Dickson obstruction");
  std::vector<Reflection> rs = cd_factorize(phi, qN);
  std::size_t m = q.rank();
  const mpz_class& pn = truncated.residue_modulus();
  AMat psi = AMat::identity(A, m);
  for (const auto& r : rs) {
    AVec y;
    for (const auto& x : r.y) y.push_back(AlgElem{R.from_integer(x[0].value().get_num())});
    // The lift must keep c a unit at every localized prime; shift by p^N if not.
    AlgElem c = form_value(q.rep, y, y);
    for (std::size_t attempt = 0; !A.is_unit(c); ++attempt) {
      if (attempt >= 16 * m) fail(ErrorKind::PrecisionLoss, "no unit lift of the reflection value");
      std::size_t j = attempt % m;
      y[j] = A.add(y[j], A.scalar(R.from_integer(pn)));
      c = form_value(q.rep, y, y);
    }
    psi = amat_mul(A, psi, reflection_map(Reflection{y, c}, q));
  }
  if (!is_isometry(psi, q, q)) fail(ErrorKind::InvalidInput, "lifted product is not an isometry");
  if (amat_map(A, truncated, psi) != phi) fail(ErrorKind::PrecisionLoss, "lift is not congruent mod p^N");
  return psi;
}

}  // namespace unitary
