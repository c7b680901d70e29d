#include "unitary/transfer.hpp"

#include <algorithm>
#include <set>

#include "unitary/isometry.hpp"

namespace unitary {

namespace {

AlgElem flatten(const BaseRing& R, const AMat& x, std::size_t m, std::size_t n) {
  AlgElem b = zero_vec(R, m * m * n);
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t t = 0; t < m; ++t)
      for (std::size_t k = 0; k < n; ++k) b[(s * m + t) * n + k] = x(s, t)[k];
  return b;
}

bool same_span(const BaseRing& R, const std::vector<Vec>& a, const std::vector<Vec>& b) {
  for (const auto& v : a)
    if (!in_span(R, b, v)) return false;
  for (const auto& v : b)
    if (!in_span(R, a, v)) return false;
  return true;
}

// For every component of the source residue, the index of the target residue
// component with central idempotent e_i * 1_m; nullopt if none matches.
std::vector<std::optional<std::size_t>> match_components(const TransferContext& ctx, const Residue& ra,
                                                         const Residue& rb) {
  const Algebra& Araw = ra.raw->algebra;
  const BaseRing& K = Araw.base();
  std::vector<std::optional<std::size_t>> out;
  for (const auto& e : ra.factorization.idempotents) {
    AlgElem lifted = mat_apply(K, ra.bar.lift, e);
    AMat E = AMat::zero(Araw, ctx.m, ctx.m);
    for (std::size_t s = 0; s < ctx.m; ++s) E(s, s) = lifted;
    AlgElem b = mat_apply(K, rb.bar.projection, flatten(K, E, ctx.m, Araw.rank()));
    auto it = std::find(rb.factorization.idempotents.begin(), rb.factorization.idempotents.end(), b);
    if (it == rb.factorization.idempotents.end()) out.push_back(std::nullopt);
    else out.push_back(static_cast<std::size_t>(it - rb.factorization.idempotents.begin()));
  }
  return out;
}

}  // namespace

AlgElem TransferContext::to_target(const AMat& x) const {
  if (x.rows() != m || x.cols() != m) fail(ErrorKind::RankMismatch, "matrix size differs from the rank of Q");
  return flatten(source->base(), x, m, source->rank());
}

AMat TransferContext::to_source(const AlgElem& b) const {
  std::size_t n = source->rank();
  AMat x = AMat::zero(source->algebra, m, m);
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t t = 0; t < m; ++t)
      for (std::size_t k = 0; k < n; ++k) x(s, t)[k] = b[(s * m + t) * n + k];
  return x;
}

TransferContext make_transfer(UnitaryRingPtr U, const HermForm& h) {
  if (!same_ring(*U, *h.form.ring)) fail(ErrorKind::InvalidInput, "hermitian form lives over another ring");
  if (!U->base().is_field()) fail(ErrorKind::Unsupported, "transfer needs a field base");
  if (!is_hermitian(h.form)) fail(ErrorKind::InvalidInput, "base form is not hermitian");
  auto hinv = amat_inverse(U->algebra, h.form.gram);
  if (!is_unimodular(h) || !hinv) fail(ErrorKind::NotUnimodular, "h not unimodular");
  const Algebra& A = U->algebra;
  const BaseRing& K = A.base();
  TransferContext ctx;
  ctx.source = U;
  ctx.base_form = h;
  ctx.h_inverse = *hinv;
  ctx.m = h.rank();
  std::size_t m = ctx.m, n = A.rank(), N = m * m * n;

  std::vector<RingElem> sc(N * N * N, K.zero());
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t t = 0; t < m; ++t)
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t l = 0; l < n; ++l)
            for (std::size_t j = 0; j < n; ++j) {
              std::size_t a = (s * m + t) * n + k, b = (t * m + r) * n + l, c = (s * m + r) * n + j;
              sc[(a * N + b) * N + c] = A.c(k, l, j);
            }
  Algebra B(K, N, std::move(sc), ctx.to_target(AMat::identity(A, m)));

  Matrix tau = Matrix::zero(K, N, N);
  for (std::size_t j = 0; j < N; ++j) {
    AMat X = ctx.to_source(unit_vec(K, N, j));
    AlgElem t = ctx.to_target(amat_mul(A, amat_mul(A, ctx.h_inverse, amat_star(*U, X)), h.form.gram));
    for (std::size_t r = 0; r < N; ++r) tau(r, j) = t[r];
  }
  std::vector<AlgElem> gamma;
  for (const auto& d : lambda_P_basis(*U, m)) gamma.push_back(ctx.to_target(amat_mul(A, ctx.h_inverse, d)));
  ctx.target = make_unitary(std::move(B), std::move(tau), ctx.to_target(AMat::identity(A, m)), std::move(gamma));
  auto problems = check_unitary(*ctx.target);
  if (!problems.empty()) fail(ErrorKind::InvalidInput, "transferred ring is not unitary: " + problems.front());
  return ctx;
}

QuadClass transfer_form(const TransferContext& ctx, const QuadClass& q) {
  if (q.rank() != ctx.m) fail(ErrorKind::RankMismatch, "form rank differs from the rank of Q");
  if (!same_ring(q.ring(), *ctx.source)) fail(ErrorKind::InvalidInput, "form lives over another ring");
  AMat g = amat_mul(ctx.source->algebra, ctx.h_inverse, q.rep.gram);
  return make_quad(ctx.target, AMat(1, 1, ctx.to_target(g)));
}

TransferReport verify_transfer(const TransferContext& ctx, const QuadClass& q, const QuadClass& q2,
                               std::uint64_t budget) {
  if (!ctx.source->base().is_finite()) fail(ErrorKind::Unsupported, "transfer verification needs a finite base");
  TransferReport rep;
  auto note = [&](bool ok, const std::string& what) {
    if (!ok) rep.failures.push_back(what);
    return ok;
  };
  std::size_t m = ctx.m;
  FiniteUnitary FA(ctx.source, 1 << 12), FB(ctx.target, 1 << 12);
  QuadClass tq = transfer_form(ctx, q), tq2 = transfer_form(ctx, q2);

  // Classes on both sides, then the induced map on class indices.
  ClassifyOptions oa, ob;
  oa.rank = m;
  oa.budget = ob.budget = budget;
  ob.rank = 1;
  FormClassification ca = brute_force_classify(FA, oa), cb = brute_force_classify(FB, ob);
  rep.source_classes = ca.classes.size();
  rep.target_classes = cb.classes.size();
  bool uni = is_unimodular(q) == is_unimodular(tq) && is_unimodular(q2) == is_unimodular(tq2);
  std::set<long> hit;
  bool injective = true;
  for (const auto& c : ca.classes) {
    QuadClass f = make_quad(ctx.source, FA.to_amat(c.representative, m));
    QuadClass tf = transfer_form(ctx, f);
    uni = uni && is_unimodular(f) == is_unimodular(tf);
    long k = cb.find(FB, FB.from_amat(tf.rep.gram));
    if (k < 0 || !hit.insert(k).second) injective = false;
  }
  bool pair_ok = (ca.find(FA, FA.from_amat(q.rep.gram)) == ca.find(FA, FA.from_amat(q2.rep.gram))) ==
                 (cb.find(FB, FB.from_amat(tq.rep.gram)) == cb.find(FB, FB.from_amat(tq2.rep.gram)));
  rep.unimodularity_equivalence = note(uni, "unimodularity differs after transfer");
  rep.class_bijection =
      note(injective && hit.size() == cb.classes.size() && pair_ok, "class map is not a bijection");

  GroupEnumeration Oa = orthogonal_group(FA, q, budget), Ob = orthogonal_group(FB, tq, budget);
  rep.group_order = Oa.size();
  bool groups = Oa.size() == Ob.size();
  for (const auto& x : Oa.elements)
    if (!Ob.contains(FB, IdxMat{FB.index(ctx.to_target(FA.to_amat(x, m)))})) groups = false;
  rep.group_equality = note(groups, "isometry groups differ under the dictionary");

  DicksonContext da(q), db(tq);
  auto match = match_components(ctx, da.residue(), db.residue());
  const auto& Ia = da.components();
  const auto& Ib = db.components();
  bool split = true;
  for (std::size_t i = 0; i < match.size(); ++i) {
    if (!match[i]) {
      split = false;
      continue;
    }
    bool sa = std::find(Ia.begin(), Ia.end(), i) != Ia.end();
    bool sb = std::find(Ib.begin(), Ib.end(), *match[i]) != Ib.end();
    if (sa != sb) split = false;
  }
  rep.split_orthogonal_preserved = note(split && Ia.size() == Ib.size(), "split-orthogonal components differ");

  bool dickson = rep.split_orthogonal_preserved;
  if (dickson)
    for (const auto& x : Oa.elements) {
      AMat phi = FA.to_amat(x, m);
      DicksonSignature sa = da.signature(phi), sb = db.signature(AMat(1, 1, ctx.to_target(phi)));
      for (std::size_t k = 0; k < Ia.size(); ++k) {
        std::size_t pos = static_cast<std::size_t>(std::find(Ib.begin(), Ib.end(), *match[Ia[k]]) - Ib.begin());
        if (sa.bits[k] != sb.bits[pos]) dickson = false;
      }
    }
  rep.dickson_commutes = note(dickson, "Dickson invariants differ under the dictionary");
  return rep;
}

bool transfer_commutes_with_extension(const TransferContext& ctx, const BaseRing& dst, const QuadClass& q) {
  const Algebra& A = ctx.source->algebra;
  UnitaryRingPtr UK = scalar_extend(*ctx.source, dst);
  HermForm hK = make_herm(UK, amat_map(A, dst, ctx.base_form.form.gram));
  TransferContext ext = make_transfer(UK, hK);
  UnitaryRingPtr BK = scalar_extend(*ctx.target, dst);
  const UnitaryRing& T = *ext.target;
  if (T.algebra.structure() != BK->algebra.structure() || T.algebra.one() != BK->algebra.one()) return false;
  if (T.sigma != BK->sigma || T.u != BK->u) return false;
  if (!same_span(dst, T.lambda, BK->lambda)) return false;
  QuadClass a = transfer_form(ext, scalar_extend(q, UK));
  QuadClass b = transfer_form(ctx, q);
  return a.rep.gram == amat_map(ctx.target->algebra, dst, b.rep.gram);
}

}  // namespace unitary
