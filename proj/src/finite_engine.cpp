#include "unitary/finite_engine.hpp"

#include <algorithm>
#include <set>

namespace unitary {

namespace {

// N^len, or 0 on overflow past 2^62.
std::uint64_t checked_power(std::uint64_t N, std::size_t len) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < len; ++i) {
    if (r > (std::uint64_t{1} << 62) / std::max<std::uint64_t>(N, 1)) return 0;
    r *= N;
  }
  return r;
}

}  // namespace

FiniteUnitary::FiniteUnitary(UnitaryRingPtr U, std::uint64_t max_elements) : U_(std::move(U)), R_(U_->base()) {
  if (R_.kind() != RingKind::FiniteField && R_.kind() != RingKind::TruncatedLocal)
    fail(ErrorKind::Unsupported, "tabulation needs a finite local base ring, got " + R_.name());
  n_ = U_->rank();
  r_ = static_cast<Idx>(R_.cardinality());
  std::uint64_t N = checked_power(r_, n_);
  if (N == 0 || N > max_elements)
    fail(ErrorKind::BudgetExceeded, "ring " + R_.name() + "^" + std::to_string(n_) + " too large to tabulate");
  N_ = static_cast<Idx>(N);

  badd_.resize(r_ * r_);
  bmul_.resize(r_ * r_);
  bneg_.resize(r_);
  binv_.assign(r_, kNone);
  std::vector<RingElem> belem(r_);
  for (Idx i = 0; i < r_; ++i) belem[i] = R_.element_at(i);
  for (Idx i = 0; i < r_; ++i) {
    bneg_[i] = static_cast<Idx>(R_.index_of(R_.neg(belem[i])));
    if (R_.is_unit(belem[i])) binv_[i] = static_cast<Idx>(R_.index_of(R_.inverse(belem[i])));
    for (Idx j = 0; j < r_; ++j) {
      badd_[i * r_ + j] = static_cast<Idx>(R_.index_of(R_.add(belem[i], belem[j])));
      bmul_[i * r_ + j] = static_cast<Idx>(R_.index_of(R_.mul(belem[i], belem[j])));
    }
  }
  if (R_.index_of(R_.zero()) != 0) fail(ErrorKind::InvalidInput, "base enumeration must start at zero");
  auto badd = [&](Idx a, Idx b) { return badd_[a * r_ + b]; };
  auto bmul = [&](Idx a, Idx b) { return bmul_[a * r_ + b]; };

  // digits[a * n + k] = base index of coordinate k of element a.
  std::vector<Idx> digits(static_cast<std::size_t>(N_) * n_);
  for (Idx a = 0; a < N_; ++a) {
    Idx v = a;
    for (std::size_t k = 0; k < n_; ++k) {
      digits[a * n_ + k] = v % r_;
      v /= r_;
    }
  }
  auto compose = [&](const std::vector<Idx>& d) {
    Idx v = 0;
    for (std::size_t k = n_; k-- > 0;) v = v * r_ + d[k];
    return v;
  };

  const Algebra& A = U_->algebra;
  std::vector<Idx> sc(n_ * n_ * n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t k = 0; k < n_; ++k) sc[(i * n_ + j) * n_ + k] = static_cast<Idx>(R_.index_of(A.c(i, j, k)));

  add_.resize(static_cast<std::size_t>(N_) * N_);
  mul_.resize(static_cast<std::size_t>(N_) * N_);
  std::vector<Idx> d(n_);
  for (Idx a = 0; a < N_; ++a)
    for (Idx b = 0; b < N_; ++b) {
      for (std::size_t k = 0; k < n_; ++k) d[k] = badd(digits[a * n_ + k], digits[b * n_ + k]);
      add_[a * N_ + b] = compose(d);
      std::fill(d.begin(), d.end(), 0);
      for (std::size_t i = 0; i < n_; ++i) {
        Idx ai = digits[a * n_ + i];
        if (ai == 0) continue;
        for (std::size_t j = 0; j < n_; ++j) {
          Idx bj = digits[b * n_ + j];
          if (bj == 0) continue;
          Idx ab = bmul(ai, bj);
          for (std::size_t k = 0; k < n_; ++k) {
            Idx c = sc[(i * n_ + j) * n_ + k];
            if (c) d[k] = badd(d[k], bmul(ab, c));
          }
        }
      }
      mul_[a * N_ + b] = compose(d);
    }

  neg_.resize(N_);
  for (Idx a = 0; a < N_; ++a) {
    for (std::size_t k = 0; k < n_; ++k) d[k] = bneg_[digits[a * n_ + k]];
    neg_[a] = compose(d);
  }
  sigma_ = sigma_table(U_->sigma);
  one_ = index(A.one());
  u_ = index(U_->u);

  inv_.assign(N_, kNone);
  for (Idx a = 0; a < N_; ++a)
    for (Idx b = 0; b < N_; ++b)
      if (mul(a, b) == one_ && mul(b, a) == one_) {
        inv_[a] = b;
        break;
      }

  std::set<Idx> lam{0};
  for (const auto& gen : U_->lambda) {
    Idx g = index(gen);
    std::set<Idx> next = lam;
    for (Idx c = 0; c < r_; ++c) {
      for (std::size_t k = 0; k < n_; ++k) d[k] = bmul(c, digits[g * n_ + k]);
      Idx scaled = compose(d);
      for (Idx l : lam) next.insert(add(l, scaled));
    }
    lam = std::move(next);
  }
  lambda_.assign(lam.begin(), lam.end());
  lambda_canon_.resize(N_);
  for (Idx a = 0; a < N_; ++a) {
    Idx best = kNone;
    for (Idx l : lambda_) best = std::min(best, add(a, l));
    lambda_canon_[a] = best;
  }

  lmat_.resize(static_cast<std::size_t>(N_) * n_ * n_);
  std::vector<Idx> basis_idx(n_);
  for (std::size_t j = 0; j < n_; ++j) basis_idx[j] = index(A.basis(j));
  for (Idx a = 0; a < N_; ++a)
    for (std::size_t j = 0; j < n_; ++j) {
      Idx prod = mul(a, basis_idx[j]);
      for (std::size_t i = 0; i < n_; ++i) lmat_[(a * n_ + i) * n_ + j] = digits[prod * n_ + i];
    }
}

AlgElem FiniteUnitary::element(Idx a) const {
  AlgElem r(n_);
  for (std::size_t k = 0; k < n_; ++k) {
    r[k] = R_.element_at(a % r_);
    a /= r_;
  }
  return r;
}

Idx FiniteUnitary::index(const AlgElem& a) const {
  if (a.size() != n_) fail(ErrorKind::InvalidInput, "element has wrong length");
  Idx v = 0;
  for (std::size_t k = n_; k-- > 0;) v = v * r_ + static_cast<Idx>(R_.index_of(a[k]));
  return v;
}

Idx FiniteUnitary::inverse(Idx a) const {
  if (inv_[a] == kNone) fail(ErrorKind::NotInvertible, "element is not a unit");
  return inv_[a];
}

std::vector<Idx> FiniteUnitary::sigma_table(const Matrix& sigma) const {
  std::vector<Idx> t(N_);
  for (Idx a = 0; a < N_; ++a) t[a] = index(mat_apply(R_, sigma, element(a)));
  return t;
}

IdxMat FiniteUnitary::identity(std::size_t m) const {
  IdxMat r(m * m, 0);
  for (std::size_t i = 0; i < m; ++i) r[i * m + i] = one_;
  return r;
}

IdxMat FiniteUnitary::mat_mul(const IdxMat& x, const IdxMat& y, std::size_t m) const {
  IdxMat r(m * m, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      Idx a = x[i * m + k];
      if (a == 0) continue;
      for (std::size_t j = 0; j < m; ++j) r[i * m + j] = add(r[i * m + j], mul(a, y[k * m + j]));
    }
  return r;
}

IdxMat FiniteUnitary::pullback(const IdxMat& phi, const IdxMat& g, std::size_t m, const std::vector<Idx>& sig) const {
  IdxMat t = mat_mul(g, phi, m);
  IdxMat r(m * m, 0);
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t k = 0; k < m; ++k) {
      Idx a = sig[phi[k * m + s]];
      if (a == 0) continue;
      for (std::size_t j = 0; j < m; ++j) r[s * m + j] = add(r[s * m + j], mul(a, t[k * m + j]));
    }
  return r;
}

bool FiniteUnitary::is_invertible(const IdxMat& x, std::size_t m) const {
  std::size_t D = m * n_;
  std::vector<Idx> M(D * D);
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t t = 0; t < m; ++t) {
      Idx a = x[s * m + t];
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) M[(s * n_ + i) * D + t * n_ + j] = lmat_[(a * n_ + i) * n_ + j];
    }
  for (std::size_t c = 0; c < D; ++c) {
    std::size_t piv = D;
    for (std::size_t r = c; r < D; ++r)
      if (binv_[M[r * D + c]] != kNone) {
        piv = r;
        break;
      }
    if (piv == D) return false;
    if (piv != c)
      for (std::size_t j = 0; j < D; ++j) std::swap(M[c * D + j], M[piv * D + j]);
    Idx inv = binv_[M[c * D + c]];
    for (std::size_t r = c + 1; r < D; ++r) {
      Idx f = bmul_[M[r * D + c] * r_ + inv];
      if (f == 0) continue;
      Idx nf = bneg_[f];
      for (std::size_t j = c; j < D; ++j) M[r * D + j] = badd_[M[r * D + j] * r_ + bmul_[nf * r_ + M[c * D + j]]];
    }
  }
  return true;
}

IdxMat FiniteUnitary::from_amat(const AMat& x) const {
  IdxMat r;
  for (const auto& e : x.entries()) r.push_back(index(e));
  return r;
}

AMat FiniteUnitary::to_amat(const IdxMat& x, std::size_t m) const {
  AMat r(m, m, AlgElem{});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) r(i, j) = element(x[i * m + j]);
  return r;
}

IdxMat FiniteUnitary::quad_canon(const IdxMat& g, std::size_t m) const {
  IdxMat r(m * m, 0);
  for (std::size_t s = 0; s < m; ++s) {
    r[s * m + s] = lambda_canon(g[s * m + s]);
    for (std::size_t t = 0; t < s; ++t) r[s * m + t] = add(g[s * m + t], mul(sigma(g[t * m + s]), u_));
  }
  return r;
}

IdxMat FiniteUnitary::herm(const IdxMat& g, std::size_t m) const {
  IdxMat r(m * m, 0);
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t t = 0; t < m; ++t) r[s * m + t] = add(g[s * m + t], mul(sigma(g[t * m + s]), u_));
  return r;
}

std::uint64_t FiniteUnitary::code(const IdxMat& x) const {
  std::uint64_t c = 0;
  for (std::size_t i = x.size(); i-- > 0;) c = c * N_ + x[i];
  return c;
}

const std::vector<IdxMat>& FiniteUnitary::general_linear(std::size_t m, std::uint64_t budget) const {
  auto it = gl_cache_.find(m);
  if (it != gl_cache_.end()) return it->second;
  std::uint64_t total = checked_power(N_, m * m);
  if (total == 0 || total > budget)
    fail(ErrorKind::BudgetExceeded, "enumerating " + std::to_string(m) + "x" + std::to_string(m) +
                                        " matrices over a ring of size " + std::to_string(N_) + " exceeds the budget");
  std::vector<IdxMat> out;
  IdxMat x(m * m, 0);
  for (std::uint64_t c = 0; c < total; ++c) {
    std::uint64_t v = c;
    for (std::size_t i = m * m; i-- > 0;) {
      x[i] = static_cast<Idx>(v % N_);
      v /= N_;
    }
    if (is_invertible(x, m)) out.push_back(x);
  }
  return gl_cache_.emplace(m, std::move(out)).first->second;
}

// --------------------------------------------------------- classification

namespace {

struct Slot {
  std::size_t pos;
  const std::vector<Idx>* values;
};

}  // namespace

long FormClassification::find(const FiniteUnitary& F, const IdxMat& g) const {
  IdxMat c = flavor == Flavor::Quadratic ? F.quad_canon(g, rank) : g;
  auto it = class_of.find(F.code(c));
  return it == class_of.end() ? -1 : static_cast<long>(it->second);
}

FormClassification brute_force_classify(const FiniteUnitary& F, const ClassifyOptions& opts) {
  std::size_t m = opts.rank;
  if (m == 0) fail(ErrorKind::InvalidInput, "classification rank must be positive");
  Idx N = F.size();
  std::vector<std::vector<Idx>> sigs;
  if (opts.flavor == Flavor::System) {
    if (opts.system_involutions.empty()) fail(ErrorKind::InvalidInput, "system flavor needs involutions");
    for (const auto& s : opts.system_involutions) sigs.push_back(F.sigma_table(s));
  }
  std::size_t k = opts.flavor == Flavor::System ? sigs.size() : 1;
  if (checked_power(N, k * m * m) == 0) fail(ErrorKind::BudgetExceeded, "form codes overflow");

  std::vector<Idx> all(N), diag_q, diag_h;
  for (Idx a = 0; a < N; ++a) {
    all[a] = a;
    if (F.lambda_canon(a) == a) diag_q.push_back(a);
    if (F.mul(F.sigma(a), F.u()) == a) diag_h.push_back(a);
  }
  std::vector<Slot> slots;
  for (std::size_t f = 0; f < k; ++f)
    for (std::size_t s = 0; s < m; ++s)
      for (std::size_t t = 0; t < m; ++t) {
        std::size_t pos = f * m * m + s * m + t;
        switch (opts.flavor) {
          case Flavor::Quadratic:
            if (s == t) slots.push_back({pos, &diag_q});
            else if (s > t) slots.push_back({pos, &all});
            break;
          case Flavor::Hermitian:
            if (s == t) slots.push_back({pos, &diag_h});
            else if (s < t) slots.push_back({pos, &all});
            break;
          case Flavor::System:
            slots.push_back({pos, &all});
            break;
        }
      }
  std::uint64_t total = 1;
  for (const auto& sl : slots) {
    total *= sl.values->size();
    if (total > opts.budget) fail(ErrorKind::BudgetExceeded, "form enumeration exceeds the budget");
  }

  auto unimodular = [&](const IdxMat& g) {
    switch (opts.flavor) {
      case Flavor::Quadratic: return F.is_invertible(F.herm(g, m), m);
      case Flavor::Hermitian: return F.is_invertible(g, m);
      case Flavor::System:
        for (std::size_t f = 0; f < k; ++f)
          if (!F.is_invertible(IdxMat(g.begin() + f * m * m, g.begin() + (f + 1) * m * m), m)) return false;
        return true;
    }
    return false;
  };
  auto act = [&](const IdxMat& phi, const IdxMat& g) {
    switch (opts.flavor) {
      case Flavor::Quadratic: return F.quad_canon(F.pullback(phi, g, m), m);
      case Flavor::Hermitian: return F.pullback(phi, g, m);
      case Flavor::System: {
        IdxMat r;
        for (std::size_t f = 0; f < k; ++f) {
          IdxMat part(g.begin() + f * m * m, g.begin() + (f + 1) * m * m);
          IdxMat img = F.pullback(phi, part, m, sigs[f]);
          r.insert(r.end(), img.begin(), img.end());
        }
        return r;
      }
    }
    return g;
  };

  const auto& GL = F.general_linear(m, opts.budget);
  FormClassification out;
  out.flavor = opts.flavor;
  out.rank = m;
  out.group_order = GL.size();
  std::vector<std::size_t> counter(slots.size(), 0);
  IdxMat g(k * m * m, 0);
  std::uint64_t work = 0;
  for (std::uint64_t c = 0; c < total; ++c) {
    std::uint64_t v = c;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      std::size_t sz = slots[i].values->size();
      g[slots[i].pos] = (*slots[i].values)[v % sz];
      v /= sz;
    }
    if (opts.flavor == Flavor::Hermitian)
      for (std::size_t s = 0; s < m; ++s)
        for (std::size_t t = s + 1; t < m; ++t) g[t * m + s] = F.mul(F.sigma(g[s * m + t]), F.u());
    bool uni = unimodular(g);
    if (opts.unimodular_only && !uni) continue;
    ++out.total_forms;
    std::uint64_t gc = F.code(g);
    if (out.class_of.count(gc)) continue;
    work += GL.size();
    if (work > opts.budget * 4) fail(ErrorKind::BudgetExceeded, "orbit computation exceeds the budget");
    std::size_t id = out.classes.size();
    FormClass fc;
    fc.representative = g;
    fc.unimodular = uni;
    for (const auto& phi : GL) {
      IdxMat img = act(phi, g);
      std::uint64_t ic = F.code(img);
      if (ic == gc) ++fc.stabilizer_size;
      auto [it, inserted] = out.class_of.emplace(ic, id);
      if (inserted) ++fc.orbit_size;
      else if (it->second != id) fail(ErrorKind::InvalidInput, "orbit bookkeeping inconsistent");
    }
    out.classes.push_back(std::move(fc));
  }
  return out;
}

std::optional<IdxMat> find_isometry(const FiniteUnitary& F, const IdxMat& a, const IdxMat& b, std::size_t m,
                                    std::uint64_t budget) {
  std::uint64_t target = F.code(F.quad_canon(a, m));
  for (const auto& phi : F.general_linear(m, budget))
    if (F.code(F.quad_canon(F.pullback(phi, b, m), m)) == target) return phi;
  return std::nullopt;
}

}  // namespace unitary
