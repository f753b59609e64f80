#pragma once

/* Buchberger engine over field coefficients (Q or F_p): canonical reduced
 * Groebner bases, normal forms, variable elimination, and module Groebner
 * bases with position-over-term order for syzygy computation. All reduction
 * work is metered against a thread-local step budget. */

#include <cstdlib>
#include <deque>
#include <set>

#include "defect/polyring.hpp"

namespace defect {

/* --- reduction budget ------------------------------------------------------ */

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
inline long default_budget() {
  const char* e = std::getenv("DEFECT_BUDGET");
  return e ? std::atol(e) : 500000000L;
}
struct BudgetState {
  long limit = default_budget();
  long steps = 0;
};
inline thread_local BudgetState g_budget;
inline void tick() {
  if (++g_budget.steps > g_budget.limit && g_budget.limit > 0)
    throw BudgetExceeded("reduction step budget exhausted");
}
}  // namespace detail

inline long reduction_steps() { return detail::g_budget.steps; }

/* Scoped budget override; restores and charges consumed steps to the outer
 * scope on exit. */
class BudgetGuard {
  detail::BudgetState saved_;

 public:
  explicit BudgetGuard(long limit) : saved_(detail::g_budget) {
    detail::g_budget = {limit, 0};
  }
  ~BudgetGuard() {
    saved_.steps += detail::g_budget.steps;
    detail::g_budget = saved_;
  }
  BudgetGuard(const BudgetGuard&) = delete;
  BudgetGuard& operator=(const BudgetGuard&) = delete;
};

/* --- basics ----------------------------------------------------------------- */

template <class K>
const Monomial& lt_mono(const Poly<K>& f) {
  if (f.is_zero()) throw std::invalid_argument("lt_mono of zero polynomial");
  return f.t[0].first;
}

template <class K>
const K& lc(const Poly<K>& f) {
  if (f.is_zero()) throw std::invalid_argument("lc of zero polynomial");
  return f.t[0].second;
}

template <class K>
Poly<K> make_monic(const Poly<K>& f) {
  if (f.is_zero()) return f;
  Poly<K> out = f;
  K inv = coeff_inverse(f.t[0].second);
  for (auto& tm : out.t) tm.second = tm.second * inv;
  return out;
}

/* Fully reduced normal form of f modulo basis (every term irreducible). */
template <class K>
Poly<K> normal_form(const Ring& r, Poly<K> work,
                    const std::vector<Poly<K>>& basis) {
  Poly<K> rem;
  while (!work.is_zero()) {
    detail::tick();
    const Monomial& m = work.t[0].first;
    const K c = work.t[0].second;
    bool reduced = false;
    for (const auto& g : basis) {
      if (g.is_zero() || !mono_divides(g.t[0].first, m)) continue;
      K factor = c * coeff_inverse(g.t[0].second);
      work = poly_sub(r, work, poly_mul_term(r, g, mono_div(m, g.t[0].first),
                                             factor));
      reduced = true;
      break;
    }
    if (!reduced) {
      rem.t.push_back(work.t[0]);  /* leading monomials strictly decrease */
      work.t.erase(work.t.begin());
    }
  }
  return rem;
}

namespace detail {

template <class K>
Poly<K> spoly(const Ring& r, const Poly<K>& f, const Poly<K>& g) {
  Monomial l = mono_lcm(f.t[0].first, g.t[0].first);
  /* both monic */
  return poly_sub(r, poly_mul_term(r, f, mono_div(l, f.t[0].first),
                                   coeff_from_long(f.t[0].second, 1)),
                  poly_mul_term(r, g, mono_div(l, g.t[0].first),
                                coeff_from_long(g.t[0].second, 1)));
}

}  // namespace detail

/* Canonical reduced Groebner basis: monic, pairwise fully reduced, sorted by
 * decreasing leading monomial. Unique for a given ideal and order, hence
 * usable for ideal equality. Unit ideal yields {1}; zero ideal yields {}. */
template <class K>
std::vector<Poly<K>> buchberger(const Ring& r, const std::vector<Poly<K>>& gens) {
  std::vector<Poly<K>> basis;
  for (const auto& g : gens)
    if (!g.is_zero()) basis.push_back(make_monic(g));

  struct Pair {
    std::size_t i, j;
    Monomial l;
  };
  auto later = [&](const Pair& a, const Pair& b) {
    int da = a.l.degree(), db = b.l.degree();
    if (da != db) return da > db;
    return mono_cmp(r.ord, a.l, b.l) > 0;
  };
  std::vector<Pair> pairs;
  auto push_pairs = [&](std::size_t j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (mono_coprime(basis[i].t[0].first, basis[j].t[0].first)) continue;
      pairs.push_back({i, j, mono_lcm(basis[i].t[0].first, basis[j].t[0].first)});
    }
  };
  for (std::size_t j = 0; j < basis.size(); ++j) push_pairs(j);

  while (!pairs.empty()) {
    detail::tick();
    auto it = std::min_element(pairs.begin(), pairs.end(),
                               [&](const Pair& a, const Pair& b) {
                                 return later(b, a);
                               });
    Pair pr = *it;
    pairs.erase(it);
    /* chain criterion: a third element whose leading monomial divides the lcm,
     * with both companion lcms proper divisors and both companion pairs
     * already treated, lets us skip this pair (proper divisibility rules out
     * cyclic skipping) */
    bool skip = false;
    for (std::size_t k = 0; k < basis.size() && !skip; ++k) {
      if (k == pr.i || k == pr.j) continue;
      if (!mono_divides(basis[k].t[0].first, pr.l)) continue;
      if (mono_lcm(basis[k].t[0].first, basis[pr.i].t[0].first) == pr.l ||
          mono_lcm(basis[k].t[0].first, basis[pr.j].t[0].first) == pr.l)
        continue;
      bool pending = false;
      for (const auto& q : pairs)
        if ((q.i == std::min(pr.i, k) && q.j == std::max(pr.i, k)) ||
            (q.i == std::min(pr.j, k) && q.j == std::max(pr.j, k))) {
          pending = true;
          break;
        }
      if (!pending) skip = true;
    }
    if (skip) continue;

    Poly<K> h = normal_form(r, detail::spoly(r, basis[pr.i], basis[pr.j]), basis);
    if (h.is_zero()) continue;
    basis.push_back(make_monic(h));
    push_pairs(basis.size() - 1);
  }

  /* inter-reduce to the canonical form */
  for (;;) {
    bool changed = false;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      Poly<K> f = basis[i];
      basis[i] = Poly<K>{};  /* exclude self */
      Poly<K> nf = normal_form(r, f, basis);
      basis[i] = make_monic(nf);
      if (!(basis[i] == f)) changed = true;
    }
    std::erase_if(basis, [](const Poly<K>& f) { return f.is_zero(); });
    if (!changed) break;
  }
  std::sort(basis.begin(), basis.end(), [&](const Poly<K>& a, const Poly<K>& b) {
    return mono_cmp(r.ord, a.t[0].first, b.t[0].first) > 0;
  });
  return basis;
}

template <class K>
bool in_ideal(const Ring& r, const Poly<K>& f, const std::vector<Poly<K>>& gb) {
  return normal_form(r, f, gb).is_zero();
}

template <class K>
bool ideal_equal(const Ring& r, const std::vector<Poly<K>>& a,
                 const std::vector<Poly<K>>& b) {
  return buchberger(r, a) == buchberger(r, b);
}

/* --- elimination ------------------------------------------------------------ */

/* Generators of the ideal (gens) ∩ K[symbols not in elim_idx], returned in the
 * original ring normalized to its order. Uses a permuted copy of the ring with
 * the eliminated symbols in a dominant grevlex block. */
template <class K>
std::vector<Poly<K>> eliminate(const Ring& r, const std::vector<Poly<K>>& gens,
                               const std::vector<std::size_t>& elim_idx) {
  std::size_t n = r.vt.nsym();
  std::vector<bool> is_elim(n, false);
  for (std::size_t i : elim_idx) is_elim.at(i) = true;
  std::vector<std::size_t> old_of_new;  /* permutation: new index -> old */
  for (std::size_t i = 0; i < n; ++i)
    if (is_elim[i]) old_of_new.push_back(i);
  std::size_t nelim = old_of_new.size();
  for (std::size_t i = 0; i < n; ++i)
    if (!is_elim[i]) old_of_new.push_back(i);

  std::vector<std::string> names(n);
  std::vector<std::size_t> new_of_old(n);
  for (std::size_t k = 0; k < n; ++k) {
    names[k] = r.vt.name(old_of_new[k]);
    new_of_old[old_of_new[k]] = k;
  }
  Ring re{VarTable{names, {}}, MonomialOrder{OrderKind::grevlex, nelim}};

  auto permute = [n](const Ring& dst, const Poly<K>& f,
                     const std::vector<std::size_t>& map) {
    std::vector<std::pair<Monomial, K>> terms;
    terms.reserve(f.t.size());
    for (const auto& tm : f.t) {
      Monomial m(n);
      for (std::size_t i = 0; i < n; ++i) m.e[map[i]] = tm.first.e[i];
      terms.emplace_back(std::move(m), tm.second);
    }
    return normalize(dst, std::move(terms));
  };

  std::vector<Poly<K>> moved;
  for (const auto& g : gens) moved.push_back(permute(re, g, new_of_old));
  std::vector<Poly<K>> gb = buchberger(re, moved);

  std::vector<Poly<K>> out;
  for (const auto& g : gb) {
    bool uses_elim = false;
    for (const auto& tm : g.t)
      for (std::size_t k = 0; k < nelim && !uses_elim; ++k)
        if (tm.first.e[k] != 0) uses_elim = true;
    if (!uses_elim) out.push_back(permute(r, g, old_of_new));
  }
  return out;
}

/* --- modules (POT, component 0 dominant) ------------------------------------ */

template <class K>
using ModVec = std::vector<Poly<K>>;

template <class K>
ModVec<K> mod_sub(const Ring& r, const ModVec<K>& a, const ModVec<K>& b) {
  ModVec<K> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = poly_sub(r, a[i], b[i]);
  return out;
}

template <class K>
ModVec<K> mod_mul_term(const Ring& r, const ModVec<K>& a, const Monomial& m,
                       const K& c) {
  ModVec<K> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    out[i] = poly_mul_term(r, a[i], m, c);
  return out;
}

template <class K>
bool mod_is_zero(const ModVec<K>& a) {
  for (const auto& f : a)
    if (!f.is_zero()) return false;
  return true;
}

template <class K>
std::size_t leading_component(const ModVec<K>& a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!a[i].is_zero()) return i;
  throw std::invalid_argument("leading_component of zero vector");
}

template <class K>
ModVec<K> mod_make_monic(const ModVec<K>& a) {
  std::size_t c = leading_component(a);
  K inv = coeff_inverse(a[c].t[0].second);
  ModVec<K> out = a;
  for (auto& f : out)
    for (auto& tm : f.t) tm.second = tm.second * inv;
  return out;
}

/* Top-reduction of w against basis (POT order, component 0 dominant). */
template <class K>
ModVec<K> module_normal_form(const Ring& r, ModVec<K> w,
                             const std::vector<ModVec<K>>& basis) {
  for (;;) {
    if (mod_is_zero(w)) return w;
    std::size_t c = leading_component(w);
    const Monomial& m = w[c].t[0].first;
    bool reduced = false;
    for (const auto& h : basis) {
      if (mod_is_zero(h) || leading_component(h) != c) continue;
      const Monomial& hm = h[c].t[0].first;
      if (!mono_divides(hm, m)) continue;
      detail::tick();
      K factor = w[c].t[0].second * coeff_inverse(h[c].t[0].second);
      w = mod_sub(r, w, mod_mul_term(r, h, mono_div(m, hm), factor));
      reduced = true;
      break;
    }
    if (!reduced) return w;
  }
}

/* Module Groebner basis (POT, component 0 dominant, S-pairs within a common
 * leading component). */
template <class K>
std::vector<ModVec<K>> module_buchberger(const Ring& r,
                                         const std::vector<ModVec<K>>& gens) {
  std::vector<ModVec<K>> basis;
  for (const auto& g : gens)
    if (!mod_is_zero(g)) basis.push_back(mod_make_monic(g));

  std::deque<std::pair<std::size_t, std::size_t>> pairs;
  auto push_pairs = [&](std::size_t j) {
    std::size_t cj = leading_component(basis[j]);
    for (std::size_t i = 0; i < j; ++i)
      if (leading_component(basis[i]) == cj) pairs.emplace_back(i, j);
  };
  for (std::size_t j = 0; j < basis.size(); ++j) push_pairs(j);

  while (!pairs.empty()) {
    detail::tick();
    auto [i, j] = pairs.front();
    pairs.pop_front();
    std::size_t c = leading_component(basis[i]);
    const Monomial& mi = basis[i][c].t[0].first;
    const Monomial& mj = basis[j][c].t[0].first;
    Monomial l = mono_lcm(mi, mj);
    K one = coeff_from_long(basis[i][c].t[0].second, 1);
    ModVec<K> s = mod_sub(r, mod_mul_term(r, basis[i], mono_div(l, mi), one),
                          mod_mul_term(r, basis[j], mono_div(l, mj), one));
    ModVec<K> h = module_normal_form(r, std::move(s), basis);
    if (mod_is_zero(h)) continue;
    basis.push_back(mod_make_monic(h));
    push_pairs(basis.size() - 1);
  }
  return basis;
}

/* Generators of the syzygy module {(a_1..a_m) : sum a_i g_i = 0} via a module
 * Groebner basis of the graphs g_i e_0 + e_i; elements with vanishing e_0
 * part restrict to a Groebner basis of the syzygies. */
template <class K>
std::vector<std::vector<Poly<K>>> syzygies(const Ring& r,
                                           const std::vector<Poly<K>>& gens) {
  std::size_t m = gens.size();
  K one{};
  bool have_one = false;
  for (const auto& g : gens)
    if (!g.is_zero()) {
      one = coeff_from_long(g.t[0].second, 1);
      have_one = true;
      break;
    }
  if (!have_one) throw std::invalid_argument("syzygies: all generators zero");
  std::vector<ModVec<K>> graphs;
  for (std::size_t i = 0; i < m; ++i) {
    ModVec<K> w(m + 1);
    w[0] = gens[i];
    w[i + 1] = poly_const(r, one);
    graphs.push_back(std::move(w));
  }
  std::vector<ModVec<K>> gb = module_buchberger(r, graphs);
  std::vector<std::vector<Poly<K>>> out;
  for (auto& h : gb)
    if (h[0].is_zero())
      out.emplace_back(h.begin() + 1, h.end());
  return out;
}

}  // namespace defect
