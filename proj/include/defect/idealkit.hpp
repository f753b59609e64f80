#pragma once

/* Ideal- and module-level operations on top of the Buchberger engine:
 * intersection (t-trick elimination), colon ideals, Artinian standard-monomial
 * bases with multiplication matrices, socles, Fitting ideals via maximal
 * minors, regular-sequence checks, and freeness-over-subring certificates
 * (rank agreement over Q and a configurable set of prime fibers). */

#include "defect/groebner.hpp"

namespace defect {

struct RingPresentation {
  Ring ring;
  std::vector<IPoly> relations;
};

/* --- field linear algebra ----------------------------------------------------- */

/* Basis of {x : m x = 0} as rows, by Gauss elimination over the field K. */
template <class K>
std::vector<std::vector<K>> right_kernel(Mat<K> m) {
  std::size_t rows = m.rows, cols = m.cols;
  std::vector<std::size_t> pivot_col;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && coeff_zero(m.at(piv, c))) ++piv;
    if (piv == rows) continue;
    for (std::size_t j = 0; j < cols; ++j) std::swap(m.at(rank, j), m.at(piv, j));
    K inv = coeff_inverse(m.at(rank, c));
    for (std::size_t j = 0; j < cols; ++j) m.at(rank, j) = m.at(rank, j) * inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == rank || coeff_zero(m.at(i, c))) continue;
      K f = m.at(i, c);
      for (std::size_t j = 0; j < cols; ++j)
        m.at(i, j) = m.at(i, j) - f * m.at(rank, j);
    }
    pivot_col.push_back(c);
    ++rank;
  }
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c : pivot_col) is_pivot[c] = true;
  /* derive field constants from any entry (carries the modulus for F_p) */
  K one = m.a.empty() ? coeff_from_long(K(), 1) : coeff_from_long(m.a[0], 1);
  K zero = m.a.empty() ? coeff_from_long(K(), 0) : coeff_from_long(m.a[0], 0);
  std::vector<std::vector<K>> out;
  for (std::size_t c = 0; c < cols; ++c) {
    if (is_pivot[c]) continue;
    std::vector<K> v(cols, zero);
    v[c] = one;
    for (std::size_t i = 0; i < rank; ++i)
      v[pivot_col[i]] = zero - m.at(i, c);
    out.push_back(std::move(v));
  }
  return out;
}

/* --- exact division, intersection, colon -------------------------------------- */

/* quotient g / f; throws if f does not divide g exactly */
template <class K>
Poly<K> poly_divide_exact(const Ring& r, const Poly<K>& g, const Poly<K>& f) {
  if (f.is_zero()) throw std::invalid_argument("poly_divide_exact: zero divisor");
  Poly<K> q;
  Poly<K> work = g;
  while (!work.is_zero()) {
    detail::tick();
    if (!mono_divides(f.t[0].first, work.t[0].first))
      throw std::invalid_argument("poly_divide_exact: not divisible");
    Monomial m = mono_div(work.t[0].first, f.t[0].first);
    K c = work.t[0].second * coeff_inverse(f.t[0].second);
    q.t.emplace_back(m, c);  /* quotient leading terms strictly decrease */
    work = poly_sub(r, work, poly_mul_term(r, f, m, c));
  }
  return q;
}

/* A ∩ B by eliminating a fresh symbol t from t·A + (1−t)·B. */
template <class K>
std::vector<Poly<K>> intersect_pair(const Ring& r, const std::vector<Poly<K>>& a,
                                    const std::vector<Poly<K>>& b) {
  std::string tn = "t_elim_";
  while (r.vt.index(tn)) tn += "x";
  std::size_t n = r.vt.nsym();
  std::vector<std::string> names = {tn};
  for (std::size_t i = 0; i < n; ++i) names.push_back(r.vt.name(i));
  Ring re{VarTable{names, {}}, MonomialOrder{OrderKind::grevlex, 1}};

  auto lift = [&](const Poly<K>& f) {
    std::vector<std::pair<Monomial, K>> terms;
    for (const auto& tm : f.t) {
      Monomial m(n + 1);
      for (std::size_t i = 0; i < n; ++i) m.e[i + 1] = tm.first.e[i];
      terms.emplace_back(std::move(m), tm.second);
    }
    return normalize(re, std::move(terms));
  };
  K one{};
  bool have_one = false;
  for (const auto* side : {&a, &b})
    for (const auto& f : *side)
      if (!f.is_zero()) {
        one = coeff_from_long(f.t[0].second, 1);
        have_one = true;
      }
  if (!have_one) return {};
  Poly<K> t = poly_sym(re, 0, one);
  Poly<K> one_minus_t = poly_sub(re, poly_const(re, one), t);
  std::vector<Poly<K>> gens;
  for (const auto& f : a) gens.push_back(poly_mul(re, t, lift(f)));
  for (const auto& f : b) gens.push_back(poly_mul(re, one_minus_t, lift(f)));

  std::vector<Poly<K>> el = eliminate(re, gens, {0});
  std::vector<Poly<K>> out;
  for (const auto& f : el) {
    std::vector<std::pair<Monomial, K>> terms;
    for (const auto& tm : f.t) {
      Monomial m(n);
      for (std::size_t i = 0; i < n; ++i) m.e[i] = tm.first.e[i + 1];
      terms.emplace_back(std::move(m), tm.second);
    }
    out.push_back(normalize(r, std::move(terms)));
  }
  return out;
}

/* (J : f) via (1/f)(J ∩ (f)). (J : 0) is the unit ideal. */
template <class K>
std::vector<Poly<K>> colon_single(const Ring& r, const std::vector<Poly<K>>& j,
                                  const Poly<K>& f) {
  if (f.is_zero()) {
    K one = coeff_from_long(K(), 1);
    for (const auto& g : j)
      if (!g.is_zero()) one = coeff_from_long(g.t[0].second, 1);
    return {poly_const(r, one)};
  }
  std::vector<Poly<K>> inter = intersect_pair(r, j, {f});
  std::vector<Poly<K>> out;
  for (const auto& g : inter)
    if (!g.is_zero()) out.push_back(poly_divide_exact(r, g, f));
  return out;
}

/* (J : I) = ∩_i (J : f_i) */
template <class K>
std::vector<Poly<K>> colon_ideal(const Ring& r, const std::vector<Poly<K>>& j,
                                 const std::vector<Poly<K>>& i) {
  bool first = true;
  std::vector<Poly<K>> acc;
  for (const auto& f : i) {
    if (f.is_zero()) continue;
    std::vector<Poly<K>> c = colon_single(r, j, f);
    acc = first ? std::move(c) : intersect_pair(r, acc, c);
    first = false;
  }
  if (first) throw std::invalid_argument("colon_ideal: zero ideal divisor");
  return acc;
}

/* --- staircases and Artinian quotients ---------------------------------------- */

struct StaircaseResult {
  bool finite = false;
  long dimension = 0;  /* -1 for the zero ring */
  std::vector<std::size_t> independent;  /* a maximal independent symbol set */
  std::vector<Monomial> basis;           /* standard monomials when finite */
};

/* dimension = size of a largest symbol set supporting no leading monomial */
long staircase_dimension(std::size_t nsym, const std::vector<Monomial>& lts,
                         std::vector<std::size_t>* witness = nullptr);

template <class K>
StaircaseResult staircase(const Ring& r, const std::vector<Poly<K>>& gb,
                          std::size_t cap = 2000000) {
  StaircaseResult out;
  std::vector<Monomial> lts;
  for (const auto& g : gb)
    if (!g.is_zero()) lts.push_back(g.t[0].first);
  for (const auto& m : lts)
    if (m.is_one()) {  /* unit ideal: zero ring */
      out.finite = true;
      out.dimension = -1;
      return out;
    }
  out.dimension = staircase_dimension(r.vt.nsym(), lts, &out.independent);
  if (out.dimension > 0) return out;
  out.finite = true;
  /* enumerate standard monomials by breadth-first closure */
  std::set<std::vector<int>> seen;
  std::deque<Monomial> queue;
  Monomial one(r.vt.nsym());
  queue.push_back(one);
  seen.insert(one.e);
  while (!queue.empty()) {
    Monomial m = queue.front();
    queue.pop_front();
    out.basis.push_back(m);
    if (out.basis.size() > cap)
      throw std::runtime_error("staircase: basis cap exceeded");
    for (std::size_t i = 0; i < r.vt.nsym(); ++i) {
      Monomial next = m;
      next.e[i] += 1;
      if (seen.count(next.e)) continue;
      bool divisible = false;
      for (const auto& l : lts)
        if (mono_divides(l, next)) {
          divisible = true;
          break;
        }
      if (!divisible) {
        seen.insert(next.e);
        queue.push_back(next);
      }
    }
  }
  std::sort(out.basis.begin(), out.basis.end(), [&](const auto& a, const auto& b) {
    return mono_cmp(r.ord, a, b) < 0;
  });
  return out;
}

/* coordinates of f in the standard-monomial basis of the Artinian quotient */
template <class K>
std::vector<K> nf_coords(const Ring& r, const std::vector<Poly<K>>& gb,
                         const std::vector<Monomial>& basis, const Poly<K>& f,
                         const K& zero) {
  Poly<K> nf = normal_form(r, f, gb);
  std::vector<K> out(basis.size(), zero);
  for (const auto& tm : nf.t) {
    auto it = std::find(basis.begin(), basis.end(), tm.first);
    if (it == basis.end())
      throw std::logic_error("nf_coords: normal form outside basis");
    out[static_cast<std::size_t>(it - basis.begin())] = tm.second;
  }
  return out;
}

/* matrix of multiplication by g: column j = coords of g * basis_j */
template <class K>
Mat<K> mult_matrix(const Ring& r, const std::vector<Poly<K>>& gb,
                   const std::vector<Monomial>& basis, const Poly<K>& g,
                   const K& zero) {
  Mat<K> m(basis.size(), basis.size());
  for (auto& x : m.a) x = zero;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    Poly<K> bj{{{basis[j], coeff_from_long(zero, 1)}}};
    std::vector<K> col = nf_coords(r, gb, basis, poly_mul(r, g, bj), zero);
    for (std::size_t i = 0; i < basis.size(); ++i) m.at(i, j) = col[i];
  }
  return m;
}

/* socle = simultaneous kernel of multiplication by the given symbols */
template <class K>
std::vector<std::vector<K>> socle_basis(const Ring& r,
                                        const std::vector<Poly<K>>& gb,
                                        const std::vector<Monomial>& basis,
                                        const std::vector<std::size_t>& syms,
                                        const K& zero) {
  if (basis.empty()) return {};
  std::size_t d = basis.size();
  Mat<K> stacked(syms.size() * d, d);
  for (auto& x : stacked.a) x = zero;
  K one = coeff_from_long(zero, 1);
  for (std::size_t k = 0; k < syms.size(); ++k) {
    Mat<K> mv = mult_matrix(r, gb, basis, poly_sym(r, syms[k], one), zero);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) stacked.at(k * d + i, j) = mv.at(i, j);
  }
  return right_kernel(stacked);
}

/* --- Fitting ideals ------------------------------------------------------------ */

template <class K>
Poly<K> poly_det(const Ring& r, const Mat<Poly<K>>& m,
                 const std::vector<std::size_t>& rows,
                 const std::vector<std::size_t>& cols) {
  if (rows.empty()) throw std::invalid_argument("poly_det: empty");
  if (rows.size() == 1) return m.at(rows[0], cols[0]);
  Poly<K> acc;
  std::vector<std::size_t> subcols(cols.begin() + 1, cols.end());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (m.at(rows[k], cols[0]).is_zero()) continue;
    std::vector<std::size_t> subrows;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (i != k) subrows.push_back(rows[i]);
    Poly<K> term =
        poly_mul(r, m.at(rows[k], cols[0]), poly_det(r, m, subrows, subcols));
    acc = (k % 2 == 0) ? poly_add(r, acc, term) : poly_sub(r, acc, term);
  }
  return acc;
}

/* all maximal (row-count) minors of a presentation matrix */
template <class K>
std::vector<Poly<K>> fitting_ideal(const Ring& r, const Mat<Poly<K>>& pres) {
  std::size_t m = pres.rows, n = pres.cols;
  std::vector<Poly<K>> out;
  if (n < m) return out;
  std::vector<std::size_t> rows(m);
  for (std::size_t i = 0; i < m; ++i) rows[i] = i;
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  for (;;) {
    Poly<K> d = poly_det(r, pres, rows, idx);
    if (!d.is_zero()) out.push_back(std::move(d));
    /* next column combination */
    std::size_t k = m;
    while (k > 0 && idx[k - 1] == n - m + (k - 1)) --k;
    if (k == 0) return out;
    ++idx[k - 1];
    for (std::size_t j = k; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/* --- regular sequences and freeness -------------------------------------------- */

struct RegSeqReport {
  bool regular_q = false, regular_fp = false;
  std::vector<long> dims_q, dims_fp;  /* dimension after each step */
  std::optional<std::size_t> uniformizer_at;
  StaircaseResult final_fp;  /* fiber quotient after the whole sequence */
};

RegSeqReport is_regular_sequence(const Ring& r,
                                 const std::vector<IPoly>& relations,
                                 const std::vector<IPoly>& seq, long p);

struct FiberRank {
  long prime = 0;  /* 0 for Q */
  long rank = -1;
  bool basis_matches_q = true;
};

struct FreenessReport {
  bool ok = false;
  bool artinian = false;
  long expected = 0;
  std::vector<FiberRank> fibers;
  std::vector<Monomial> basis_q;
  std::string note;
};

FreenessReport verify_free_over_subring(const Ring& r,
                                        const std::vector<IPoly>& relations,
                                        const std::vector<IPoly>& images,
                                        long expected_rank,
                                        const std::vector<long>& primes);

/* ideal equality over Q and over each F_p fiber */
bool ideal_equal_fibers(const Ring& r, const std::vector<IPoly>& a,
                        const std::vector<IPoly>& b,
                        const std::vector<long>& primes);

std::vector<QPoly> to_rational(const Ring& r, const std::vector<IPoly>& v);
std::vector<FPoly> to_fp(const Ring& r, const std::vector<IPoly>& v, long p);

}  // namespace defect
