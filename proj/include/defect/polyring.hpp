#pragma once

/* Multivariate polynomial arithmetic with named variables and formal
 * parameters, monomial orders (lex / grevlex / block with variables above
 * parameters), Jacobians, and specialization to DVR values. Parameters are
 * ordinary smallest-block symbols, realizing computations over Z[q_,s_,t_]
 * before specialization. */

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "defect/exactalg.hpp"

namespace defect {

struct VarTable {
  std::vector<std::string> vars;
  std::vector<std::string> params;

  std::size_t nvars() const { return vars.size(); }
  std::size_t nsym() const { return vars.size() + params.size(); }
  bool is_var(std::size_t idx) const { return idx < vars.size(); }
  const std::string& name(std::size_t idx) const {
    return idx < vars.size() ? vars[idx] : params[idx - vars.size()];
  }
  std::optional<std::size_t> index(const std::string& n) const;
};

VarTable make_var_table(std::vector<std::string> vars,
                        std::vector<std::string> params);

struct Monomial {
  std::vector<int> e;

  explicit Monomial(std::size_t nsym = 0) : e(nsym, 0) {}
  int degree() const;
  bool is_one() const;
  bool operator==(const Monomial&) const = default;
};

Monomial mono_mul(const Monomial& a, const Monomial& b);
bool mono_divides(const Monomial& a, const Monomial& b);  /* a | b */
Monomial mono_div(const Monomial& b, const Monomial& a);  /* b / a */
Monomial mono_lcm(const Monomial& a, const Monomial& b);
bool mono_coprime(const Monomial& a, const Monomial& b);

enum class OrderKind { lex, grevlex };

struct MonomialOrder {
  OrderKind kind = OrderKind::grevlex;
  /* symbols with index < block_split form the dominant block; nsym (or more)
   * means a single block */
  std::size_t block_split = static_cast<std::size_t>(-1);
};

/* >0 if a > b, 0 if equal, <0 if a < b */
int mono_cmp(const MonomialOrder& ord, const Monomial& a, const Monomial& b);

struct Ring {
  VarTable vt;
  MonomialOrder ord;
};

/* Block order with variables above parameters. */
Ring make_ring(std::vector<std::string> vars, std::vector<std::string> params,
               OrderKind kind = OrderKind::grevlex);

template <class K>
struct Poly {
  /* strictly descending in the ambient ring's order; no zero coefficients */
  std::vector<std::pair<Monomial, K>> t;

  bool is_zero() const { return t.empty(); }
  bool operator==(const Poly&) const = default;
};

using IPoly = Poly<Int>;
using QPoly = Poly<Rat>;
using FPoly = Poly<FpElem>;

/* --- coefficient helpers ------------------------------------------------ */
inline bool coeff_zero(const Int& c) { return c == 0; }
inline bool coeff_zero(const Rat& c) { return c == 0; }
inline bool coeff_zero(const FpElem& c) { return c.is_zero(); }
inline Rat coeff_inverse(const Rat& c) { return 1 / c; }
inline FpElem coeff_inverse(const FpElem& c) { return inverse(c); }
/* a K with value n, carrying modulus from the sample where needed */
inline Int coeff_from_long(const Int&, long n) { return Int(n); }
inline Rat coeff_from_long(const Rat&, long n) { return Rat(n); }
inline FpElem coeff_from_long(const FpElem& s, long n) { return FpElem(n, s.p); }

/* --- arithmetic ---------------------------------------------------------- */
template <class K>
Poly<K> normalize(const Ring& r, std::vector<std::pair<Monomial, K>> terms);

template <class K>
Poly<K> poly_add(const Ring& r, const Poly<K>& f, const Poly<K>& g);
template <class K>
Poly<K> poly_sub(const Ring& r, const Poly<K>& f, const Poly<K>& g);
template <class K>
Poly<K> poly_neg(const Ring& r, const Poly<K>& f);
template <class K>
Poly<K> poly_mul(const Ring& r, const Poly<K>& f, const Poly<K>& g);
template <class K>
Poly<K> poly_mul_term(const Ring& r, const Poly<K>& f, const Monomial& m,
                      const K& c);
template <class K>
Poly<K> poly_pow(const Ring& r, const Poly<K>& f, unsigned n);

template <class K>
Poly<K> poly_const(const Ring& r, const K& c);
template <class K>
Poly<K> poly_sym(const Ring& r, std::size_t idx, const K& one);

IPoly ipoly_const(const Ring& r, const Int& c);
IPoly ipoly_sym(const Ring& r, std::size_t idx);

template <class K>
Poly<K> derivative(const Ring& r, const Poly<K>& f, std::size_t idx);

/* --- conversions ---------------------------------------------------------- */
QPoly to_rational(const Ring& r, const IPoly& f);
FPoly to_fp(const Ring& r, const IPoly& f, long p);
FPoly to_fp(const Ring& r, const QPoly& f, long p);  /* throws if p | denom */
/* primitive integer polynomial equal to f up to a positive rational factor */
IPoly clear_denominators(const Ring& r, const QPoly& f);
Int content(const IPoly& f);

/* --- evaluation / substitution ------------------------------------------- */
struct AugmentationPoint {
  std::map<std::string, Int> assign;  /* every symbol of the ring */
  DvrContext ctx;
};

Int evaluate(const Ring& r, const IPoly& f, const AugmentationPoint& pt);
IntMatrix evaluate(const Ring& r, const Mat<IPoly>& m, const AugmentationPoint& pt);

/* simultaneous substitution symbol index -> polynomial (identity if absent) */
IPoly substitute(const Ring& r, const IPoly& f,
                 const std::map<std::size_t, IPoly>& images);
QPoly substitute(const Ring& r, const QPoly& f,
                 const std::map<std::size_t, QPoly>& images);

/* map a polynomial into another ring, matching symbols by name; symbols the
 * polynomial does not use may be absent from the target */
IPoly transport(const Ring& from, const IPoly& f, const Ring& to);

/* substitute constants for the named symbols, then transport (used to pass
 * from the parametric ring to a specialized instance ring) */
IPoly specialize_params(const Ring& from, const IPoly& f,
                        const std::map<std::string, Int>& values,
                        const Ring& to);

Mat<IPoly> jacobian(const Ring& r, const std::vector<IPoly>& relations,
                    const std::vector<std::size_t>& var_idx);

/* --- text form ------------------------------------------------------------ */
struct ParseError : std::runtime_error {
  std::size_t pos;
  ParseError(const std::string& what, std::size_t at)
      : std::runtime_error(what), pos(at) {}
};

IPoly parse_poly(const Ring& r, const std::string& text);
std::string to_string(const Ring& r, const IPoly& f);
std::string to_string(const Ring& r, const QPoly& f);

/* ========================================================================= */
/* template implementations                                                   */
/* ========================================================================= */

template <class K>
Poly<K> normalize(const Ring& r, std::vector<std::pair<Monomial, K>> terms) {
  std::sort(terms.begin(), terms.end(),
            [&](const auto& x, const auto& y) {
              return mono_cmp(r.ord, x.first, y.first) > 0;
            });
  Poly<K> out;
  for (auto& tm : terms) {
    if (!out.t.empty() && out.t.back().first == tm.first) {
      out.t.back().second = out.t.back().second + tm.second;
      if (coeff_zero(out.t.back().second)) out.t.pop_back();
    } else if (!coeff_zero(tm.second)) {
      out.t.push_back(std::move(tm));
    }
  }
  return out;
}

template <class K>
Poly<K> poly_add(const Ring& r, const Poly<K>& f, const Poly<K>& g) {
  std::vector<std::pair<Monomial, K>> terms = f.t;
  terms.insert(terms.end(), g.t.begin(), g.t.end());
  return normalize(r, std::move(terms));
}

template <class K>
Poly<K> poly_neg(const Ring& r, const Poly<K>& f) {
  (void)r;
  Poly<K> out = f;
  for (auto& tm : out.t) tm.second = -tm.second;
  return out;
}

template <class K>
Poly<K> poly_sub(const Ring& r, const Poly<K>& f, const Poly<K>& g) {
  return poly_add(r, f, poly_neg(r, g));
}

template <class K>
Poly<K> poly_mul(const Ring& r, const Poly<K>& f, const Poly<K>& g) {
  std::vector<std::pair<Monomial, K>> terms;
  terms.reserve(f.t.size() * g.t.size());
  for (const auto& a : f.t)
    for (const auto& b : g.t)
      terms.emplace_back(mono_mul(a.first, b.first), a.second * b.second);
  return normalize(r, std::move(terms));
}

template <class K>
Poly<K> poly_mul_term(const Ring& r, const Poly<K>& f, const Monomial& m,
                      const K& c) {
  (void)r;
  Poly<K> out;
  if (coeff_zero(c)) return out;
  out.t.reserve(f.t.size());
  for (const auto& tm : f.t)
    out.t.emplace_back(mono_mul(tm.first, m), tm.second * c);
  return out;  /* multiplying by a term preserves the ordering */
}

template <class K>
Poly<K> poly_pow(const Ring& r, const Poly<K>& f, unsigned n) {
  if (n == 0) {
    if (f.is_zero()) throw std::invalid_argument("poly_pow: 0^0");
    return poly_const(r, coeff_from_long(f.t[0].second, 1));
  }
  Poly<K> acc = f;
  for (unsigned i = 1; i < n; ++i) acc = poly_mul(r, acc, f);
  return acc;
}

template <class K>
Poly<K> poly_const(const Ring& r, const K& c) {
  Poly<K> out;
  if (!coeff_zero(c)) out.t.emplace_back(Monomial(r.vt.nsym()), c);
  return out;
}

template <class K>
Poly<K> poly_sym(const Ring& r, std::size_t idx, const K& one) {
  Monomial m(r.vt.nsym());
  m.e[idx] = 1;
  Poly<K> out;
  out.t.emplace_back(std::move(m), one);
  return out;
}

template <class K>
Poly<K> derivative(const Ring& r, const Poly<K>& f, std::size_t idx) {
  std::vector<std::pair<Monomial, K>> terms;
  for (const auto& tm : f.t) {
    int ex = tm.first.e[idx];
    if (ex == 0) continue;
    Monomial m = tm.first;
    m.e[idx] -= 1;
    terms.emplace_back(std::move(m), tm.second * coeff_from_long(tm.second, ex));
  }
  return normalize(r, std::move(terms));
}

}  // namespace defect
