#include "defect/polyring.hpp"

#include <cctype>
#include <numeric>
#include <sstream>

namespace defect {

std::optional<std::size_t> VarTable::index(const std::string& n) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == n) return i;
  for (std::size_t i = 0; i < params.size(); ++i)
    if (params[i] == n) return vars.size() + i;
  return std::nullopt;
}

namespace {

bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

}  // namespace

VarTable make_var_table(std::vector<std::string> vars,
                        std::vector<std::string> params) {
  VarTable vt{std::move(vars), std::move(params)};
  for (std::size_t i = 0; i < vt.nsym(); ++i) {
    if (!valid_identifier(vt.name(i)))
      throw std::invalid_argument("invalid symbol name: " + vt.name(i));
    for (std::size_t j = i + 1; j < vt.nsym(); ++j)
      if (vt.name(i) == vt.name(j))
        throw std::invalid_argument("duplicate symbol name: " + vt.name(i));
  }
  return vt;
}

int Monomial::degree() const {
  int d = 0;
  for (int x : e) d += x;
  return d;
}

bool Monomial::is_one() const {
  for (int x : e)
    if (x != 0) return false;
  return true;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial m = a;
  for (std::size_t i = 0; i < m.e.size(); ++i) m.e[i] += b.e[i];
  return m;
}

bool mono_divides(const Monomial& a, const Monomial& b) {
  for (std::size_t i = 0; i < a.e.size(); ++i)
    if (a.e[i] > b.e[i]) return false;
  return true;
}

Monomial mono_div(const Monomial& b, const Monomial& a) {
  Monomial m = b;
  for (std::size_t i = 0; i < m.e.size(); ++i) {
    m.e[i] -= a.e[i];
    if (m.e[i] < 0) throw std::invalid_argument("mono_div: not divisible");
  }
  return m;
}

Monomial mono_lcm(const Monomial& a, const Monomial& b) {
  Monomial m = a;
  for (std::size_t i = 0; i < m.e.size(); ++i) m.e[i] = std::max(m.e[i], b.e[i]);
  return m;
}

bool mono_coprime(const Monomial& a, const Monomial& b) {
  for (std::size_t i = 0; i < a.e.size(); ++i)
    if (a.e[i] > 0 && b.e[i] > 0) return false;
  return true;
}

namespace {

int cmp_range(OrderKind kind, const Monomial& a, const Monomial& b,
              std::size_t lo, std::size_t hi) {
  if (kind == OrderKind::lex) {
    for (std::size_t j = lo; j < hi; ++j)
      if (a.e[j] != b.e[j]) return a.e[j] > b.e[j] ? 1 : -1;
    return 0;
  }
  int da = 0, db = 0;
  for (std::size_t j = lo; j < hi; ++j) {
    da += a.e[j];
    db += b.e[j];
  }
  if (da != db) return da > db ? 1 : -1;
  for (std::size_t j = hi; j-- > lo;)
    if (a.e[j] != b.e[j]) return a.e[j] < b.e[j] ? 1 : -1;
  return 0;
}

}  // namespace

int mono_cmp(const MonomialOrder& ord, const Monomial& a, const Monomial& b) {
  std::size_t n = a.e.size();
  if (b.e.size() != n) throw std::invalid_argument("mono_cmp: size mismatch");
  std::size_t split = std::min(ord.block_split, n);
  if (int c = cmp_range(ord.kind, a, b, 0, split)) return c;
  return cmp_range(ord.kind, a, b, split, n);
}

Ring make_ring(std::vector<std::string> vars, std::vector<std::string> params,
               OrderKind kind) {
  VarTable vt = make_var_table(std::move(vars), std::move(params));
  std::size_t split = vt.params.empty() ? static_cast<std::size_t>(-1) : vt.nvars();
  return Ring{std::move(vt), MonomialOrder{kind, split}};
}

IPoly ipoly_const(const Ring& r, const Int& c) { return poly_const(r, c); }
IPoly ipoly_sym(const Ring& r, std::size_t idx) {
  return poly_sym(r, idx, Int(1));
}

QPoly to_rational(const Ring& r, const IPoly& f) {
  (void)r;
  QPoly out;
  out.t.reserve(f.t.size());
  for (const auto& tm : f.t) out.t.emplace_back(tm.first, Rat(tm.second));
  return out;
}

FPoly to_fp(const Ring& r, const IPoly& f, long p) {
  (void)r;
  FPoly out;
  for (const auto& tm : f.t) {
    FpElem c(tm.second, p);
    if (!c.is_zero()) out.t.emplace_back(tm.first, c);
  }
  return out;
}

FPoly to_fp(const Ring& r, const QPoly& f, long p) {
  (void)r;
  FPoly out;
  for (const auto& tm : f.t) {
    FpElem den(Int(tm.second.get_den()), p);
    if (den.is_zero())
      throw std::domain_error("to_fp: denominator divisible by p");
    FpElem c = FpElem(Int(tm.second.get_num()), p) * inverse(den);
    if (!c.is_zero()) out.t.emplace_back(tm.first, c);
  }
  return out;
}

Int content(const IPoly& f) {
  Int g = 0;
  for (const auto& tm : f.t) g = gcd(g, tm.second);
  return abs(g);
}

IPoly clear_denominators(const Ring& r, const QPoly& f) {
  (void)r;
  Int l = 1;
  for (const auto& tm : f.t) l = lcm(l, Int(tm.second.get_den()));
  IPoly out;
  out.t.reserve(f.t.size());
  for (const auto& tm : f.t) {
    Rat c = tm.second * l;
    out.t.emplace_back(tm.first, Int(c.get_num()));
  }
  Int g = content(out);
  if (g > 1)
    for (auto& tm : out.t) tm.second /= g;
  if (!out.t.empty() && out.t[0].second < 0)
    for (auto& tm : out.t) tm.second = -tm.second;
  return out;
}

Int evaluate(const Ring& r, const IPoly& f, const AugmentationPoint& pt) {
  std::vector<Int> vals(r.vt.nsym());
  for (std::size_t i = 0; i < r.vt.nsym(); ++i) {
    auto it = pt.assign.find(r.vt.name(i));
    if (it == pt.assign.end())
      throw std::invalid_argument("evaluate: no value for symbol " + r.vt.name(i));
    vals[i] = it->second;
  }
  Int total = 0;
  for (const auto& tm : f.t) {
    Int prod = tm.second;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (tm.first.e[i] == 0) continue;
      Int pw;
      mpz_pow_ui(pw.get_mpz_t(), vals[i].get_mpz_t(),
                 static_cast<unsigned long>(tm.first.e[i]));
      prod *= pw;
    }
    total += prod;
  }
  return total;
}

IntMatrix evaluate(const Ring& r, const Mat<IPoly>& m,
                   const AugmentationPoint& pt) {
  IntMatrix out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j)
      out.at(i, j) = evaluate(r, m.at(i, j), pt);
  return out;
}

namespace {

template <class K>
Poly<K> substitute_impl(const Ring& r, const Poly<K>& f,
                        const std::map<std::size_t, Poly<K>>& images) {
  Poly<K> total;
  for (const auto& tm : f.t) {
    Poly<K> prod = poly_const(r, tm.second);
    for (std::size_t i = 0; i < tm.first.e.size(); ++i) {
      int ex = tm.first.e[i];
      if (ex == 0) continue;
      auto it = images.find(i);
      if (it == images.end()) {
        Monomial m(r.vt.nsym());
        m.e[i] = ex;
        prod = poly_mul_term(r, prod, m, coeff_from_long(tm.second, 1));
      } else {
        prod = poly_mul(r, prod, poly_pow(r, it->second, ex));
      }
    }
    total = poly_add(r, total, prod);
  }
  return total;
}

}  // namespace

IPoly substitute(const Ring& r, const IPoly& f,
                 const std::map<std::size_t, IPoly>& images) {
  return substitute_impl(r, f, images);
}

QPoly substitute(const Ring& r, const QPoly& f,
                 const std::map<std::size_t, QPoly>& images) {
  return substitute_impl(r, f, images);
}

IPoly transport(const Ring& from, const IPoly& f, const Ring& to) {
  std::vector<std::optional<std::size_t>> dest(from.vt.nsym());
  for (std::size_t i = 0; i < from.vt.nsym(); ++i)
    dest[i] = to.vt.index(from.vt.name(i));
  std::vector<std::pair<Monomial, Int>> terms;
  terms.reserve(f.t.size());
  for (const auto& tm : f.t) {
    Monomial m(to.vt.nsym());
    for (std::size_t i = 0; i < dest.size(); ++i) {
      if (tm.first.e[i] == 0) continue;
      if (!dest[i])
        throw std::invalid_argument("transport: target ring lacks symbol " +
                                    from.vt.name(i));
      m.e[*dest[i]] = tm.first.e[i];
    }
    terms.emplace_back(std::move(m), tm.second);
  }
  return normalize(to, std::move(terms));
}

IPoly specialize_params(const Ring& from, const IPoly& f,
                        const std::map<std::string, Int>& values,
                        const Ring& to) {
  std::map<std::size_t, IPoly> images;
  for (const auto& [name, val] : values) {
    auto idx = from.vt.index(name);
    if (!idx)
      throw std::invalid_argument("specialize_params: unknown symbol " + name);
    images[*idx] = ipoly_const(from, val);
  }
  return transport(from, substitute(from, f, images), to);
}

Mat<IPoly> jacobian(const Ring& r, const std::vector<IPoly>& relations,
                    const std::vector<std::size_t>& var_idx) {
  Mat<IPoly> out(relations.size(), var_idx.size());
  for (std::size_t i = 0; i < relations.size(); ++i)
    for (std::size_t j = 0; j < var_idx.size(); ++j)
      out.at(i, j) = derivative(r, relations[i], var_idx[j]);
  return out;
}

/* --- parser ---------------------------------------------------------------- */

namespace {

struct Parser {
  const Ring& r;
  const std::string& s;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }

  IPoly parse_expr() {
    IPoly acc = eat('-') ? poly_neg(r, parse_term()) : parse_term();
    for (;;) {
      if (eat('+'))
        acc = poly_add(r, acc, parse_term());
      else if (eat('-'))
        acc = poly_sub(r, acc, parse_term());
      else
        break;
    }
    return acc;
  }

  IPoly parse_term() {
    IPoly acc = parse_factor();
    while (eat('*')) acc = poly_mul(r, acc, parse_factor());
    return acc;
  }

  IPoly parse_factor() {
    IPoly base = parse_base();
    if (eat('^')) {
      skip_ws();
      std::size_t start = pos;
      unsigned long n = 0;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        n = n * 10 + static_cast<unsigned long>(s[pos] - '0');
        if (n > 1000) throw ParseError("exponent too large", start);
        ++pos;
      }
      if (pos == start) throw ParseError("expected exponent", pos);
      return poly_pow(r, base, static_cast<unsigned>(n));
    }
    return base;
  }

  IPoly parse_base() {
    skip_ws();
    if (pos >= s.size()) throw ParseError("unexpected end of input", pos);
    char c = s[pos];
    if (c == '(') {
      ++pos;
      IPoly inner = parse_expr();
      if (!eat(')')) throw ParseError("expected ')'", pos);
      return inner;
    }
    if (c == '-') {
      ++pos;
      return poly_neg(r, parse_factor());
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
        ++pos;
      return ipoly_const(r, Int(s.substr(start, pos - start)));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
      std::string name = s.substr(start, pos - start);
      auto idx = r.vt.index(name);
      if (!idx) throw ParseError("unknown symbol: " + name, start);
      return ipoly_sym(r, *idx);
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos);
  }
};

std::string mono_string(const Ring& r, const Monomial& m) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < m.e.size(); ++i) {
    if (m.e[i] == 0) continue;
    if (!first) os << '*';
    first = false;
    os << r.vt.name(i);
    if (m.e[i] != 1) os << '^' << m.e[i];
  }
  return os.str();
}

template <class K>
std::string poly_string(const Ring& r, const Poly<K>& f) {
  if (f.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& tm : f.t) {
    K c = tm.second;
    if (!first) {
      if (c < 0) {
        os << " - ";
        c = -c;
      } else {
        os << " + ";
      }
    } else if (c < 0) {
      os << '-';
      c = -c;
    }
    first = false;
    std::string ms = mono_string(r, tm.first);
    if (ms.empty())
      os << c;
    else if (c == 1)
      os << ms;
    else
      os << c << '*' << ms;
  }
  return os.str();
}

}  // namespace

IPoly parse_poly(const Ring& r, const std::string& text) {
  Parser p{r, text};
  IPoly out = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) throw ParseError("trailing input", p.pos);
  return out;
}

std::string to_string(const Ring& r, const IPoly& f) { return poly_string(r, f); }
std::string to_string(const Ring& r, const QPoly& f) { return poly_string(r, f); }

}  // namespace defect
