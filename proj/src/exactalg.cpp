#include "defect/exactalg.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <numeric>

namespace defect {

std::optional<long> valuation(const Int& x, const Int& p) {
  if (x == 0) return std::nullopt;
  Int y = abs(x);
  long v = 0;
  Int q, r;
  for (;;) {
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), y.get_mpz_t(), p.get_mpz_t());
    if (r != 0) return v;
    y = q;
    ++v;
  }
}

std::optional<long> valuation(const Rat& x, const Int& p) {
  if (x == 0) return std::nullopt;
  return *valuation(x.get_num(), p) - *valuation(x.get_den(), p);
}

OIdeal oideal_of(const Int& gen, const DvrContext& ctx) {
  return OIdeal{valuation(gen, ctx.p)};
}

OIdeal oideal_of(const std::vector<Int>& gens, const DvrContext& ctx) {
  OIdeal out;
  for (const Int& g : gens) {
    auto v = valuation(g, ctx.p);
    if (v && (!out.v || *v < *out.v)) out.v = v;
  }
  return out;
}

FpElem::FpElem(long value, long prime) : p(prime) {
  v = value % prime;
  if (v < 0) v += prime;
}

FpElem::FpElem(const Int& value, long prime) : p(prime) {
  Int r = value % prime;
  v = r.get_si();
  if (v < 0) v += prime;
}

static void check_same_p(const FpElem& a, const FpElem& b) {
  if (a.p != b.p) throw std::invalid_argument("FpElem modulus mismatch");
}

FpElem operator+(const FpElem& a, const FpElem& b) {
  check_same_p(a, b);
  return FpElem(a.v + b.v, a.p);
}

FpElem operator-(const FpElem& a, const FpElem& b) {
  check_same_p(a, b);
  return FpElem(a.v - b.v, a.p);
}

FpElem operator*(const FpElem& a, const FpElem& b) {
  check_same_p(a, b);
  return FpElem(static_cast<long>((static_cast<__int128>(a.v) * b.v) % a.p), a.p);
}

FpElem operator-(const FpElem& a) { return FpElem(-a.v, a.p); }

FpElem inverse(const FpElem& a) {
  if (a.v == 0) throw std::domain_error("FpElem: inverse of zero");
  /* extended Euclid */
  long r0 = a.p, r1 = a.v, s0 = 0, s1 = 1;
  while (r1 != 0) {
    long q = r0 / r1;
    long r2 = r0 - q * r1;
    long s2 = s0 - q * s1;
    r0 = r1; r1 = r2; s0 = s1; s1 = s2;
  }
  assert(r0 == 1);
  return FpElem(s0, a.p);
}

IntMatrix identity_matrix(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntMatrix mat_mul(const IntMatrix& x, const IntMatrix& y) {
  if (x.cols != y.rows) throw std::invalid_argument("mat_mul: shape mismatch");
  IntMatrix z(x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t k = 0; k < x.cols; ++k) {
      const Int& xv = x.at(i, k);
      if (xv == 0) continue;
      for (std::size_t j = 0; j < y.cols; ++j) z.at(i, j) += xv * y.at(k, j);
    }
  return z;
}

IntMatrix mat_transpose(const IntMatrix& m) {
  IntMatrix t(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) t.at(j, i) = m.at(i, j);
  return t;
}

IntMatrix unimodular_inverse(const IntMatrix& m) {
  if (m.rows != m.cols) throw std::invalid_argument("unimodular_inverse: not square");
  std::size_t n = m.rows;
  /* Gauss-Jordan over Q; entries of the inverse must come out integral */
  RatMatrix a(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a.at(i, j) = Rat(m.at(i, j));
    a.at(i, n + i) = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a.at(piv, c) == 0) ++piv;
    if (piv == n) throw std::invalid_argument("unimodular_inverse: singular");
    if (piv != c)
      for (std::size_t j = 0; j < 2 * n; ++j) std::swap(a.at(c, j), a.at(piv, j));
    Rat inv = 1 / a.at(c, c);
    for (std::size_t j = 0; j < 2 * n; ++j) a.at(c, j) *= inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a.at(i, c) == 0) continue;
      Rat f = a.at(i, c);
      for (std::size_t j = 0; j < 2 * n; ++j) a.at(i, j) -= f * a.at(c, j);
    }
  }
  IntMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Rat& v = a.at(i, n + j);
      if (v.get_den() != 1)
        throw std::invalid_argument("unimodular_inverse: determinant not a unit");
      out.at(i, j) = v.get_num();
    }
  return out;
}

Int det(IntMatrix m) {
  if (m.rows != m.cols) throw std::invalid_argument("det: not square");
  std::size_t n = m.rows;
  if (n == 0) return 1;
  Int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m.at(k, k) == 0) {
      std::size_t piv = k;
      while (piv < n && m.at(piv, k) == 0) ++piv;
      if (piv == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(piv, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Int t = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
        mpz_divexact(m.at(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      m.at(i, k) = 0;
    }
    prev = m.at(k, k);
  }
  return sign > 0 ? m.at(n - 1, n - 1) : Int(-m.at(n - 1, n - 1));
}

static void combinations(std::size_t n, std::size_t k,
                         const std::function<bool(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  if (k > n) return;
  for (;;) {
    if (f(idx)) return;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

Int gcd_of_minors(const IntMatrix& m, std::size_t i) {
  if (i < 1 || i > std::min(m.rows, m.cols))
    throw std::out_of_range("gcd_of_minors: size out of range");
  Int g = 0;
  combinations(m.rows, i, [&](const std::vector<std::size_t>& ri) {
    return combinations(m.cols, i, [&](const std::vector<std::size_t>& ci) {
      IntMatrix sub(i, i);
      for (std::size_t a = 0; a < i; ++a)
        for (std::size_t b = 0; b < i; ++b) sub.at(a, b) = m.at(ri[a], ci[b]);
      Int d = det(sub);
      g = gcd(g, d);
      return g == 1;  /* early exit: gcd can no longer change */
    }), g == 1;
  });
  return g;
}

namespace {

struct SnfWork {
  IntMatrix a, u, v;

  void row_swap(std::size_t i, std::size_t j) {
    for (std::size_t c = 0; c < a.cols; ++c) std::swap(a.at(i, c), a.at(j, c));
    for (std::size_t c = 0; c < u.cols; ++c) std::swap(u.at(i, c), u.at(j, c));
  }
  void col_swap(std::size_t i, std::size_t j) {
    for (std::size_t r = 0; r < a.rows; ++r) std::swap(a.at(r, i), a.at(r, j));
    for (std::size_t r = 0; r < v.rows; ++r) std::swap(v.at(r, i), v.at(r, j));
  }
  void row_add(std::size_t dst, std::size_t src, const Int& c) {
    for (std::size_t j = 0; j < a.cols; ++j) a.at(dst, j) += c * a.at(src, j);
    for (std::size_t j = 0; j < u.cols; ++j) u.at(dst, j) += c * u.at(src, j);
  }
  void col_add(std::size_t dst, std::size_t src, const Int& c) {
    for (std::size_t i = 0; i < a.rows; ++i) a.at(i, dst) += c * a.at(i, src);
    for (std::size_t i = 0; i < v.rows; ++i) v.at(i, dst) += c * v.at(i, src);
  }
  void row_negate(std::size_t i) {
    for (std::size_t j = 0; j < a.cols; ++j) a.at(i, j) = -a.at(i, j);
    for (std::size_t j = 0; j < u.cols; ++j) u.at(i, j) = -u.at(i, j);
  }
};

}  // namespace

SnfResult smith_normal_form(const IntMatrix& m) {
  SnfWork w{m, identity_matrix(m.rows), identity_matrix(m.cols)};
  std::size_t n = std::min(m.rows, m.cols);
  for (std::size_t t = 0; t < n; ++t) {
    for (;;) {
      /* smallest-absolute-value nonzero pivot in the trailing block */
      std::size_t pi = t, pj = t;
      bool found = false;
      for (std::size_t i = t; i < m.rows; ++i)
        for (std::size_t j = t; j < m.cols; ++j)
          if (w.a.at(i, j) != 0 &&
              (!found || cmp(abs(w.a.at(i, j)), abs(w.a.at(pi, pj))) < 0)) {
            pi = i; pj = j; found = true;
          }
      if (!found) goto done;
      if (pi != t) w.row_swap(t, pi);
      if (pj != t) w.col_swap(t, pj);
      bool clean = true;
      for (std::size_t i = t + 1; i < m.rows; ++i)
        if (w.a.at(i, t) != 0) {
          Int q;
          mpz_tdiv_q(q.get_mpz_t(), w.a.at(i, t).get_mpz_t(), w.a.at(t, t).get_mpz_t());
          w.row_add(i, t, -q);
          if (w.a.at(i, t) != 0) clean = false;
        }
      for (std::size_t j = t + 1; j < m.cols; ++j)
        if (w.a.at(t, j) != 0) {
          Int q;
          mpz_tdiv_q(q.get_mpz_t(), w.a.at(t, j).get_mpz_t(), w.a.at(t, t).get_mpz_t());
          w.col_add(j, t, -q);
          if (w.a.at(t, j) != 0) clean = false;
        }
      if (!clean) continue;
      /* pivot divides its row and column; enforce divisibility of the rest */
      bool divides_all = true;
      for (std::size_t i = t + 1; i < m.rows && divides_all; ++i)
        for (std::size_t j = t + 1; j < m.cols && divides_all; ++j)
          if (w.a.at(i, j) % w.a.at(t, t) != 0) {
            w.row_add(t, i, 1);
            divides_all = false;
          }
      if (divides_all) break;
    }
    if (w.a.at(t, t) < 0) w.row_negate(t);
  }
done:
  SnfResult out;
  out.diag.resize(n);
  for (std::size_t t = 0; t < n; ++t) out.diag[t] = w.a.at(t, t);
  out.u = std::move(w.u);
  out.v = std::move(w.v);
  /* verify the factorization and the divisibility chain */
  IntMatrix check = mat_mul(mat_mul(out.u, m), out.v);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) {
      Int expect = (i == j && i < n) ? out.diag[i] : Int(0);
      if (check.at(i, j) != expect) throw std::logic_error("SNF: U*M*V mismatch");
    }
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (out.diag[i] != 0 && out.diag[i + 1] % out.diag[i] != 0)
      throw std::logic_error("SNF: divisibility chain broken");
#ifndef NDEBUG
  if (abs(det(out.u)) != 1 || abs(det(out.v)) != 1)
    throw std::logic_error("SNF: transform not unimodular");
#endif
  return out;
}

IntMatrix row_basis(const IntMatrix& m) {
  IntMatrix a = m;
  std::size_t top = 0;
  for (std::size_t col = 0; col < a.cols && top < a.rows; ++col) {
    for (;;) {
      std::size_t piv = a.rows;
      for (std::size_t i = top; i < a.rows; ++i)
        if (a.at(i, col) != 0 &&
            (piv == a.rows || cmp(abs(a.at(i, col)), abs(a.at(piv, col))) < 0))
          piv = i;
      if (piv == a.rows) break;
      if (piv != top)
        for (std::size_t j = 0; j < a.cols; ++j) std::swap(a.at(top, j), a.at(piv, j));
      bool reduced = true;
      for (std::size_t i = top + 1; i < a.rows; ++i)
        if (a.at(i, col) != 0) {
          Int q;
          mpz_tdiv_q(q.get_mpz_t(), a.at(i, col).get_mpz_t(), a.at(top, col).get_mpz_t());
          for (std::size_t j = 0; j < a.cols; ++j) a.at(i, j) -= q * a.at(top, j);
          if (a.at(i, col) != 0) reduced = false;
        }
      if (reduced) break;
    }
    if (a.at(top, col) != 0) ++top;
  }
  IntMatrix out(top, a.cols);
  for (std::size_t i = 0; i < top; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) out.at(i, j) = a.at(i, j);
  return out;
}

std::size_t lattice_rank(const Lattice& l) { return row_basis(l.span).rows; }

std::optional<std::vector<Rat>> solve_left(const IntMatrix& m,
                                           const std::vector<Int>& rhs) {
  if (rhs.size() != m.cols) throw std::invalid_argument("solve_left: shape");
  /* unknowns x in Q^rows; equations indexed by columns of m */
  std::size_t neq = m.cols, nuk = m.rows;
  RatMatrix aug(neq, nuk + 1);
  for (std::size_t e = 0; e < neq; ++e) {
    for (std::size_t k = 0; k < nuk; ++k) aug.at(e, k) = Rat(m.at(k, e));
    aug.at(e, nuk) = Rat(rhs[e]);
  }
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < nuk && r < neq; ++c) {
    std::size_t piv = r;
    while (piv < neq && aug.at(piv, c) == 0) ++piv;
    if (piv == neq) continue;
    for (std::size_t j = 0; j <= nuk; ++j) std::swap(aug.at(r, j), aug.at(piv, j));
    Rat inv = 1 / aug.at(r, c);
    for (std::size_t j = c; j <= nuk; ++j) aug.at(r, j) *= inv;
    for (std::size_t i = 0; i < neq; ++i)
      if (i != r && aug.at(i, c) != 0) {
        Rat f = aug.at(i, c);
        for (std::size_t j = c; j <= nuk; ++j) aug.at(i, j) -= f * aug.at(r, j);
      }
    pivot_col.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < neq; ++i)
    if (aug.at(i, nuk) != 0) return std::nullopt;
  std::vector<Rat> x(nuk, Rat(0));
  for (std::size_t i = 0; i < r; ++i) x[pivot_col[i]] = aug.at(i, nuk);
  return x;
}

IntMatrix left_kernel(const IntMatrix& m) {
  SnfResult s = smith_normal_form(m);
  std::vector<std::size_t> zero_rows;
  for (std::size_t i = 0; i < m.rows; ++i)
    if (i >= s.diag.size() || s.diag[i] == 0) zero_rows.push_back(i);
  IntMatrix out(zero_rows.size(), m.rows);
  for (std::size_t k = 0; k < zero_rows.size(); ++k)
    for (std::size_t j = 0; j < m.rows; ++j) out.at(k, j) = s.u.at(zero_rows[k], j);
  return out;
}

long lattice_quotient_length(const Lattice& big, const Lattice& small,
                             const DvrContext& ctx) {
  IntMatrix bb = row_basis(big.span);
  IntMatrix bs = row_basis(small.span);
  if (bb.cols != bs.cols) throw LatticeError("ambient dimension mismatch");
  if (bb.rows != bs.rows) throw LatticeError("rank mismatch");
  std::size_t r = bs.rows;
  RatMatrix trans(r, r);
  Int den = 1;
  for (std::size_t i = 0; i < r; ++i) {
    std::vector<Int> v(bs.cols);
    for (std::size_t j = 0; j < bs.cols; ++j) v[j] = bs.at(i, j);
    auto x = solve_left(bb, v);
    if (!x) throw LatticeError("containment failure", v);
    for (std::size_t k = 0; k < r; ++k) {
      if ((*x)[k].get_den() % ctx.p == 0)
        throw LatticeError("containment failure at p", v);
      trans.at(i, k) = (*x)[k];
      den = lcm(den, (*x)[k].get_den());
    }
  }
  IntMatrix ti(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      Rat scaled = trans.at(i, j) * Rat(den);
      ti.at(i, j) = scaled.get_num();
    }
  SnfResult s = smith_normal_form(ti);
  long total = 0;
  for (const Int& d : s.diag) {
    auto v = valuation(d, ctx.p);
    if (!v) throw LatticeError("degenerate transition matrix");
    total += *v;
  }
  /* den is prime to p, so scaling contributes nothing p-adically */
  return total;
}

}  // namespace defect
