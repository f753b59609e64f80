#include "defect/oalgebra.hpp"

namespace defect {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("FiniteOAlgebra: " + what);
}

bool p_integral(const Rat& x, const Int& p) {
  return Int(x.get_den()) % p != 0;
}

/* is v in the p-local row span of t? (v integer-cleared internally) */
bool in_torsion(const std::vector<Rat>& v,
                const std::optional<IntMatrix>& torsion, const Int& p) {
  bool zero = true;
  for (const auto& x : v)
    if (x != 0) zero = false;
  if (zero) return true;
  if (!torsion) return false;
  std::vector<Int> w = clear_prime_to_p(v, p);
  auto sol = solve_left(*torsion, w);
  if (!sol) return false;
  for (const auto& c : *sol)
    if (Int(c.get_den()) % p == 0) return false;
  return true;
}

std::vector<Rat> col_of(const RatMatrix& m, std::size_t j) {
  std::vector<Rat> v(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) v[i] = m.at(i, j);
  return v;
}

std::vector<Rat> basis_vec(std::size_t n, std::size_t i) {
  std::vector<Rat> v(n, Rat(0));
  v[i] = 1;
  return v;
}

std::vector<Rat> vec_sub(const std::vector<Rat>& a, const std::vector<Rat>& b) {
  std::vector<Rat> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

std::vector<Rat> to_rat_vec(const std::vector<Int>& v) {
  std::vector<Rat> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = Rat(v[i]);
  return out;
}

/* saturated integer solutions x of M x = 0 for a rational matrix M (rows are
 * unit-rescaled, which leaves the kernel unchanged) */
IntMatrix saturated_right_kernel(const RatMatrix& m, const Int& p) {
  IntMatrix cleared(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i) {
    std::vector<Rat> row(m.cols);
    for (std::size_t j = 0; j < m.cols; ++j) row[j] = m.at(i, j);
    std::vector<Int> w = clear_prime_to_p(row, p);
    for (std::size_t j = 0; j < m.cols; ++j) cleared.at(i, j) = w[j];
  }
  return left_kernel(mat_transpose(cleared));
}

}  // namespace

std::vector<Int> clear_prime_to_p(const std::vector<Rat>& v, const Int& p) {
  Int l = 1;
  for (const auto& x : v) l = lcm(l, Int(x.get_den()));
  if (l % p == 0)
    throw std::invalid_argument("clear_prime_to_p: denominator divisible by p");
  std::vector<Int> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    Rat y = v[i] * l;
    out[i] = Int(y.get_num());
  }
  return out;
}

RatMatrix op_matrix(const FiniteOAlgebra& b, const std::vector<Rat>& u) {
  RatMatrix m(b.n, b.n);
  for (std::size_t i = 0; i < b.n; ++i) {
    if (u[i] == 0) continue;
    for (std::size_t k = 0; k < b.n; ++k)
      for (std::size_t j = 0; j < b.n; ++j)
        m.at(k, j) += u[i] * b.mult[i].at(k, j);
  }
  return m;
}

std::vector<Rat> alg_mul(const FiniteOAlgebra& b, const std::vector<Rat>& u,
                         const std::vector<Rat>& v) {
  std::vector<Rat> out(b.n, Rat(0));
  for (std::size_t i = 0; i < b.n; ++i) {
    if (u[i] == 0) continue;
    for (std::size_t j = 0; j < b.n; ++j) {
      if (v[j] == 0) continue;
      Rat c = u[i] * v[j];
      for (std::size_t k = 0; k < b.n; ++k) out[k] += c * b.mult[i].at(k, j);
    }
  }
  return out;
}

Rat alg_lambda(const FiniteOAlgebra& b, const std::vector<Rat>& u) {
  Rat acc(0);
  for (std::size_t i = 0; i < b.n; ++i) acc += u[i] * b.lambda[i];
  return acc;
}

void validate(const FiniteOAlgebra& b) {
  const Int& p = b.ctx.p;
  require(b.mult.size() == b.n && b.lambda.size() == b.n && b.unit.size() == b.n,
          "size mismatch");
  for (const auto& m : b.mult) {
    require(m.rows == b.n && m.cols == b.n, "structure matrix shape");
    for (const auto& x : m.a) require(p_integral(x, p), "entry not p-integral");
  }
  for (const auto& x : b.lambda) require(p_integral(x, p), "lambda not p-integral");
  for (const auto& x : b.unit) require(p_integral(x, p), "unit not p-integral");
  if (b.torsion) {
    require(b.torsion->cols == b.n, "torsion shape");
    for (std::size_t i = 0; i < b.torsion->rows; ++i) {
      Rat acc(0);
      for (std::size_t j = 0; j < b.n; ++j)
        acc += Rat(b.torsion->at(i, j)) * b.lambda[j];
      require(acc == 0, "lambda does not kill torsion");
    }
  }

  /* unit law */
  RatMatrix u = op_matrix(b, b.unit);
  for (std::size_t j = 0; j < b.n; ++j) {
    std::vector<Rat> diff = col_of(u, j);
    diff[j] -= 1;
    require(in_torsion(diff, b.torsion, p), "unit law fails");
  }
  /* commutativity, associativity, lambda multiplicativity */
  for (std::size_t i = 0; i < b.n; ++i)
    for (std::size_t j = 0; j < b.n; ++j) {
      std::vector<Rat> ij = col_of(b.mult[i], j);
      require(in_torsion(vec_sub(ij, col_of(b.mult[j], i)), b.torsion, p),
              "not commutative");
      require(alg_lambda(b, ij) == b.lambda[i] * b.lambda[j],
              "lambda not multiplicative");
      for (std::size_t k = 0; k < b.n; ++k) {
        std::vector<Rat> lhs = alg_mul(b, ij, basis_vec(b.n, k));
        std::vector<Rat> rhs = alg_mul(b, basis_vec(b.n, i), col_of(b.mult[j], k));
        require(in_torsion(vec_sub(lhs, rhs), b.torsion, p), "not associative");
      }
    }
  require(alg_lambda(b, b.unit) == 1, "lambda(1) != 1");
}

IntMatrix kernel_lattice(const FiniteOAlgebra& b) {
  std::vector<Int> l = clear_prime_to_p(b.lambda, b.ctx.p);
  IntMatrix col(b.n, 1);
  for (std::size_t i = 0; i < b.n; ++i) col.at(i, 0) = l[i];
  return left_kernel(col);
}

std::optional<long> phi_length(const FiniteOAlgebra& b) {
  IntMatrix k = kernel_lattice(b);
  if (k.rows == 0) return 0;
  std::vector<std::vector<Int>> rows;
  for (std::size_t a = 0; a < k.rows; ++a)
    for (std::size_t c = a; c < k.rows; ++c) {
      std::vector<Rat> ka(b.n), kc(b.n);
      for (std::size_t j = 0; j < b.n; ++j) {
        ka[j] = Rat(k.at(a, j));
        kc[j] = Rat(k.at(c, j));
      }
      rows.push_back(clear_prime_to_p(alg_mul(b, ka, kc), b.ctx.p));
    }
  if (b.torsion)
    for (std::size_t i = 0; i < b.torsion->rows; ++i) {
      std::vector<Int> t(b.n);
      for (std::size_t j = 0; j < b.n; ++j) t[j] = b.torsion->at(i, j);
      rows.push_back(std::move(t));
    }
  IntMatrix l(rows.size(), b.n);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < b.n; ++j) l.at(i, j) = rows[i][j];
  try {
    return lattice_quotient_length(Lattice{k}, Lattice{l}, b.ctx);
  } catch (const LatticeError&) {
    return std::nullopt;  /* rank drop: Phi is infinite */
  }
}

FiniteOAlgebra torsion_free_quotient(const FiniteOAlgebra& b) {
  if (!b.torsion || b.torsion->rows == 0) {
    FiniteOAlgebra c = b;
    c.torsion.reset();
    return c;
  }
  const Int& p = b.ctx.p;
  SnfResult s = smith_normal_form(*b.torsion);
  IntMatrix w = unimodular_inverse(s.v);  /* rows w_i: torsion = span{d_i w_i} */
  std::vector<std::size_t> free_idx;
  for (std::size_t i = 0; i < b.n; ++i) {
    Int d = i < s.diag.size() ? s.diag[i] : Int(0);
    if (d == 0) {
      free_idx.push_back(i);
    } else {
      Int q = abs(d);
      while (q % p == 0) q /= p;
      if (q != 1)
        throw std::invalid_argument(
            "torsion_free_quotient: prime-to-p torsion rejected");
    }
  }
  std::size_t m = free_idx.size();
  auto new_coords = [&](const std::vector<Rat>& x) {
    /* coordinates in the w-basis: xi = x * v */
    std::vector<Rat> xi(b.n, Rat(0));
    for (std::size_t j = 0; j < b.n; ++j)
      for (std::size_t i = 0; i < b.n; ++i) xi[j] += x[i] * Rat(s.v.at(i, j));
    std::vector<Rat> out(m);
    for (std::size_t a = 0; a < m; ++a) out[a] = xi[free_idx[a]];
    return out;
  };
  auto w_row = [&](std::size_t a) {
    std::vector<Rat> out(b.n);
    for (std::size_t j = 0; j < b.n; ++j) out[j] = Rat(w.at(free_idx[a], j));
    return out;
  };

  FiniteOAlgebra c;
  c.n = m;
  c.ctx = b.ctx;
  c.mult.assign(m, RatMatrix(m, m));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t d = 0; d < m; ++d) {
      std::vector<Rat> prod = new_coords(alg_mul(b, w_row(a), w_row(d)));
      for (std::size_t k = 0; k < m; ++k) c.mult[a].at(k, d) = prod[k];
    }
  c.lambda.resize(m);
  for (std::size_t a = 0; a < m; ++a) c.lambda[a] = alg_lambda(b, w_row(a));
  c.unit = new_coords(b.unit);
  validate(c);
  return c;
}

std::optional<long> psi_length(const FiniteOAlgebra& b) {
  FiniteOAlgebra c = torsion_free_quotient(b);
  IntMatrix k = kernel_lattice(c);
  if (k.rows == 0) return 0;
  RatMatrix stacked(k.rows * c.n, c.n);
  for (std::size_t a = 0; a < k.rows; ++a) {
    std::vector<Rat> ka(c.n);
    for (std::size_t j = 0; j < c.n; ++j) ka[j] = Rat(k.at(a, j));
    RatMatrix op = op_matrix(c, ka);
    for (std::size_t i = 0; i < c.n; ++i)
      for (std::size_t j = 0; j < c.n; ++j)
        stacked.at(a * c.n + i, j) = op.at(i, j);
  }
  IntMatrix ann = saturated_right_kernel(stacked, c.ctx.p);
  std::optional<long> best;
  for (std::size_t i = 0; i < ann.rows; ++i) {
    Rat v(0);
    for (std::size_t j = 0; j < c.n; ++j) v += Rat(ann.at(i, j)) * c.lambda[j];
    auto val = valuation(v, c.ctx.p);
    if (val && (!best || *val < *best)) best = val;
  }
  return best;
}

std::optional<long> c0(const FiniteOAlgebra& b) {
  return psi_length(torsion_free_quotient(b));
}

FiniteOAlgebra tensor_product(const FiniteOAlgebra& a, const FiniteOAlgebra& b) {
  if (a.torsion || b.torsion)
    throw std::invalid_argument("tensor_product: torsion-free inputs required");
  if (a.ctx.p != b.ctx.p)
    throw std::invalid_argument("tensor_product: mismatched primes");
  FiniteOAlgebra t;
  t.n = a.n * b.n;
  t.ctx = a.ctx;
  auto idx = [&](std::size_t i, std::size_t j) { return i * b.n + j; };
  t.mult.assign(t.n, RatMatrix(t.n, t.n));
  for (std::size_t i = 0; i < a.n; ++i)
    for (std::size_t j = 0; j < b.n; ++j)
      for (std::size_t k = 0; k < a.n; ++k)
        for (std::size_t l = 0; l < b.n; ++l)
          for (std::size_t x = 0; x < a.n; ++x)
            for (std::size_t y = 0; y < b.n; ++y)
              t.mult[idx(i, j)].at(idx(x, y), idx(k, l)) =
                  a.mult[i].at(x, k) * b.mult[j].at(y, l);
  t.lambda.resize(t.n);
  t.unit.resize(t.n);
  for (std::size_t i = 0; i < a.n; ++i)
    for (std::size_t j = 0; j < b.n; ++j) {
      t.lambda[idx(i, j)] = a.lambda[i] * b.lambda[j];
      t.unit[idx(i, j)] = a.unit[i] * b.unit[j];
    }
  return t;
}

std::optional<long> koszul_c1_oracle(const FiniteOAlgebra& a,
                                     const std::vector<std::vector<Rat>>& xs) {
  std::size_t r = xs.size();
  if (r > 3) throw std::invalid_argument("koszul_c1_oracle: more than 3 generators");
  if (r == 0) return 0;
  const Int& p = a.ctx.p;

  /* Ann(x) = simultaneous kernel of multiplication by the x_i */
  RatMatrix stacked(r * a.n, a.n);
  for (std::size_t i = 0; i < r; ++i) {
    RatMatrix op = op_matrix(a, xs[i]);
    for (std::size_t u = 0; u < a.n; ++u)
      for (std::size_t v = 0; v < a.n; ++v)
        stacked.at(i * a.n + u, v) = op.at(u, v);
  }
  IntMatrix ann = saturated_right_kernel(stacked, p);
  std::optional<long> v_ann;
  for (std::size_t i = 0; i < ann.rows; ++i) {
    Rat v(0);
    for (std::size_t j = 0; j < a.n; ++j) v += Rat(ann.at(i, j)) * a.lambda[j];
    auto val = valuation(v, p);
    if (val && (!v_ann || *val < *v_ann)) v_ann = val;
  }
  if (!v_ann) return std::nullopt;

  /* Z_1 = kernel of d_1 : A^r -> A */
  RatMatrix d1(a.n, r * a.n);
  for (std::size_t i = 0; i < r; ++i) {
    RatMatrix op = op_matrix(a, xs[i]);
    for (std::size_t u = 0; u < a.n; ++u)
      for (std::size_t v = 0; v < a.n; ++v) d1.at(u, i * a.n + v) = op.at(u, v);
  }
  IntMatrix z1 = saturated_right_kernel(d1, p);

  /* Fitt classes: determinants over A of r cycles (wedge into the top degree) */
  std::optional<long> v_fitt;
  std::vector<std::size_t> tuple(r);
  for (std::size_t i = 0; i < r; ++i) tuple[i] = i;
  if (z1.rows < r) return std::nullopt;
  auto block = [&](std::size_t row, std::size_t blk) {
    std::vector<Rat> out(a.n);
    for (std::size_t j = 0; j < a.n; ++j) out[j] = Rat(z1.at(row, blk * a.n + j));
    return out;
  };
  for (;;) {
    /* det of the r x r matrix M[i][j] = block i of cycle tuple[j] */
    std::vector<std::size_t> perm(r);
    for (std::size_t i = 0; i < r; ++i) perm[i] = i;
    std::vector<Rat> acc(a.n, Rat(0));
    do {
      int sign = 1;
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j)
          if (perm[i] > perm[j]) sign = -sign;
      std::vector<Rat> prod = block(tuple[0], perm[0]);
      for (std::size_t i = 1; i < r; ++i)
        prod = alg_mul(a, prod, block(tuple[i], perm[i]));
      for (std::size_t j = 0; j < a.n; ++j)
        acc[j] += sign > 0 ? prod[j] : -prod[j];
    } while (std::next_permutation(perm.begin(), perm.end()));
    auto val = valuation(alg_lambda(a, acc), p);
    if (val && (!v_fitt || *val < *v_fitt)) v_fitt = val;

    std::size_t k = r;
    while (k > 0 && tuple[k - 1] == z1.rows - r + (k - 1)) --k;
    if (k == 0) break;
    ++tuple[k - 1];
    for (std::size_t j = k; j < r; ++j) tuple[j] = tuple[j - 1] + 1;
  }
  if (!v_fitt) return std::nullopt;
  return *v_fitt - *v_ann;
}

DualityResult duality_ann_oracle(const FiniteOAlgebra& b, std::size_t socle_idx,
                                 std::size_t target_idx) {
  std::size_t n = b.n;
  std::vector<Rat> centries(n * n);
  Int d = 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      centries[i * n + j] = b.mult[i].at(socle_idx, j);
      d = lcm(d, Int(centries[i * n + j].get_den()));
    }
  IntMatrix dc(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Rat y = centries[i * n + j] * d;
      dc.at(i, j) = Int(y.get_num());
    }
  DualityResult out;
  Int detdc = det(dc);
  Rat dpow(1);
  for (std::size_t i = 0; i < n; ++i) dpow *= d;
  out.det_c = Rat(detdc) / dpow;
  auto v = valuation(out.det_c, b.ctx.p);
  out.det_is_unit = v.has_value() && *v == 0;

  std::vector<Int> e(n, 0);
  e[target_idx] = 1;
  auto mu = solve_left(dc, e);
  if (!mu) throw std::invalid_argument("duality_ann_oracle: C is singular");
  Rat value(0);
  for (std::size_t i = 0; i < n; ++i) value += (*mu)[i] * d * b.lambda[i];
  out.value = value;
  out.valuation = valuation(value, b.ctx.p);
  return out;
}

namespace {

/* Gauss-Jordan inverse over Q; empty matrix on singular input */
RatMatrix rat_inverse(const RatMatrix& a) {
  std::size_t n = a.rows;
  RatMatrix e = a;
  RatMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i) inv.at(i, i) = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && e.at(piv, col) == 0) ++piv;
    if (piv == n) return RatMatrix(0, 0);
    if (piv != col)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(e.at(piv, j), e.at(col, j));
        std::swap(inv.at(piv, j), inv.at(col, j));
      }
    Rat d = e.at(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      e.at(col, j) /= d;
      inv.at(col, j) /= d;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || e.at(i, col) == 0) continue;
      Rat f = e.at(i, col);
      for (std::size_t j = 0; j < n; ++j) {
        e.at(i, j) -= f * e.at(col, j);
        inv.at(i, j) -= f * inv.at(col, j);
      }
    }
  }
  return inv;
}

}  // namespace

ArtinianModel artinian_model(const Ring& r, const std::vector<IPoly>& relations,
                             const AugmentationPoint& pt) {
  long p = static_cast<long>(pt.ctx.p.get_si());
  ArtinianModel m;
  m.ring = r;
  m.gb = buchberger(r, to_rational(r, relations));
  StaircaseResult sq = staircase(r, m.gb);
  if (!sq.finite)
    throw std::invalid_argument("artinian_model: quotient not Artinian over Q");
  auto gbf = buchberger(r, to_fp(r, relations, p));
  StaircaseResult sf = staircase(r, gbf);
  if (!sf.finite || sf.basis.size() != sq.basis.size())
    throw std::invalid_argument(
        "artinian_model: Q and F_p fiber dimensions differ (integrality "
        "certificate fails)");

  /* Model basis: the F_p staircase monomials. Their images in the Q-quotient
   * must stay a basis; the change of basis C (rows = Q normal-form coordinates
   * in the Q-staircase) then transports every coordinate computation. */
  m.basis = sf.basis;
  m.qbasis = sq.basis;

  FiniteOAlgebra& b = m.algebra;
  b.n = m.basis.size();
  b.ctx = pt.ctx;
  Rat zero(0);
  FpElem fzero(0, p);

  RatMatrix c(b.n, b.n);
  for (std::size_t i = 0; i < b.n; ++i) {
    QPoly bi{{{m.basis[i], Rat(1)}}};
    std::vector<Rat> w = nf_coords(r, m.gb, m.qbasis, bi, zero);
    for (std::size_t j = 0; j < b.n; ++j) c.at(i, j) = w[j];
  }
  m.to_basis = rat_inverse(c);
  if (m.to_basis.rows == 0)
    throw std::invalid_argument(
        "artinian_model: F_p staircase monomials are dependent over Q "
        "(integrality certificate fails)");

  /* coordinates of f in the model basis */
  auto express = [&](const QPoly& f) {
    std::vector<Rat> w = nf_coords(r, m.gb, m.qbasis, f, zero);
    std::vector<Rat> u(b.n, Rat(0));
    for (std::size_t k = 0; k < b.n; ++k) {
      if (w[k] == 0) continue;
      for (std::size_t j = 0; j < b.n; ++j) u[j] += w[k] * m.to_basis.at(k, j);
    }
    return u;
  };
  auto integral = [&](const std::vector<Rat>& u) {
    for (const Rat& x : u)
      if (Int(x.get_den()) % p == 0) return false;
    return true;
  };

  /* Certificate: the O-span T of the basis contains every variable image and
   * is closed under products, so T is the whole localized quotient, free of
   * rank n, and the structure constants below present it faithfully. */
  for (std::size_t v = 0; v < r.vt.nvars(); ++v) {
    QPoly xv = poly_sym(r, v, Rat(1));
    if (!integral(express(xv)))
      throw std::invalid_argument(
          "artinian_model: variable image not p-integral in the model basis "
          "(integrality certificate fails)");
  }
  for (std::size_t i = 0; i < b.n; ++i) {
    RatMatrix mq(b.n, b.n);
    FPoly fi{{{m.basis[i], FpElem(1, p)}}};
    Mat<FpElem> mf = mult_matrix(r, gbf, m.basis, fi, fzero);
    for (std::size_t j = 0; j < b.n; ++j) {
      QPoly prod{{{mono_mul(m.basis[i], m.basis[j]), Rat(1)}}};
      std::vector<Rat> u = express(prod);
      if (!integral(u))
        throw std::invalid_argument(
            "artinian_model: structure constant not p-integral");
      for (std::size_t k = 0; k < b.n; ++k) {
        mq.at(k, j) = u[k];
        FpElem red = FpElem(Int(u[k].get_num()), p) *
                     inverse(FpElem(Int(u[k].get_den()), p));
        if (!(red == mf.at(k, j)))
          throw std::logic_error(
              "artinian_model: F_p cross-check of structure constants failed");
      }
    }
    b.mult.push_back(std::move(mq));
  }
  b.lambda.resize(b.n);
  for (std::size_t i = 0; i < b.n; ++i) {
    IPoly mono{{{m.basis[i], Int(1)}}};
    b.lambda[i] = Rat(evaluate(r, mono, pt));
  }
  b.unit.assign(b.n, Rat(0));
  if (!m.basis[0].is_one())
    throw std::logic_error("artinian_model: basis[0] is not 1");
  b.unit[0] = 1;
  validate(b);
  return m;
}

FiniteOAlgebra algebra_from_artinian(const Ring& r,
                                     const std::vector<IPoly>& relations,
                                     const AugmentationPoint& pt) {
  return artinian_model(r, relations, pt).algebra;
}

std::vector<Rat> model_coords(const ArtinianModel& m, const IPoly& f) {
  std::vector<Rat> w =
      nf_coords(m.ring, m.gb, m.qbasis, to_rational(m.ring, f), Rat(0));
  std::size_t n = m.basis.size();
  std::vector<Rat> u(n, Rat(0));
  for (std::size_t k = 0; k < n; ++k) {
    if (w[k] == 0) continue;
    for (std::size_t j = 0; j < n; ++j) u[j] += w[k] * m.to_basis.at(k, j);
  }
  return u;
}

}  // namespace defect
