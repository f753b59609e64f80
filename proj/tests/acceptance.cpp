/* Acceptance harness: one line per criterion, nonzero exit on any failure.
 * Every expectation is checked as stated; where a stated value disagrees with
 * the computed one the criterion fails and the detail carries the witness. */

#include <algorithm>
#include <array>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "defect/families.hpp"

using namespace defect;

namespace {

struct Sub {
  bool pass = false;
  std::string detail;
};

long vp(const Int& x, long p) { return *valuation(x, Int(p)); }

struct Tuple {
  long p;
  long q, s, t;
};

const std::vector<Tuple> st_tuples = {{5, 11, 5, 5},
                                      {5, 11, 0, 25},
                                      {7, 29, 7, 49},
                                      {3, 19, 9, 3},
                                      {5, 101, 50, 25}};
const std::vector<Tuple> phi_tuples = {{5, 11, 0, 25},
                                       {5, 11, 0, 125},
                                       {7, 29, 0, 343},
                                       {5, 11, 100, 25},
                                       {5, 11, 150, 25}};
const std::vector<long> fiber_primes = {3, 5, 7, 11, 13};

std::map<std::string, DefectReport> report_cache;

DefectReport cached_report(const FamilyInstance& inst) {
  std::string key = family_name(inst.fam) + "_" + std::to_string(inst.p) + "_" +
                    inst.q.get_str() + "_" + inst.s.get_str() + "_" +
                    inst.t.get_str();
  auto it = report_cache.find(key);
  if (it != report_cache.end()) return it->second;
  CICover c = instantiate(inst);
  CoverReport cr = check_ci_cover(c);
  if (!cr.ok) throw std::runtime_error("cover not admissible: " + cr.note);
  DefectReport rep = wiles_defect(c);
  report_cache.emplace(key, rep);
  return rep;
}

std::vector<IPoly> parse_all_in(const Ring& r,
                                const std::vector<std::string>& ss) {
  std::vector<IPoly> out;
  for (const auto& s : ss) out.push_back(parse_poly(r, s));
  return out;
}

std::vector<IPoly> concat_polys(std::vector<IPoly> a,
                                const std::vector<IPoly>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::size_t fp_rank(Mat<FpElem> m) {
  return m.cols - right_kernel(std::move(m)).size();
}

/* dimension, named basis (when given), and socle of an F_p quotient */
Sub fiber_check(const Ring& r, const std::vector<IPoly>& gens, long p,
                long expected_dim, const std::vector<std::string>& basis_monos,
                const std::vector<std::string>& socle_gens, long socle_dim) {
  Sub out;
  auto gbf = buchberger(r, to_fp(r, gens, p));
  StaircaseResult sf = staircase(r, gbf);
  if (!sf.finite) {
    out.detail = "quotient not finite";
    return out;
  }
  std::size_t n = sf.basis.size();
  if (static_cast<long>(n) != expected_dim) {
    out.detail = "dimension " + std::to_string(n) + ", expected " +
                 std::to_string(expected_dim);
    return out;
  }
  FpElem fz(0, p);
  if (!basis_monos.empty()) {
    if (basis_monos.size() != n) {
      out.detail = "listed basis has wrong size";
      return out;
    }
    Mat<FpElem> coords(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      FPoly f = to_fp(r, parse_poly(r, basis_monos[i]), p);
      std::vector<FpElem> co = nf_coords(r, gbf, sf.basis, f, fz);
      for (std::size_t j = 0; j < n; ++j) coords.at(i, j) = co[j];
    }
    if (fp_rank(coords) != n) {
      out.detail = "listed elements are not a basis";
      return out;
    }
  }
  std::vector<std::size_t> syms(r.vt.nsym());
  for (std::size_t i = 0; i < syms.size(); ++i) syms[i] = i;
  auto soc = socle_basis(r, gbf, sf.basis, syms, fz);
  if (static_cast<long>(soc.size()) != socle_dim) {
    out.detail = "socle dimension " + std::to_string(soc.size()) +
                 ", expected " + std::to_string(socle_dim);
    return out;
  }
  Mat<FpElem> span(soc.size() + socle_gens.size(), n);
  for (std::size_t i = 0; i < soc.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) span.at(i, j) = soc[i][j];
  for (std::size_t k = 0; k < socle_gens.size(); ++k) {
    FPoly f = to_fp(r, parse_poly(r, socle_gens[k]), p);
    std::vector<FpElem> co = nf_coords(r, gbf, sf.basis, f, fz);
    bool zero = true;
    for (const auto& x : co) zero = zero && x.is_zero();
    if (zero) {
      out.detail = "socle generator " + socle_gens[k] + " vanishes";
      return out;
    }
    for (std::size_t j = 0; j < n; ++j) span.at(soc.size() + k, j) = co[j];
  }
  if (fp_rank(span) != soc.size()) {
    out.detail = "listed socle generators do not lie in the socle";
    return out;
  }
  out.pass = true;
  out.detail = "dim " + std::to_string(n);
  return out;
}

/* entries of N^2, N(A-(1+X)I), (A-q(1+X)^{-1})N, AN-qNA, det A - q with the
 * (1+X)^{-1} denominators cleared by the unit 1+X */
std::vector<IPoly> phi_uni_matrix_entries(const Ring& r) {
  auto P = [&](const std::string& s) { return parse_poly(r, s); };
  IPoly q = P("q_ + 1");
  IPoly oneX = P("1 + X");
  IPoly al = P("al"), be = P("be"), ga = P("ga");
  IPoly a = P("a"), b = P("b"), c = P("c");
  auto mul = [&](const IPoly& f, const IPoly& g) { return poly_mul(r, f, g); };
  auto add = [&](const IPoly& f, const IPoly& g) { return poly_add(r, f, g); };
  auto sub = [&](const IPoly& f, const IPoly& g) { return poly_sub(r, f, g); };
  using M2 = std::array<IPoly, 4>; /* row-major 2x2 */
  auto mat_mul2 = [&](const M2& x, const M2& y) {
    return M2{add(mul(x[0], y[0]), mul(x[1], y[2])),
              add(mul(x[0], y[1]), mul(x[1], y[3])),
              add(mul(x[2], y[0]), mul(x[3], y[2])),
              add(mul(x[2], y[1]), mul(x[3], y[3]))};
  };
  auto mat_sub2 = [&](const M2& x, const M2& y) {
    return M2{sub(x[0], y[0]), sub(x[1], y[1]), sub(x[2], y[2]),
              sub(x[3], y[3])};
  };
  M2 n2{al, be, ga, poly_neg(r, al)};
  M2 d{add(q, mul(a, oneX)), mul(b, oneX), mul(c, oneX),
       mul(sub(add(P("1"), P("X")), a), oneX)};
  std::vector<IPoly> out;
  out.push_back(P("al^2 + be*ga"));
  M2 sh1 = d;
  IPoly oneX2 = mul(oneX, oneX);
  sh1[0] = sub(sh1[0], oneX2);
  sh1[3] = sub(sh1[3], oneX2);
  for (const auto& e : mat_mul2(n2, sh1)) out.push_back(e);
  M2 sh2 = d;
  sh2[0] = sub(sh2[0], q);
  sh2[3] = sub(sh2[3], q);
  for (const auto& e : mat_mul2(sh2, n2)) out.push_back(e);
  M2 dn = mat_mul2(d, n2);
  M2 nd = mat_mul2(n2, d);
  for (auto& e : nd) e = mul(q, e);
  for (const auto& e : mat_sub2(dn, nd)) out.push_back(e);
  out.push_back(
      sub(sub(mul(d[0], sub(add(P("1"), P("X")), a)), mul(b, mul(c, oneX))),
          mul(q, oneX)));
  return out;
}

/* equality of the ideals generated by a and b after localizing at unit,
 * certified by membership of (unit)^m * gen for some m <= 4 */
template <class K, class Conv>
std::optional<std::string> localized_equal(const Ring& r,
                                           const std::vector<IPoly>& a,
                                           const std::vector<IPoly>& b,
                                           const IPoly& unit, Conv conv) {
  std::vector<Poly<K>> ka, kb;
  for (const auto& f : a) ka.push_back(conv(f));
  for (const auto& f : b) kb.push_back(conv(f));
  Poly<K> ku = conv(unit);
  auto gba = buchberger(r, ka);
  auto gbb = buchberger(r, kb);
  auto member_loc = [&](const Poly<K>& f, const std::vector<Poly<K>>& gb) {
    Poly<K> g = f;
    for (int m = 0; m <= 4; ++m) {
      if (in_ideal(r, g, gb)) return true;
      g = poly_mul(r, g, ku);
    }
    return false;
  };
  for (std::size_t i = 0; i < ka.size(); ++i)
    if (!member_loc(ka[i], gbb))
      return "entry " + std::to_string(i) + " not in relation ideal";
  for (std::size_t i = 0; i < kb.size(); ++i)
    if (!member_loc(kb[i], gba))
      return "relation " + std::to_string(i) + " not in entry ideal";
  return std::nullopt;
}

/* top Jacobian minors of a family cover at the symbolic augmentation,
 * transported to Q[q_, s_, t_] */
std::vector<IPoly> symbolic_minor_ideal(FamilyId fam, bool variant_s4,
                                        const Ring& r3) {
  RingPresentation par = presentation(fam);
  const Ring& r = par.ring;
  std::vector<IPoly> cover = family_cover(fam, variant_s4);
  std::vector<std::size_t> vars(r.vt.nvars());
  for (std::size_t i = 0; i < vars.size(); ++i) vars[i] = i;
  Mat<IPoly> jac = jacobian(r, cover, vars);
  std::map<std::size_t, IPoly> images;
  for (std::size_t i = 0; i < r.vt.nvars(); ++i) {
    const std::string& nm = r.vt.name(i);
    if (nm == "b")
      images[i] = parse_poly(r, "s_");
    else if (nm == "be")
      images[i] = parse_poly(r, "t_");
    else
      images[i] = IPoly{};
  }
  Mat<IPoly> ev(jac.rows, jac.cols);
  for (std::size_t i = 0; i < jac.rows; ++i)
    for (std::size_t j = 0; j < jac.cols; ++j)
      ev.at(i, j) = substitute(r, jac.at(i, j), images);
  std::vector<IPoly> minors = fitting_ideal(r, ev);
  std::vector<IPoly> out;
  for (const auto& f : minors) out.push_back(transport(r, f, r3));
  return out;
}

CICover xy_instance(long p, long a, long b) {
  Ring r = make_ring({"x", "y"}, {});
  std::vector<IPoly> rel = {
      parse_poly(r, "x^2 - " + std::to_string(a) + "*x"), parse_poly(r, "x*y"),
      parse_poly(r, "y^2 - " + std::to_string(b) + "*y")};
  AugmentationPoint pt{{{"x", Int(0)}, {"y", Int(0)}}, DvrContext{Int(p)}};
  return CICover{RingPresentation{r, rel}, {rel[0], rel[2]}, {}, pt};
}

CICover diagonal_ci(long p, const std::vector<long>& coeffs) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    names.push_back("x" + std::to_string(i));
  Ring r = make_ring(names, {});
  std::vector<IPoly> rel;
  AugmentationPoint pt;
  pt.ctx = DvrContext{Int(p)};
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    rel.push_back(parse_poly(r, names[i] + "^2 - " + std::to_string(coeffs[i]) +
                                    "*" + names[i]));
    pt.assign[names[i]] = 0;
  }
  return CICover{RingPresentation{r, rel}, rel, {}, pt};
}

/* --- criteria ------------------------------------------------------------ */

Sub criterion1() {
  Sub out;
  for (std::size_t k = 0; k < 4; ++k) {
    const Tuple& tu = st_tuples[k];
    FamilyInstance inst{FamilyId::steinberg, tu.p, Int(tu.q), Int(tu.s),
                        Int(tu.t)};
    DefectReport rep = cached_report(inst);
    long n = monodromy_n(inst);
    long ann = vp(inst.q - 1, tu.p) + vp(inst.t, tu.p);
    if (!(rep.ann == OIdeal{ann} && rep.fitt == OIdeal{ann + n} &&
          rep.c1 == n && rep.d1 == 3 * n && rep.delta == 2 * n)) {
      std::ostringstream d;
      d << "tuple (" << tu.p << "," << tu.q << "," << tu.s << "," << tu.t
        << "): ann=" << (rep.ann.v ? *rep.ann.v : -1) << " c1=" << rep.c1
        << " d1=" << rep.d1 << " delta=" << rep.delta << ", expected ann="
        << ann << " c1=" << n << " d1=" << 3 * n << " delta=" << 2 * n;
      out.detail = d.str();
      return out;
    }
  }
  out.pass = true;
  out.detail = "4 tuples, exact equality";
  return out;
}

Sub criterion2() {
  Sub out;
  for (std::size_t k = 0; k < 4; ++k) {
    const Tuple& tu = st_tuples[k];
    FamilyInstance inst{FamilyId::unipotent, tu.p, Int(tu.q), Int(tu.s),
                        Int(tu.t)};
    DefectReport rep = cached_report(inst);
    long n = monodromy_n(inst);
    long ann = vp(inst.q - 1, tu.p);
    if (!(rep.ann == OIdeal{ann} && rep.c1 == n && rep.d1 == 2 * n &&
          rep.delta == n)) {
      std::ostringstream d;
      d << "tuple (" << tu.p << "," << tu.q << "," << tu.s << "," << tu.t
        << "): ann=" << (rep.ann.v ? *rep.ann.v : -1) << " c1=" << rep.c1
        << " d1=" << rep.d1 << " delta=" << rep.delta;
      out.detail = d.str();
      return out;
    }
  }
  out.pass = true;
  out.detail = "4 tuples, exact equality";
  return out;
}

Sub criterion3() {
  Sub out;
  std::string fails;
  for (std::size_t k = 0; k < 3; ++k) {
    const Tuple& tu = phi_tuples[k];
    FamilyInstance inst{FamilyId::phi_unipotent, tu.p, Int(tu.q), Int(tu.s),
                        Int(tu.t)};
    DefectReport rep = cached_report(inst);
    long n = monodromy_n(inst);
    if (!(rep.c1 == 3 * n && rep.d1 == 6 * n && rep.delta == 3 * n)) {
      std::ostringstream d;
      d << " (" << tu.p << "," << tu.q << "," << tu.s << "," << tu.t
        << "): c1=" << rep.c1 << " d1=" << rep.d1 << " delta=" << rep.delta
        << " vs stated c1=" << 3 * n << " d1=" << 6 * n
        << " delta=" << 3 * n;
      fails += d.str();
    }
  }
  /* a tuple outside the closed-form regime must still produce a report and
   * carry the regime flag */
  FamilyInstance off{FamilyId::phi_unipotent, 5, Int(11), Int(5), Int(5)};
  DefectReport off_rep = cached_report(off);
  if (expected_invariants(off).regime_ok || off_rep.delta < 0)
    fails += " regime flag missing on (5,11,5,5)";
  if (!fails.empty()) {
    out.detail = "computed values contradict the stated closed form:" + fails;
    return out;
  }
  out.pass = true;
  out.detail = "3 regime tuples plus the regime flag";
  return out;
}

Sub criterion4() {
  Sub out;
  {
    Ring r = presentation(FamilyId::phi_unipotent).ring;
    std::vector<IPoly> entries = phi_uni_matrix_entries(r);
    std::vector<IPoly> rels = presentation(FamilyId::phi_unipotent).relations;
    /* equality holds in the local ring where 1+X, 2+X and q = q_+1 are
     * units; certify by membership after scaling with powers of the product */
    IPoly unit = poly_mul(r, parse_poly(r, "(1 + X)*(2 + X)"),
                          parse_poly(r, "q_ + 1"));
    auto err = localized_equal<Rat>(
        r, entries, rels, unit,
        [&](const IPoly& f) { return to_rational(r, f); });
    if (err) {
      out.detail = "matrix entries, Q: " + *err;
      return out;
    }
    for (long p : fiber_primes) {
      auto errp = localized_equal<FpElem>(
          r, entries, rels, unit,
          [&](const IPoly& f) { return to_fp(r, f, p); });
      if (errp) {
        out.detail = "matrix entries, F_" + std::to_string(p) + ": " + *errp;
        return out;
      }
    }
  }
  {
    RingPresentation un = presentation(FamilyId::unipotent);
    const Ring& r = un.ring;
    std::vector<IPoly> unr =
        concat_polys(un.relations, parse_all_in(r, {"al", "be", "ga"}));
    std::vector<IPoly> st = concat_polys(un.relations, parse_all_in(r, {"X"}));
    auto inter_q = intersect_pair(r, to_rational(r, unr), to_rational(r, st));
    if (!ideal_equal(r, inter_q, to_rational(r, un.relations))) {
      out.detail = "unipotent intersection, Q";
      return out;
    }
    for (long p : fiber_primes) {
      auto inter_p = intersect_pair(r, to_fp(r, unr, p), to_fp(r, st, p));
      if (!ideal_equal(r, inter_p, to_fp(r, un.relations, p))) {
        out.detail = "unipotent intersection, F_" + std::to_string(p);
        return out;
      }
    }
  }
  {
    RingPresentation phi = presentation(FamilyId::phi_unipotent);
    const Ring& r = phi.ring;
    std::vector<IPoly> i1 =
        concat_polys(phi.relations, parse_all_in(r, {"al", "be", "ga"}));
    std::vector<IPoly> i2 = concat_polys(phi.relations, parse_all_in(r, {"X"}));
    auto inter_q = intersect_pair(r, to_rational(r, i1), to_rational(r, i2));
    if (!ideal_equal(r, inter_q, to_rational(r, phi.relations))) {
      out.detail = "minimal-prime intersection, Q";
      return out;
    }
    for (long p : fiber_primes) {
      auto inter_p = intersect_pair(r, to_fp(r, i1, p), to_fp(r, i2, p));
      if (!ideal_equal(r, inter_p, to_fp(r, phi.relations, p))) {
        out.detail = "minimal-prime intersection, F_" + std::to_string(p);
        return out;
      }
    }
  }
  out.pass = true;
  out.detail = "three identities over Q and F_{3,5,7,11,13}";
  return out;
}

Sub criterion5() {
  Sub out;
  std::string fails;
  auto run = [&](const std::string& label, const Sub& s) {
    if (!s.pass) fails += " " + label + " [" + s.detail + "]";
  };
  for (long p : {3L, 5L, 7L}) {
    std::string sp = std::to_string(p);
    {
      RingPresentation par = presentation(FamilyId::phi_unipotent);
      const Ring& r = par.ring;
      std::vector<IPoly> base = parse_all_in(r, {"q_", "s_", "t_"});
      base = concat_polys(base, family_s_sequence(FamilyId::phi_unipotent));
      run("phi_cover_p" + sp,
          fiber_check(r,
                      concat_polys(base,
                                   family_cover(FamilyId::phi_unipotent, true)),
                      p, 16, {}, {"X*al^3"}, 1));
      /* the stated target basis lists b*X and the socle X*al; both classes
       * vanish here since al*X and be*X are relations, so this sub-check is
       * expected to fail against the stated list (the honest basis swaps in
       * a*b, which also spans the socle) */
      run("phi_target_stated_basis_p" + sp,
          fiber_check(r, concat_polys(base, par.relations), p, 6,
                      {"1", "a", "b", "b*X", "X", "al"}, {"X*al"}, 1));
      run("phi_param_quotient_p" + sp,
          fiber_check(r,
                      concat_polys(parse_all_in(r, {"q_", "s_", "t_", "b - c",
                                                    "b - be", "X - ga"}),
                                   par.relations),
                      p, 6, {"1", "a", "b", "X", "al", "a^2"}, {"a^2"}, 1));
    }
    {
      RingPresentation par = presentation(FamilyId::unipotent);
      const Ring& r = par.ring;
      std::vector<IPoly> base = parse_all_in(r, {"q_", "s_", "t_"});
      base = concat_polys(base, family_s_sequence(FamilyId::unipotent));
      if (p != 2)
        run("un_cover_dim12_p" + sp,
            fiber_check(r,
                        concat_polys(base,
                                     family_cover(FamilyId::unipotent, true)),
                        p, 12, {}, {}, 1));
      run("un_target_p" + sp,
          fiber_check(r, concat_polys(base, par.relations), p, 5,
                      {"1", "a", "b", "X", "al"}, {"X"}, 1));
      run("un_integral_quotient_p" + sp,
          fiber_check(r,
                      concat_polys(parse_all_in(r, {"q_", "s_", "t_", "b - c",
                                                    "b - be", "X - ga"}),
                                   par.relations),
                      p, 6, {"1", "a", "a*X", "al", "be", "ga"}, {"a*X"}, 1));
    }
    {
      Ring r = make_ring({"a", "al"}, {});
      run("st_subring_p" + sp,
          fiber_check(r, parse_all_in(r, {"al^2 - a*al", "a^2 + a*al"}), p, 4,
                      {"1", "a", "al", "a*al"}, {"a*al"}, 1));
    }
  }
  if (!fails.empty()) {
    out.detail = "failing:" + fails;
    return out;
  }
  out.pass = true;
  out.detail = "ranks, bases and socles on F_3, F_5, F_7";
  return out;
}

Sub criterion6() {
  Sub out;
  std::string fails;
  for (const Tuple& tu : st_tuples) {
    FamilyInstance st{FamilyId::steinberg, tu.p, Int(tu.q), Int(tu.s),
                      Int(tu.t)};
    FamilyInstance un{FamilyId::unipotent, tu.p, Int(tu.q), Int(tu.s),
                      Int(tu.t)};
    long n = monodromy_n(st);
    long vq = vp(st.q - 1, tu.p), vt = vp(st.t, tu.p);
    DefectReport rs = cached_report(st), ru = cached_report(un);
    if (!(rs.ann == OIdeal{vq + vt} && rs.fitt == OIdeal{vq + vt + n}))
      fails += " st(" + std::to_string(tu.p) + "," + std::to_string(tu.q) +
               "," + std::to_string(tu.s) + "," + std::to_string(tu.t) + ")";
    if (!(ru.ann == OIdeal{vq} && ru.fitt == OIdeal{vq + n}))
      fails += " un(" + std::to_string(tu.p) + "," + std::to_string(tu.q) +
               "," + std::to_string(tu.s) + "," + std::to_string(tu.t) + ")";
  }
  for (const Tuple& tu : phi_tuples) {
    FamilyInstance inst{FamilyId::phi_unipotent, tu.p, Int(tu.q), Int(tu.s),
                        Int(tu.t)};
    long n = monodromy_n(inst);
    long stated = vp(inst.s + inst.t, tu.p) + vp(inst.t, tu.p);
    DefectReport rep = cached_report(inst);
    if (!(rep.ann == OIdeal{stated} && rep.fitt == OIdeal{stated + 3 * n})) {
      std::ostringstream d;
      d << " phi(" << tu.p << "," << tu.q << "," << tu.s << "," << tu.t
        << "): ann=" << (rep.ann.v ? *rep.ann.v : -1)
        << " vs stated v((s+t)t)=" << stated;
      fails += d.str();
    }
  }
  {
    Ring r3 = make_ring({}, {"q_", "s_", "t_"});
    auto check_minors = [&](FamilyId fam, bool s4,
                            const std::vector<std::string>& target_gens,
                            const std::vector<long>& primes,
                            const std::string& label) {
      std::vector<IPoly> minors = symbolic_minor_ideal(fam, s4, r3);
      std::vector<IPoly> target = parse_all_in(r3, target_gens);
      bool ok = ideal_equal(r3, to_rational(r3, minors),
                            to_rational(r3, target)) &&
                ideal_equal_fibers(r3, minors, target, primes);
      if (!ok) fails += " minors_" + label;
    };
    /* stated s4 minor ideal (s_+t_) t_^2 (q_,s_,t_); the computed ideal is
     * (t_-s_) t_^2 (q_,s_,t_), so this sub-check is expected to fail */
    check_minors(FamilyId::phi_unipotent, true,
                 {"(s_ + t_)*t_^2*q_", "(s_ + t_)*t_^2*s_",
                  "(s_ + t_)*t_^2*t_"},
                 fiber_primes, "phi_s4_stated");
    check_minors(FamilyId::phi_unipotent, false,
                 {"s_*t_^2*q_", "s_*t_^2*s_", "s_*t_^2*t_"}, fiber_primes,
                 "phi_s4prime");
    std::vector<long> odd = fiber_primes;
    check_minors(FamilyId::unipotent, true,
                 {"2*q_*t_*q_", "2*q_*t_*s_", "2*q_*t_*t_"}, odd, "un");
  }
  if (!fails.empty()) {
    out.detail = "computed ideals contradict the stated forms:" + fails;
    return out;
  }
  out.pass = true;
  out.detail = "symbolic values at 5 tuples per family plus minor ideals";
  return out;
}

Sub criterion7() {
  Sub out;
  for (const Tuple& tu : st_tuples) {
    FamilyInstance inst{FamilyId::steinberg, tu.p, Int(tu.q), Int(tu.s),
                        Int(tu.t)};
    DefectReport rep = cached_report(inst);
    long n = monodromy_n(inst);
    long vt = vp(inst.t, tu.p), vq = vp(inst.q - 1, tu.p);
    const auto& ed = rep.elementary_divisors;
    /* the stated d_i are determinantal divisors, so they match the partial
     * sums of the elementary-divisor valuations */
    bool ok = ed.size() == 3 && ed[0] == n &&
              ed[0] + ed[1] == n + std::min(vt, vq) &&
              ed[0] + ed[1] + ed[2] == n + vt + vq &&
              rep.lattice_kernel_length == (vt - n) + (vq - n);
    if (!ok) {
      std::ostringstream d;
      d << "tuple (" << tu.p << "," << tu.q << "," << tu.s << "," << tu.t
        << ") divisors";
      for (long v : ed) d << " " << v;
      d << " index " << rep.lattice_kernel_length;
      out.detail = d.str();
      return out;
    }
  }
  out.pass = true;
  out.detail = "determinantal divisors and lattice index at 5 tuples";
  return out;
}

Sub criterion8() {
  Sub out;
  std::string fails;
  /* (a) phi - psi = d1 - c1 on 50 randomized instances */
  long ok_a = 0, total_a = 0;
  for (long p : fiber_primes)
    for (long a : {p, 2 * p, p * p, 3 * p, p * p + p})
      for (long b : {p, p * p}) {
        ++total_a;
        CICover c = xy_instance(p, a, b);
        if (!check_ci_cover(c).ok) continue;
        DefectReport rep = wiles_defect(c);
        DimensionOneModels models = build_models(c);
        auto phi = phi_length(models.full_model.algebra);
        auto psi = psi_length(models.full_model.algebra);
        if (phi && psi && *phi - *psi == rep.d1 - rep.c1) ++ok_a;
      }
  if (ok_a != total_a || total_a < 50)
    fails += " (a) randomized " + std::to_string(ok_a) + "/" +
             std::to_string(total_a);
  /* (a) the three family theta-quotients */
  {
    auto family_theta = [&](FamilyInstance inst, bool adjust) {
      CICover c = instantiate(inst);
      if (adjust) {
        const Ring& r = c.parent.ring;
        c.s_sequence = {parse_poly(r, "b - c"),
                        poly_sub(r, parse_poly(r, "be - c"),
                                 ipoly_const(r, 25)),
                        parse_poly(r, "ga - X + al")};
      }
      DefectReport rep = wiles_defect(c);
      DimensionOneModels models = build_models(c);
      auto phi = phi_length(models.full_model.algebra);
      auto psi = psi_length(models.full_model.algebra);
      return phi && psi && *phi - *psi == rep.d1 - rep.c1;
    };
    if (!family_theta({FamilyId::steinberg, 5, Int(11), Int(5), Int(5)}, false))
      fails += " (a) st theta-quotient";
    if (!family_theta({FamilyId::unipotent, 5, Int(11), Int(5), Int(5)}, false))
      fails += " (a) un theta-quotient";
    if (!family_theta({FamilyId::phi_unipotent, 5, Int(11), Int(0), Int(25)},
                      true))
      fails += " (a) phi-uni theta-quotient";
  }
  /* (b) cover- and theta-independence on the families */
  for (auto [fam, tu] :
       std::vector<std::pair<FamilyId, Tuple>>{{FamilyId::steinberg,
                                                {5, 11, 5, 5}},
                                               {FamilyId::unipotent,
                                                {5, 11, 5, 5}},
                                               {FamilyId::phi_unipotent,
                                                {5, 11, 0, 25}}}) {
    FamilyInstance inst{fam, tu.p, Int(tu.q), Int(tu.s), Int(tu.t)};
    CICover c = instantiate(inst);
    IdentityReport rep =
        verify_identities(c, alt_covers(inst), alt_s_sequences(inst));
    bool has_cover = false, has_theta = false;
    for (const auto& ch : rep.checks) {
      if (ch.name.rfind("cover_independence", 0) == 0 && ch.applicable)
        has_cover = true;
      if (ch.name.rfind("theta_independence", 0) == 0 && ch.applicable)
        has_theta = true;
    }
    if (!(rep.all_pass && has_cover && has_theta))
      fails += " (b) " + family_name(fam);
  }
  /* (c) additivity under tensor squares */
  for (long p : fiber_primes) {
    CICover c = xy_instance(p, p, p);
    DimensionOneModels models = build_models(c);
    const FiniteOAlgebra& b = models.full_model.algebra;
    FiniteOAlgebra t = tensor_product(b, b);
    auto phi = phi_length(b), psi = psi_length(b);
    auto tphi = phi_length(t), tpsi = psi_length(t);
    if (!(phi && psi && tphi && tpsi && *tphi == 2 * *phi &&
          *tpsi == 2 * *psi))
      fails += " (c) p=" + std::to_string(p);
  }
  /* (d) delta = 0 iff CI on 20 CI and 10 non-CI inputs */
  long ok_ci = 0, total_ci = 0, ok_non = 0, total_non = 0;
  for (long p : fiber_primes) {
    for (const auto& c :
         {diagonal_ci(p, {p}), diagonal_ci(p, {p * p}),
          diagonal_ci(p, {p, 2 * p}), diagonal_ci(p, {p, p * p, 3 * p})}) {
      ++total_ci;
      if (check_ci_cover(c).ok && wiles_defect(c).delta == 0) ++ok_ci;
    }
    for (long a : {p, p * p}) {
      ++total_non;
      CICover c = xy_instance(p, a, p);
      if (check_ci_cover(c).ok && wiles_defect(c).delta > 0) ++ok_non;
    }
  }
  if (ok_ci != total_ci || total_ci != 20 || ok_non != total_non ||
      total_non != 10)
    fails += " (d) CI " + std::to_string(ok_ci) + "/" +
             std::to_string(total_ci) + " non-CI " + std::to_string(ok_non) +
             "/" + std::to_string(total_non);
  /* (e) Koszul and duality oracles against the main routes */
  {
    FamilyInstance inst{FamilyId::steinberg, 5, Int(11), Int(5), Int(5)};
    CICover c = instantiate(inst);
    DefectReport rep = wiles_defect(c);
    DimensionOneModels models = build_models(c);
    std::vector<std::vector<Rat>> xs;
    for (std::size_t i = 3; i < 6; ++i)
      xs.push_back(model_coords(models.cover_model, c.parent.relations[i]));
    auto kc1 = koszul_c1_oracle(models.cover_model.algebra, xs);
    if (!kc1 || *kc1 != rep.c1) fails += " (e) koszul st";
  }
  {
    CICover c = xy_instance(5, 5, 25);
    DefectReport rep = wiles_defect(c);
    DimensionOneModels models = build_models(c);
    std::vector<std::vector<Rat>> xs;
    for (const auto& f : c.parent.relations)
      xs.push_back(model_coords(models.cover_model, f));
    auto kc1 = koszul_c1_oracle(models.cover_model.algebra, xs);
    if (!kc1 || *kc1 != rep.c1) fails += " (e) koszul xy";
  }
  {
    FamilyInstance inst{FamilyId::phi_unipotent, 5, Int(11), Int(0), Int(25)};
    CICover c = instantiate(inst);
    DefectReport rep = wiles_defect(c);
    DimensionOneModels models = build_models(c);
    try {
      DualityResult dr = duality_ann_via_adapted_basis(models);
      if (!(dr.det_is_unit && dr.valuation && rep.ann.v &&
            *dr.valuation == *rep.ann.v))
        fails += " (e) duality phi-uni";
    } catch (const std::invalid_argument& e) {
      fails += std::string(" (e) duality: ") + e.what();
    }
  }
  if (!fails.empty()) {
    out.detail = "failing:" + fails;
    return out;
  }
  out.pass = true;
  out.detail = "identity on " + std::to_string(total_a) +
               " randomized instances plus (b)-(e)";
  return out;
}

Sub criterion9() {
  Sub out;
  {
    RingPresentation st = presentation(FamilyId::steinberg);
    const Ring& r = st.ring;
    std::mt19937 rng(7);
    auto base_q = buchberger(r, to_rational(r, st.relations));
    auto base_f = buchberger(r, to_fp(r, st.relations, 7));
    for (int k = 0; k < 3; ++k) {
      std::vector<IPoly> sh = st.relations;
      std::shuffle(sh.begin(), sh.end(), rng);
      if (!(buchberger(r, to_rational(r, sh)) == base_q) ||
          !(buchberger(r, to_fp(r, sh, 7)) == base_f)) {
        out.detail = "generator shuffle changed the reduced basis";
        return out;
      }
    }
  }
  {
    std::mt19937 rng(20240229);
    std::uniform_int_distribution<int> dim(2, 5), entry(-9, 9);
    for (int k = 0; k < 10; ++k) {
      std::size_t rows = dim(rng), cols = dim(rng);
      IntMatrix m(rows, cols);
      for (auto& x : m.a) x = entry(rng);
      SnfResult snf = smith_normal_form(m);
      Int prod = 1;
      for (std::size_t i = 0; i < std::min(rows, cols); ++i) {
        if (i < snf.diag.size()) prod *= snf.diag[i];
        Int g = gcd_of_minors(m, i + 1);
        Int lhs = i < snf.diag.size() ? prod : Int(0);
        if (abs(lhs) != abs(g)) {
          out.detail = "SNF and minor gcds disagree on matrix " +
                       std::to_string(k);
          return out;
        }
        if (lhs == 0) break;
      }
    }
  }
  for (const auto& [key, rep] : report_cache) {
    if (!rep.fitt.v || !rep.ann.v || *rep.fitt.v < *rep.ann.v) {
      out.detail = "Fitt not contained in Ann for " + key;
      return out;
    }
  }
  out.pass = true;
  out.detail = "GB canonicity, SNF vs minor gcds, Fitt in Ann on " +
               std::to_string(report_cache.size()) + " reports";
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* title;
    Sub (*fn)();
  };
  const std::vector<Criterion> criteria = {
      {"Steinberg closed forms", criterion1},
      {"unipotent closed forms", criterion2},
      {"phi-unipotent closed forms", criterion3},
      {"generator-set ideal identities", criterion4},
      {"fiber ranks, bases and socles", criterion5},
      {"symbolic ideal values and Jacobian minors", criterion6},
      {"Steinberg divisors and lattice index", criterion7},
      {"property suite", criterion8},
      {"engine-level properties", criterion9}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Sub res;
    try {
      res = criteria[i].fn();
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = std::string("error: ") + e.what();
    }
    if (!res.pass) ++failures;
    std::cout << (res.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " ("
              << criteria[i].title << "): " << res.detail << "\n";
    std::cout.flush();
  }
  std::cout << criteria.size() << " criteria, " << failures << " failing\n";
  return failures == 0 ? 0 : 1;
}
