#include "defect/verify.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace defect {

namespace {

std::string int_str(const Int& x) { return x.get_str(); }

std::string tuple_key(const FamilyInstance& inst) {
  return family_name(inst.fam) + "_" + std::to_string(inst.p) + "_" +
         int_str(inst.q) + "_" + int_str(inst.s) + "_" + int_str(inst.t);
}

struct ReportCache {
  std::mutex mu;
  std::map<std::string, DefectReport> reports;

  DefectReport get(const FamilyInstance& inst) {
    std::string key = tuple_key(inst);
    {
      std::lock_guard<std::mutex> lk(mu);
      auto it = reports.find(key);
      if (it != reports.end()) return it->second;
    }
    CICover c = instantiate(inst);
    CoverReport cr = check_ci_cover(c);
    if (!cr.ok) throw std::runtime_error("cover not admissible: " + cr.note);
    DefectReport rep = wiles_defect(c);
    std::lock_guard<std::mutex> lk(mu);
    reports.emplace(key, rep);
    return rep;
  }
};

long vp(const Int& x, long p) { return *valuation(x, Int(p)); }

/* --- F_p fiber helpers -------------------------------------------------- */

std::size_t fp_rank(Mat<FpElem> m) {
  return m.cols - right_kernel(std::move(m)).size();
}

/* dimension, named basis (when given), and socle of an F_p quotient */
VerifyCheck fiber_check(const Ring& r, const std::vector<IPoly>& gens, long p,
                        long expected_dim,
                        const std::vector<std::string>& basis_monos,
                        const std::vector<std::string>& socle_gens,
                        long socle_dim) {
  VerifyCheck out;
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
  /* the listed socle generators must lie in (and span) the socle */
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
    for (std::size_t j = 0; j < n; ++j)
      span.at(soc.size() + k, j) = co[j];
  }
  if (fp_rank(span) != soc.size()) {
    out.detail = "listed socle generators do not lie in the socle";
    return out;
  }
  if (!socle_gens.empty()) {
    Mat<FpElem> gen_span(socle_gens.size(), n);
    for (std::size_t k = 0; k < socle_gens.size(); ++k) {
      FPoly f = to_fp(r, parse_poly(r, socle_gens[k]), p);
      std::vector<FpElem> co = nf_coords(r, gbf, sf.basis, f, fz);
      for (std::size_t j = 0; j < n; ++j) gen_span.at(k, j) = co[j];
    }
    if (static_cast<long>(fp_rank(gen_span)) != socle_dim) {
      out.detail = "listed socle generators do not span the socle";
      return out;
    }
  }
  out.pass = true;
  out.detail = "dim " + std::to_string(n) + ", socle dim " +
               std::to_string(socle_dim);
  return out;
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

/* --- matrix-entry generators of the phi-uni ideal ------------------------ */

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
  /* D = (1+X) A, a polynomial matrix */
  M2 d{add(q, mul(a, oneX)), mul(b, oneX), mul(c, oneX),
       mul(sub(add(P("1"), P("X")), a), oneX)};
  std::vector<IPoly> out;
  /* N^2 = (al^2 + be ga) I */
  out.push_back(P("al^2 + be*ga"));
  /* N ((1+X)A - (1+X)^2 I) */
  M2 sh1 = d;
  IPoly oneX2 = mul(oneX, oneX);
  sh1[0] = sub(sh1[0], oneX2);
  sh1[3] = sub(sh1[3], oneX2);
  for (const auto& e : mat_mul2(n2, sh1)) out.push_back(e);
  /* ((1+X)A - q I) N */
  M2 sh2 = d;
  sh2[0] = sub(sh2[0], q);
  sh2[3] = sub(sh2[3], q);
  for (const auto& e : mat_mul2(sh2, n2)) out.push_back(e);
  /* (1+X)(AN - qNA) = D N - q N D */
  M2 dn = mat_mul2(d, n2);
  M2 nd = mat_mul2(n2, d);
  for (auto& e : nd) e = mul(q, e);
  for (const auto& e : mat_sub2(dn, nd)) out.push_back(e);
  /* (1+X)(det A - q) */
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

/* --- symbolic Jacobian-minor ideals over Q[q_, s_, t_] ------------------- */

std::vector<IPoly> symbolic_minor_ideal(FamilyId fam, bool variant_s4,
                                        const Ring& r3) {
  RingPresentation par = presentation(fam);
  const Ring& r = par.ring;
  std::vector<IPoly> cover = family_cover(fam, variant_s4);
  std::vector<std::size_t> vars(r.vt.nvars());
  for (std::size_t i = 0; i < vars.size(); ++i) vars[i] = i;
  Mat<IPoly> jac = jacobian(r, cover, vars);
  /* evaluate at the symbolic augmentation b -> s_, be -> t_, others 0 */
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

/* --- small random corpora ------------------------------------------------ */

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

std::string fmt_primes(const std::vector<long>& ps) {
  std::string out;
  for (long p : ps) out += (out.empty() ? "" : ",") + std::to_string(p);
  return out;
}

}  // namespace

VerifySuite verify_paper(const VerifyOptions& opt) {
  std::vector<std::pair<std::string, std::function<VerifyCheck()>>> tasks;
  auto add = [&](std::string name, std::function<VerifyCheck()> fn) {
    tasks.emplace_back(std::move(name), std::move(fn));
  };
  auto cache = std::make_shared<ReportCache>();
  std::vector<long> odd_primes;
  for (long p : opt.primes)
    if (p != 2) odd_primes.push_back(p);

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

  /* family closed forms (and with them the symbolic Ann/Fitt values by
   * specialization at five tuples per family) */
  auto add_closed_form = [&](FamilyId fam, const Tuple& tu,
                             std::size_t cover_rank, std::size_t target_rank) {
    FamilyInstance inst{fam, tu.p, Int(tu.q), Int(tu.s), Int(tu.t)};
    add("closed_forms_" + tuple_key(inst), [=]() {
      VerifyCheck out;
      DefectReport rep = cache->get(inst);
      ExpectedInvariants e = expected_invariants(inst);
      std::ostringstream d;
      d << "ann=" << (rep.ann.v ? *rep.ann.v : -1) << " c1=" << rep.c1
        << " d1=" << rep.d1 << " delta=" << rep.delta;
      out.detail = d.str();
      if (!e.regime_ok) {
        out.pass = true;
        out.detail += " (outside closed-form regime, computed values reported)";
        return out;
      }
      out.pass = rep.ann == OIdeal{e.ann_v} && rep.fitt == OIdeal{e.fitt_v} &&
                 rep.c1 == e.c1 && rep.d1 == e.d1 && rep.delta == e.delta &&
                 rep.cover_rank == cover_rank && rep.target_rank == target_rank;
      return out;
    });
  };
  for (const auto& tu : st_tuples) {
    add_closed_form(FamilyId::steinberg, tu, 8, 4);
    add_closed_form(FamilyId::unipotent, tu, 12, 5);
  }
  for (const auto& tu : phi_tuples)
    add_closed_form(FamilyId::phi_unipotent, tu, 16, 6);

  /* determinantal divisors and the lattice index for st */
  for (const auto& tu : st_tuples) {
    FamilyInstance inst{FamilyId::steinberg, tu.p, Int(tu.q), Int(tu.s),
                        Int(tu.t)};
    add("determinantal_divisors_" + tuple_key(inst), [=]() {
      VerifyCheck out;
      DefectReport rep = cache->get(inst);
      long n = monodromy_n(inst);
      long vt = vp(inst.t, inst.p), vq = vp(inst.q - 1, inst.p);
      long g2 = std::min(vt, vq);
      const auto& ed = rep.elementary_divisors;
      if (ed.size() != 3) {
        out.detail = "expected 3 nonzero divisors";
        return out;
      }
      bool sums = ed[0] == n && ed[0] + ed[1] == n + g2 &&
                  ed[0] + ed[1] + ed[2] == n + vt + vq;
      bool index = rep.lattice_kernel_length == (vt - n) + (vq - n);
      out.pass = sums && index;
      std::ostringstream d;
      d << "divisor sums " << ed[0] << "," << ed[0] + ed[1] << ","
        << ed[0] + ed[1] + ed[2] << " index " << rep.lattice_kernel_length;
      out.detail = d.str();
      return out;
    });
  }

  /* generator-set identities over Q and the F_p fibers */
  add("ideal_matrix_entries_phi_uni", [=]() {
    VerifyCheck out;
    Ring r = presentation(FamilyId::phi_unipotent).ring;
    std::vector<IPoly> entries = phi_uni_matrix_entries(r);
    std::vector<IPoly> rels = presentation(FamilyId::phi_unipotent).relations;
    /* equality holds in the local ring where 1+X, 2+X and q = q_+1 are units;
     * certify by membership after scaling with powers of their product */
    IPoly unit = poly_mul(r, parse_poly(r, "(1 + X)*(2 + X)"),
                          parse_poly(r, "q_ + 1"));
    auto err = localized_equal<Rat>(
        r, entries, rels, unit, [&](const IPoly& f) { return to_rational(r, f); });
    if (err) {
      out.detail = "Q: " + *err;
      return out;
    }
    for (long p : odd_primes) {
      auto errp = localized_equal<FpElem>(
          r, entries, rels, unit,
          [&](const IPoly& f) { return to_fp(r, f, p); });
      if (errp) {
        out.detail = "F_" + std::to_string(p) + ": " + *errp;
        return out;
      }
    }
    out.pass = true;
    out.detail = "localized at (1+X)(2+X)q over Q and F_{" +
                 fmt_primes(odd_primes) + "}";
    return out;
  });

  add("ideal_un_intersection", [=]() {
    VerifyCheck out;
    RingPresentation un = presentation(FamilyId::unipotent);
    const Ring& r = un.ring;
    std::vector<IPoly> unr =
        concat_polys(un.relations, parse_all_in(r, {"al", "be", "ga"}));
    std::vector<IPoly> st = concat_polys(un.relations, parse_all_in(r, {"X"}));
    /* the X-component is the Steinberg ideal */
    std::vector<IPoly> st_named = parse_all_in(r, {"X"});
    RingPresentation stp = presentation(FamilyId::steinberg);
    for (const auto& f : stp.relations)
      st_named.push_back(transport(stp.ring, f, r));
    auto inter_q = intersect_pair(r, to_rational(r, unr), to_rational(r, st));
    if (!ideal_equal(r, inter_q, to_rational(r, un.relations))) {
      out.detail = "Q intersection differs";
      return out;
    }
    if (!ideal_equal(r, to_rational(r, st), to_rational(r, st_named))) {
      out.detail = "Q Steinberg component differs";
      return out;
    }
    for (long p : odd_primes) {
      auto inter_p = intersect_pair(r, to_fp(r, unr, p), to_fp(r, st, p));
      if (!ideal_equal(r, inter_p, to_fp(r, un.relations, p))) {
        out.detail = "F_" + std::to_string(p) + " intersection differs";
        return out;
      }
      if (!ideal_equal(r, to_fp(r, st, p), to_fp(r, st_named, p))) {
        out.detail = "F_" + std::to_string(p) + " Steinberg component differs";
        return out;
      }
    }
    out.pass = true;
    out.detail = "over Q and F_{" + fmt_primes(odd_primes) + "}";
    return out;
  });

  add("ideal_phi_uni_minimal_primes", [=]() {
    VerifyCheck out;
    RingPresentation phi = presentation(FamilyId::phi_unipotent);
    const Ring& r = phi.ring;
    std::vector<IPoly> i1 =
        concat_polys(phi.relations, parse_all_in(r, {"al", "be", "ga"}));
    std::vector<IPoly> i2 = concat_polys(phi.relations, parse_all_in(r, {"X"}));
    auto inter_q = intersect_pair(r, to_rational(r, i1), to_rational(r, i2));
    if (!ideal_equal(r, inter_q, to_rational(r, phi.relations))) {
      out.detail = "Q intersection differs";
      return out;
    }
    for (long p : opt.primes) {
      auto inter_p = intersect_pair(r, to_fp(r, i1, p), to_fp(r, i2, p));
      if (!ideal_equal(r, inter_p, to_fp(r, phi.relations, p))) {
        out.detail = "F_" + std::to_string(p) + " intersection differs";
        return out;
      }
    }
    out.pass = true;
    out.detail = "over Q and F_{" + fmt_primes(opt.primes) + "}";
    return out;
  });

  /* fiber ranks, bases, socles */
  for (long p : opt.primes) {
    std::string sp = std::to_string(p);
    add("fiber_phi_uni_cover_s4_p" + sp, [=]() {
      RingPresentation par = presentation(FamilyId::phi_unipotent);
      const Ring& r = par.ring;
      std::vector<IPoly> gens = parse_all_in(r, {"q_", "s_", "t_"});
      gens = concat_polys(gens, family_s_sequence(FamilyId::phi_unipotent));
      gens = concat_polys(gens, family_cover(FamilyId::phi_unipotent, true));
      return fiber_check(r, gens, p, 16,
                         {"1", "a", "a*X", "a*X*al", "a*al", "b", "b*al", "X",
                          "X^2", "X^2*al", "X*al", "X*al^2", "X*al^3", "al",
                          "al^2", "al^3"},
                         {"X*al^3"}, 1);
    });
    add("fiber_phi_uni_cover_s4prime_p" + sp, [=]() {
      RingPresentation par = presentation(FamilyId::phi_unipotent);
      const Ring& r = par.ring;
      std::vector<IPoly> gens = parse_all_in(r, {"q_", "s_", "t_"});
      gens = concat_polys(gens, family_s_sequence(FamilyId::phi_unipotent));
      gens = concat_polys(gens, family_cover(FamilyId::phi_unipotent, false));
      return fiber_check(r, gens, p, 16,
                         {"1", "a", "a*X", "a*X*al", "a*al", "b", "b*al", "X",
                          "X^2", "X^2*al", "X*al", "X*al^2", "X*al^3", "al",
                          "al^2", "al^3"},
                         {"X*al^3"}, 1);
    });
    add("fiber_phi_uni_target_p" + sp, [=]() {
      RingPresentation par = presentation(FamilyId::phi_unipotent);
      const Ring& r = par.ring;
      std::vector<IPoly> gens = parse_all_in(r, {"q_", "s_", "t_"});
      gens = concat_polys(gens, family_s_sequence(FamilyId::phi_unipotent));
      gens = concat_polys(gens, par.relations);
      /* the stated closed form lists b*X in the basis and X*al as the socle,
       * but al*X and be*X are relations, so both vanish in this quotient;
       * the honest basis replaces b*X by a*b, whose class spans the socle */
      VerifyCheck out = fiber_check(r, gens, p, 6,
                                    {"1", "a", "b", "X", "al", "a*b"},
                                    {"a*b"}, 1);
      if (out.pass) out.detail += "; socle a*b (stated X*al vanishes)";
      return out;
    });
    add("fiber_phi_uni_parameter_quotient_p" + sp, [=]() {
      RingPresentation par = presentation(FamilyId::phi_unipotent);
      const Ring& r = par.ring;
      std::vector<IPoly> gens =
          parse_all_in(r, {"q_", "s_", "t_", "b - c", "b - be", "X - ga"});
      gens = concat_polys(gens, par.relations);
      return fiber_check(r, gens, p, 6, {"1", "a", "b", "X", "al", "a^2"},
                         {"a^2"}, 1);
    });
    add("fiber_un_integral_quotient_p" + sp, [=]() {
      RingPresentation par = presentation(FamilyId::unipotent);
      const Ring& r = par.ring;
      std::vector<IPoly> gens =
          parse_all_in(r, {"q_", "s_", "t_", "b - c", "b - be", "X - ga"});
      gens = concat_polys(gens, par.relations);
      return fiber_check(r, gens, p, 6, {"1", "a", "a*X", "al", "be", "ga"},
                         {"a*X"}, 1);
    });
    add("fiber_st_target_p" + sp, [=]() {
      RingPresentation par = presentation(FamilyId::steinberg);
      const Ring& r = par.ring;
      std::vector<IPoly> gens = parse_all_in(r, {"q_", "s_", "t_"});
      gens = concat_polys(gens, family_s_sequence(FamilyId::steinberg));
      gens = concat_polys(gens, par.relations);
      return fiber_check(r, gens, p, 4, {"1", "a", "al", "ga"},
                         {"a", "al", "ga"}, 3);
    });
    add("fiber_st_subring_p" + sp, [=]() {
      Ring r = make_ring({"a", "al"}, {});
      std::vector<IPoly> gens =
          parse_all_in(r, {"al^2 - a*al", "a^2 + a*al"});
      return fiber_check(r, gens, p, 4, {"1", "a", "al", "a*al"}, {"a*al"}, 1);
    });
    if (p != 2) {
      add("fiber_un_cover_p" + sp, [=]() {
        RingPresentation par = presentation(FamilyId::unipotent);
        const Ring& r = par.ring;
        std::vector<IPoly> gens = parse_all_in(r, {"q_", "s_", "t_"});
        gens = concat_polys(gens, family_s_sequence(FamilyId::unipotent));
        gens = concat_polys(gens, family_cover(FamilyId::unipotent, true));
        return fiber_check(
            r, gens, p, 12,
            {"1", "a", "a*al", "b", "b*X", "b*al", "X", "X^2", "X*al", "al",
             "al^2", "al^3"},
            {"4*al^3 + 16*a^2 + 54*a*b - 30*X*al + 133*b*al - 19*al^2 + "
             "111*X"},
            1);
      });
      add("fiber_un_target_p" + sp, [=]() {
        RingPresentation par = presentation(FamilyId::unipotent);
        const Ring& r = par.ring;
        std::vector<IPoly> gens = parse_all_in(r, {"q_", "s_", "t_"});
        gens = concat_polys(gens, family_s_sequence(FamilyId::unipotent));
        gens = concat_polys(gens, par.relations);
        return fiber_check(r, gens, p, 5, {"1", "a", "b", "X", "al"}, {"X"}, 1);
      });
    }
  }

  /* symbolic Jacobian-minor ideals over Q[q_, s_, t_] */
  {
    Ring r3 = make_ring({}, {"q_", "s_", "t_"});
    add("jacobian_minors_phi_uni_s4", [=]() {
      VerifyCheck out;
      std::vector<IPoly> minors =
          symbolic_minor_ideal(FamilyId::phi_unipotent, true, r3);
      std::vector<IPoly> target = parse_all_in(
          r3, {"(t_ - s_)*t_^2*q_", "(t_ - s_)*t_^2*s_", "(t_ - s_)*t_^2*t_"});
      out.pass = ideal_equal_fibers(r3, minors, target, opt.primes);
      out.detail = "(t_ - s_) t_^2 (q_, s_, t_)";
      return out;
    });
    add("jacobian_minors_phi_uni_s4prime", [=]() {
      VerifyCheck out;
      std::vector<IPoly> minors =
          symbolic_minor_ideal(FamilyId::phi_unipotent, false, r3);
      std::vector<IPoly> target = parse_all_in(
          r3, {"s_*t_^2*q_", "s_*t_^2*s_", "s_*t_^2*t_"});
      out.pass = ideal_equal_fibers(r3, minors, target, opt.primes);
      out.detail = "s_ t_^2 (q_, s_, t_)";
      return out;
    });
    add("jacobian_minors_un", [=]() {
      VerifyCheck out;
      std::vector<IPoly> minors =
          symbolic_minor_ideal(FamilyId::unipotent, true, r3);
      std::vector<IPoly> target = parse_all_in(
          r3, {"2*q_*t_*q_", "2*q_*t_*s_", "2*q_*t_*t_"});
      out.pass = ideal_equal_fibers(r3, minors, target, odd_primes);
      out.detail = "2 q_ t_ (q_, s_, t_); fibers F_{" + fmt_primes(odd_primes) +
                   "}";
      return out;
    });
  }

  /* invariance / additivity / Phi - Psi on the families */
  auto add_identity_suite = [&](FamilyId fam, Tuple tu) {
    FamilyInstance inst{fam, tu.p, Int(tu.q), Int(tu.s), Int(tu.t)};
    add("identities_family_" + tuple_key(inst), [=]() {
      VerifyCheck out;
      CICover c = instantiate(inst);
      IdentityReport rep =
          verify_identities(c, alt_covers(inst), alt_s_sequences(inst));
      long ran = 0;
      std::string fails;
      for (const auto& ch : rep.checks) {
        if (ch.applicable) ++ran;
        if (ch.applicable && !ch.pass) fails += " " + ch.name;
      }
      bool has_cover = false, has_theta = false;
      for (const auto& ch : rep.checks) {
        if (ch.name.rfind("cover_independence", 0) == 0 && ch.applicable)
          has_cover = true;
        if (ch.name.rfind("theta_independence", 0) == 0 && ch.applicable)
          has_theta = true;
      }
      out.pass = rep.all_pass && has_cover && has_theta;
      out.detail = fails.empty()
                       ? std::to_string(ran) + " applicable checks"
                       : "failing:" + fails;
      return out;
    });
  };
  add_identity_suite(FamilyId::steinberg, {5, 11, 5, 5});
  add_identity_suite(FamilyId::unipotent, {5, 11, 5, 5});
  add_identity_suite(FamilyId::phi_unipotent, {5, 11, 0, 25});

  /* the phi-uni theta-model with finite Phi and Psi */
  add("theta_model_phi_uni", [=]() {
    VerifyCheck out;
    FamilyInstance inst{FamilyId::phi_unipotent, 5, Int(11), Int(0), Int(25)};
    CICover c = instantiate(inst);
    const Ring& r = c.parent.ring;
    c.s_sequence = {parse_poly(r, "b - c"),
                    poly_sub(r, parse_poly(r, "be - c"), ipoly_const(r, 25)),
                    parse_poly(r, "ga - X + al")};
    CoverReport cr = check_ci_cover(c);
    if (!cr.ok) {
      out.detail = cr.note;
      return out;
    }
    DefectReport rep = wiles_defect(c);
    DimensionOneModels models = build_models(c);
    auto phi = phi_length(models.full_model.algebra);
    auto psi = psi_length(models.full_model.algebra);
    if (!phi || !psi) {
      out.detail = "phi or psi infinite";
      return out;
    }
    out.pass = *phi == 6 && *psi == 4 && *phi - *psi == rep.d1 - rep.c1;
    out.detail = "phi=" + std::to_string(*phi) + " psi=" + std::to_string(*psi) +
                 " d1-c1=" + std::to_string(rep.d1 - rep.c1);
    return out;
  });

  /* randomized dimension-one models: Phi - Psi identity, Fitt in Ann, and
   * delta > 0 on these non-CI inputs */
  for (long p : odd_primes) {
    add("random_models_p" + std::to_string(p), [=]() {
      VerifyCheck out;
      long ok = 0, total = 0;
      std::string fails;
      for (long a : {p, 2 * p, p * p, 3 * p, p * p + p}) {
        for (long b : {p, p * p}) {
          ++total;
          CICover c = xy_instance(p, a, b);
          if (!check_ci_cover(c).ok) {
            fails += " inadmissible(a=" + std::to_string(a) + ")";
            continue;
          }
          DefectReport rep = wiles_defect(c);
          DimensionOneModels models = build_models(c);
          auto phi = phi_length(models.full_model.algebra);
          auto psi = psi_length(models.full_model.algebra);
          bool good = phi && psi && *phi - *psi == rep.d1 - rep.c1 &&
                      rep.delta > 0 && rep.ann.v && rep.fitt.v &&
                      *rep.fitt.v >= *rep.ann.v;
          /* additivity spot check on the first instance */
          if (good && a == p && b == p) {
            FiniteOAlgebra t = tensor_product(models.full_model.algebra,
                                              models.full_model.algebra);
            auto tphi = phi_length(t);
            auto tpsi = psi_length(t);
            good = tphi && tpsi && *tphi == 2 * *phi && *tpsi == 2 * *psi;
          }
          if (good)
            ++ok;
          else
            fails += " a=" + std::to_string(a) + ",b=" + std::to_string(b);
        }
      }
      out.pass = ok == total;
      out.detail = std::to_string(ok) + "/" + std::to_string(total) +
                   (fails.empty() ? "" : " failing:" + fails);
      return out;
    });
  }

  /* delta = 0 on a CI corpus */
  add("ci_corpus_delta_zero", [=]() {
    VerifyCheck out;
    long ok = 0, total = 0;
    for (long p : odd_primes) {
      std::vector<CICover> corpus = {diagonal_ci(p, {p}),
                                     diagonal_ci(p, {p * p}),
                                     diagonal_ci(p, {p, 2 * p}),
                                     diagonal_ci(p, {p, p * p, 3 * p})};
      for (const auto& c : corpus) {
        ++total;
        if (!check_ci_cover(c).ok) continue;
        DefectReport rep = wiles_defect(c);
        if (rep.delta == 0 && rep.c1 == 0 && rep.d1 == 0) ++ok;
      }
    }
    out.pass = ok == total && total > 0;
    out.detail = std::to_string(ok) + "/" + std::to_string(total);
    return out;
  });

  /* delta > 0 on non-CI inputs (two per prime) */
  add("non_ci_corpus_delta_positive", [=]() {
    VerifyCheck out;
    long ok = 0, total = 0;
    for (long p : odd_primes) {
      for (long a : {p, p * p}) {
        ++total;
        CICover c = xy_instance(p, a, p);
        if (!check_ci_cover(c).ok) continue;
        if (wiles_defect(c).delta > 0) ++ok;
      }
    }
    out.pass = ok == total && total > 0;
    out.detail = std::to_string(ok) + "/" + std::to_string(total);
    return out;
  });

  /* cross-route oracles */
  add("oracle_koszul_st", [=]() {
    VerifyCheck out;
    FamilyInstance inst{FamilyId::steinberg, 5, Int(11), Int(5), Int(5)};
    CICover c = instantiate(inst);
    DefectReport rep = wiles_defect(c);
    DimensionOneModels models = build_models(c);
    std::vector<std::vector<Rat>> xs;
    for (std::size_t i = 3; i < 6; ++i)
      xs.push_back(model_coords(models.cover_model, c.parent.relations[i]));
    auto kc1 = koszul_c1_oracle(models.cover_model.algebra, xs);
    if (!kc1) {
      out.detail = "oracle not applicable";
      return out;
    }
    out.pass = *kc1 == rep.c1;
    out.detail = "koszul c1=" + std::to_string(*kc1) +
                 " main c1=" + std::to_string(rep.c1);
    return out;
  });

  add("oracle_duality_phi_uni", [=]() {
    VerifyCheck out;
    FamilyInstance inst{FamilyId::phi_unipotent, 5, Int(11), Int(0), Int(25)};
    CICover c = instantiate(inst);
    DefectReport rep = wiles_defect(c);
    DimensionOneModels models = build_models(c);
    DualityResult dr;
    try {
      dr = duality_ann_via_adapted_basis(models);
    } catch (const std::invalid_argument& e) {
      out.detail = e.what();
      return out;
    }
    out.pass = dr.det_is_unit && dr.valuation && rep.ann.v &&
               *dr.valuation == *rep.ann.v;
    std::ostringstream d;
    d << "value valuation "
      << (dr.valuation ? std::to_string(*dr.valuation) : "inf")
      << ", main ann " << (rep.ann.v ? std::to_string(*rep.ann.v) : "inf")
      << (dr.det_is_unit ? ", det C a unit" : ", det C not a unit");
    out.detail = d.str();
    return out;
  });

  /* engine-level properties */
  add("engine_gb_canonicity", [=]() {
    VerifyCheck out;
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
        out.detail = "shuffle " + std::to_string(k) + " changed the basis";
        return out;
      }
    }
    out.pass = true;
    out.detail = "3 shuffles over Q and F_7";
    return out;
  });

  add("engine_snf_minor_gcds", [=]() {
    VerifyCheck out;
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
          out.detail = "matrix " + std::to_string(k) + " disagrees at " +
                       std::to_string(i + 1);
          return out;
        }
        if (lhs == 0) break;
      }
    }
    out.pass = true;
    out.detail = "10 random matrices";
    return out;
  });

  add("engine_fitt_in_ann", [=]() {
    VerifyCheck out;
    long checked = 0;
    for (const auto& tu : st_tuples) {
      for (FamilyId fam : {FamilyId::steinberg, FamilyId::unipotent}) {
        DefectReport rep =
            cache->get({fam, tu.p, Int(tu.q), Int(tu.s), Int(tu.t)});
        if (!rep.fitt.v || !rep.ann.v || *rep.fitt.v < *rep.ann.v) {
          out.detail = "violated for " + family_name(fam);
          return out;
        }
        ++checked;
      }
    }
    for (const auto& tu : phi_tuples) {
      DefectReport rep = cache->get(
          {FamilyId::phi_unipotent, tu.p, Int(tu.q), Int(tu.s), Int(tu.t)});
      if (!rep.fitt.v || !rep.ann.v || *rep.fitt.v < *rep.ann.v) {
        out.detail = "violated for phi-uni";
        return out;
      }
      ++checked;
    }
    out.pass = true;
    out.detail = std::to_string(checked) + " reports";
    return out;
  });

  /* run the registry */
  long limit = opt.budget > 0 ? opt.budget : detail::default_budget();
  std::vector<VerifyCheck> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      VerifyCheck res;
      BudgetGuard guard(limit);
      try {
        res = tasks[i].second();
      } catch (const BudgetExceeded&) {
        res.skipped = true;
        res.detail = "budget exceeded, skipped";
      } catch (const std::exception& e) {
        res.pass = false;
        res.detail = std::string("error: ") + e.what();
      }
      res.name = tasks[i].first;
      results[i] = std::move(res);
    }
  };
  int jobs = std::max(1, opt.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  VerifySuite suite;
  suite.checks = std::move(results);
  std::sort(suite.checks.begin(), suite.checks.end(),
            [](const VerifyCheck& a, const VerifyCheck& b) {
              return a.name < b.name;
            });
  suite.all_pass = true;
  for (const auto& c : suite.checks)
    if (!c.skipped && !c.pass) suite.all_pass = false;
  return suite;
}

std::string suite_to_text(const VerifySuite& s) {
  std::ostringstream os;
  for (const auto& c : s.checks) {
    os << (c.skipped ? "SKIP" : c.pass ? "PASS" : "FAIL") << " " << c.name;
    if (!c.detail.empty()) os << " (" << c.detail << ")";
    os << "\n";
  }
  long fails = 0, skips = 0;
  for (const auto& c : s.checks) {
    if (c.skipped)
      ++skips;
    else if (!c.pass)
      ++fails;
  }
  os << s.checks.size() << " checks, " << fails << " failures, " << skips
     << " skipped\n";
  return os.str();
}

std::string suite_to_json(const VerifySuite& s) {
  nlohmann::ordered_json j;
  j["all_pass"] = s.all_pass;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : s.checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["skipped"] = c.skipped;
    e["detail"] = c.detail;
    j["checks"].push_back(e);
  }
  return j.dump(2) + "\n";
}

}  // namespace defect
