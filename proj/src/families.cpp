#include "defect/families.hpp"

namespace defect {

namespace {

std::vector<IPoly> parse_all(const Ring& r, const std::vector<std::string>& ss) {
  std::vector<IPoly> out;
  for (const auto& s : ss) out.push_back(parse_poly(r, s));
  return out;
}

const std::vector<std::string>& var_names(FamilyId fam) {
  static const std::vector<std::string> st = {"a", "b", "c", "al", "be", "ga"};
  static const std::vector<std::string> fun = {"al", "be", "ga", "X", "a", "b", "c"};
  static const std::vector<std::string> un = {"a", "b", "c", "X", "al", "be", "ga"};
  switch (fam) {
    case FamilyId::steinberg: return st;
    case FamilyId::phi_unipotent: return fun;
    default: return un;
  }
}

const std::vector<std::string>& relation_text(FamilyId fam) {
  static const std::vector<std::string> st = {
      "al^2 + be*ga",
      "(q_ + a)*al + c*be",
      "(q_ + a)*a + b*c",
      "(q_ + a)*ga - c*al",
      "a*al + b*ga",
      "a*be - b*al"};
  static const std::vector<std::string> fun = {
      "al*X",
      "be*X",
      "ga*X",
      "a*(q_ + 1) + (a^2 + b*c)*(1 + X) - a*(1 + X)^2",
      "al^2 + be*ga",
      "al*c - ga*(q_ + a)",
      "al*a + ga*b",
      "be*c + al*(q_ + a)",
      "be*a - al*b"};
  static const std::vector<std::string> un = {
      "X*ga",
      "X*be",
      "X*al",
      "al^2 + be*ga",
      "b*al - a*be",
      "a*al + b*ga",
      "c*be - b*ga + q_*al",
      "c*al - a*ga - q_*ga",
      "a^2 + b*c + a*X + q_*a + (q_ + 1)*X"};
  switch (fam) {
    case FamilyId::steinberg: return st;
    case FamilyId::phi_unipotent: return fun;
    default: return un;
  }
}

IPoly lin_comb(const Ring& r, const std::vector<std::pair<IPoly, long>>& terms) {
  IPoly acc;
  for (const auto& [f, c] : terms) {
    if (c == 0) continue;
    IPoly g = c == 1 ? f : poly_mul(r, ipoly_const(r, Int(c)), f);
    acc = poly_add(r, acc, g);
  }
  return acc;
}

std::vector<IPoly> specialize_all(const Ring& from, const std::vector<IPoly>& v,
                                  const std::map<std::string, Int>& values,
                                  const Ring& to) {
  std::vector<IPoly> out;
  for (const auto& f : v) out.push_back(specialize_params(from, f, values, to));
  return out;
}

bool is_odd_prime(long p) {
  if (p < 3 || p % 2 == 0) return false;
  for (long d = 3; d * d <= p; d += 2)
    if (p % d == 0) return false;
  return true;
}

}  // namespace

FamilyId family_from_string(const std::string& s) {
  if (s == "st" || s == "steinberg") return FamilyId::steinberg;
  if (s == "un" || s == "unipotent") return FamilyId::unipotent;
  if (s == "phi-uni" || s == "phi_unipotent") return FamilyId::phi_unipotent;
  throw std::invalid_argument("unknown family: " + s);
}

std::string family_name(FamilyId fam) {
  switch (fam) {
    case FamilyId::steinberg: return "st";
    case FamilyId::unipotent: return "un";
    default: return "phi-uni";
  }
}

long monodromy_n(const FamilyInstance& inst) {
  Int g = gcd(gcd(inst.s, inst.t), Int(inst.q - 1));
  auto v = valuation(g, Int(inst.p));
  if (!v) throw std::invalid_argument("monodromy_n: gcd(s, t, q-1) is zero");
  return *v;
}

void validate_instance(const FamilyInstance& inst) {
  if (!is_odd_prime(inst.p))
    throw std::invalid_argument("p must be an odd prime");
  if ((inst.q - 1) % inst.p != 0)
    throw std::invalid_argument("q must be 1 mod p");
  if (inst.s % inst.p != 0 || inst.t % inst.p != 0)
    throw std::invalid_argument("p must divide s and t");
  if (inst.t == 0) throw std::invalid_argument("t must be nonzero");
}

RingPresentation presentation(FamilyId fam) {
  Ring r = make_ring(var_names(fam), {"q_", "s_", "t_"});
  return RingPresentation{r, parse_all(r, relation_text(fam))};
}

std::vector<IPoly> family_cover(FamilyId fam, bool phi_variant_s4) {
  RingPresentation pr = presentation(fam);
  const Ring& r = pr.ring;
  const std::vector<IPoly>& rr = pr.relations;
  switch (fam) {
    case FamilyId::steinberg:
      return {rr[0], rr[1], rr[2]};
    case FamilyId::unipotent:
      return {lin_comb(r, {{rr[0], -1}, {rr[1], 2}, {rr[3], 1}, {rr[4], -2}}),
              lin_comb(r, {{rr[6], 1}, {rr[0], -1}}),
              lin_comb(r, {{rr[7], 1}, {rr[0], -1}}),
              lin_comb(r, {{rr[8], 1}, {rr[0], -1}})};
    default: {
      IPoly a = poly_sym(r, *r.vt.index("a"), Int(1));
      IPoly b = poly_sym(r, *r.vt.index("b"), Int(1));
      /* s4' = a r3 + r4 + a r6 - b r7 - r3; s4 = r2 + s4' */
      IPoly s4p = poly_sub(r, rr[3], rr[2]);
      s4p = poly_add(r, s4p, poly_mul(r, a, rr[2]));
      s4p = poly_add(r, s4p, poly_mul(r, a, rr[5]));
      s4p = poly_sub(r, s4p, poly_mul(r, b, rr[6]));
      return {poly_add(r, rr[8], rr[5]),
              lin_comb(r, {{rr[7], 1}, {rr[6], -1}, {rr[1], 1}}),
              rr[4],
              phi_variant_s4 ? poly_add(r, rr[1], s4p) : s4p};
    }
  }
}

std::vector<IPoly> family_s_sequence(FamilyId fam) {
  Ring r = presentation(fam).ring;
  switch (fam) {
    case FamilyId::steinberg:
      return parse_all(r, {"ga - be", "c + b", "be + b"});
    case FamilyId::unipotent:
      return parse_all(r, {"b - s_ - be + t_", "a + X - ga", "b - s_ - c"});
    default:
      return parse_all(r, {"b - s_ - c", "be - t_ - c", "ga - X"});
  }
}

Ring specialized_ring(FamilyId fam) { return make_ring(var_names(fam), {}); }

AugmentationPoint augmentation(const FamilyInstance& inst) {
  validate_instance(inst);
  AugmentationPoint pt;
  pt.ctx = DvrContext{Int(inst.p)};
  for (const auto& v : var_names(inst.fam)) pt.assign[v] = 0;
  pt.assign["b"] = inst.s;
  pt.assign["be"] = inst.t;
  return pt;
}

CICover instantiate(const FamilyInstance& inst) {
  validate_instance(inst);
  RingPresentation par = presentation(inst.fam);
  Ring rs = specialized_ring(inst.fam);
  std::map<std::string, Int> values = {
      {"q_", inst.q - 1}, {"s_", inst.s}, {"t_", inst.t}};
  /* s4 degenerates at s = t, s4' at s = 0; t != 0 rules out s = t = 0 */
  bool variant_s4 = inst.s != inst.t;
  CICover c;
  c.parent.ring = rs;
  c.parent.relations = specialize_all(par.ring, par.relations, values, rs);
  c.cover = specialize_all(par.ring, family_cover(inst.fam, variant_s4), values, rs);
  c.s_sequence =
      specialize_all(par.ring, family_s_sequence(inst.fam), values, rs);
  c.lambda = augmentation(inst);
  return c;
}

ExpectedInvariants expected_invariants(const FamilyInstance& inst) {
  validate_instance(inst);
  long n = monodromy_n(inst);
  Int p(inst.p);
  long vq = *valuation(Int(inst.q - 1), p);
  long vt = *valuation(inst.t, p);
  ExpectedInvariants e;
  switch (inst.fam) {
    case FamilyId::steinberg:
      e.ann_v = vq + vt;
      e.fitt_v = e.ann_v + n;
      e.c1 = n;
      e.d1 = 3 * n;
      e.delta = 2 * n;
      break;
    case FamilyId::unipotent:
      e.ann_v = vq;
      e.fitt_v = vq + n;
      e.c1 = n;
      e.d1 = 2 * n;
      e.delta = n;
      break;
    default: {
      /* with the s4 cover the annihilator is generated by (t - s) t; with
       * the s4' cover (used when s = t) it is generated by s t */
      Int prod = inst.s != inst.t ? Int((inst.t - inst.s) * inst.t)
                                  : Int(inst.s * inst.t);
      e.ann_v = *valuation(prod, p);
      e.fitt_v = e.ann_v + 3 * n;
      e.c1 = 3 * n;
      e.d1 = 5 * n;
      e.delta = 2 * n;
      e.regime_ok = e.ann_v >= 3 * n;
      break;
    }
  }
  return e;
}

ExpectedDefect expected_defect(const FamilyInstance& inst) {
  ExpectedInvariants e = expected_invariants(inst);
  return ExpectedDefect{e.delta, e.regime_ok};
}

std::vector<std::vector<IPoly>> alt_covers(const FamilyInstance& inst) {
  CICover base = instantiate(inst);
  const Ring& r = base.parent.ring;
  const std::vector<IPoly>& rr = base.parent.relations;
  std::vector<std::vector<IPoly>> candidates;
  switch (inst.fam) {
    case FamilyId::steinberg:
      candidates.push_back({poly_add(r, rr[0], rr[5]), rr[1], rr[2]});
      candidates.push_back({rr[0], poly_add(r, rr[1], rr[3]), rr[2]});
      break;
    case FamilyId::unipotent: {
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
          if (i == j) continue;
          std::vector<IPoly> c = base.cover;
          c[i] = poly_add(r, c[i], base.cover[j]);
          candidates.push_back(std::move(c));
        }
      break;
    }
    default: {
      if (inst.s != 0 && inst.s != inst.t) {
        /* the other s4 variant is admissible: offer it as an alternative */
        RingPresentation par = presentation(inst.fam);
        std::map<std::string, Int> values = {
            {"q_", inst.q - 1}, {"s_", inst.s}, {"t_", inst.t}};
        candidates.push_back(specialize_all(
            par.ring, family_cover(inst.fam, inst.s == inst.t), values, r));
      }
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
          if (i == j) continue;
          std::vector<IPoly> c = base.cover;
          c[i] = poly_add(r, c[i], base.cover[j]);
          candidates.push_back(std::move(c));
        }
      break;
    }
  }
  std::vector<std::vector<IPoly>> out;
  for (auto& c : candidates) {
    CICover alt = base;
    alt.cover = c;
    if (check_ci_cover(alt).ok) out.push_back(std::move(c));
    if (out.size() >= 2) break;
  }
  return out;
}

std::vector<std::vector<IPoly>> alt_s_sequences(const FamilyInstance& inst) {
  CICover base = instantiate(inst);
  const Ring& r = base.parent.ring;
  auto shifted = [&](const std::string& text, const Int& c) {
    return poly_add(r, parse_poly(r, text), ipoly_const(r, c));
  };
  std::vector<std::vector<IPoly>> candidates;
  switch (inst.fam) {
    case FamilyId::steinberg:
      candidates = {parse_all(r, {"ga - be", "c + b", "be + 2*b"}),
                    parse_all(r, {"ga - be", "c + 2*b", "be + b"})};
      break;
    case FamilyId::unipotent:
      candidates = {{shifted("b - be", inst.t - inst.s),
                     parse_poly(r, "a + X - ga"), shifted("b - 2*c", -inst.s)},
                    {shifted("b - be", inst.t - inst.s),
                     parse_poly(r, "a + 2*X - ga"), shifted("b - c", -inst.s)}};
      break;
    default:
      /* the ga - X + al variant additionally yields finite theta-models */
      candidates = {{shifted("b - c", -inst.s), shifted("be - c", -inst.t),
                     parse_poly(r, "ga - X + al")},
                    {shifted("b - c", -inst.s), shifted("be - 2*c", -inst.t),
                     parse_poly(r, "ga - X")},
                    {shifted("b - c", -inst.s), shifted("be - c", -inst.t),
                     parse_poly(r, "ga - 2*X")}};
      break;
  }
  std::vector<std::vector<IPoly>> out;
  for (auto& seq : candidates) {
    CICover alt = base;
    alt.s_sequence = seq;
    if (check_ci_cover(alt).ok) out.push_back(std::move(seq));
    if (out.size() >= 2) break;
  }
  return out;
}

}  // namespace defect
