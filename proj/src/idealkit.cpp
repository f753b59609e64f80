#include "defect/idealkit.hpp"

#include <bit>

namespace defect {

long staircase_dimension(std::size_t nsym, const std::vector<Monomial>& lts,
                         std::vector<std::size_t>* witness) {
  if (nsym > 24) throw std::invalid_argument("staircase_dimension: too many symbols");
  std::vector<unsigned> supports;
  supports.reserve(lts.size());
  for (const auto& m : lts) {
    unsigned s = 0;
    for (std::size_t i = 0; i < nsym; ++i)
      if (m.e[i] > 0) s |= 1u << i;
    supports.push_back(s);
  }
  long best = -1;
  unsigned best_mask = 0;
  for (unsigned mask = 0; mask < (1u << nsym); ++mask) {
    bool ok = true;
    for (unsigned s : supports)
      if ((s & ~mask) == 0) {  /* leading monomial supported inside mask */
        ok = false;
        break;
      }
    if (!ok) continue;
    long size = static_cast<long>(std::popcount(mask));
    if (size > best) {
      best = size;
      best_mask = mask;
    }
  }
  if (witness) {
    witness->clear();
    for (std::size_t i = 0; i < nsym; ++i)
      if (best_mask & (1u << i)) witness->push_back(i);
  }
  return best;
}

std::vector<QPoly> to_rational(const Ring& r, const std::vector<IPoly>& v) {
  std::vector<QPoly> out;
  out.reserve(v.size());
  for (const auto& f : v) out.push_back(to_rational(r, f));
  return out;
}

std::vector<FPoly> to_fp(const Ring& r, const std::vector<IPoly>& v, long p) {
  std::vector<FPoly> out;
  out.reserve(v.size());
  for (const auto& f : v) out.push_back(to_fp(r, f, p));
  return out;
}

namespace {

/* integer constant polynomial divisible by p but nonzero: the uniformizer */
bool is_uniformizer(const IPoly& f, long p) {
  return f.t.size() == 1 && f.t[0].first.is_one() && f.t[0].second % p == 0;
}

}  // namespace

RegSeqReport is_regular_sequence(const Ring& r,
                                 const std::vector<IPoly>& relations,
                                 const std::vector<IPoly>& seq, long p) {
  RegSeqReport rep;

  /* Q side: stop at the uniformizer (a unit over Q, but a regular element on
   * the p-torsion-free base) */
  {
    std::vector<QPoly> gens = to_rational(r, relations);
    long dim = staircase(r, buchberger(r, gens)).dimension;
    rep.regular_q = true;
    for (std::size_t k = 0; k < seq.size(); ++k) {
      if (is_uniformizer(seq[k], p)) {
        rep.uniformizer_at = k;
        break;
      }
      gens.push_back(to_rational(r, seq[k]));
      long next = staircase(r, buchberger(r, gens)).dimension;
      rep.dims_q.push_back(next);
      if (next != dim - 1) rep.regular_q = false;
      dim = next;
    }
  }

  /* F_p side: the fiber already lives mod p, so the uniformizer step is the
   * passage to the fiber itself and must not change the staircase */
  {
    std::vector<FPoly> gens = to_fp(r, relations, p);
    auto gb = buchberger(r, gens);
    long dim = staircase(r, gb).dimension;
    rep.regular_fp = true;
    for (std::size_t k = 0; k < seq.size(); ++k) {
      if (is_uniformizer(seq[k], p)) {
        rep.dims_fp.push_back(dim);
        continue;
      }
      gens.push_back(to_fp(r, seq[k], p));
      gb = buchberger(r, gens);
      long next = staircase(r, gb).dimension;
      rep.dims_fp.push_back(next);
      if (next != dim - 1) rep.regular_fp = false;
      dim = next;
    }
    rep.final_fp = staircase(r, gb);
  }
  return rep;
}

FreenessReport verify_free_over_subring(const Ring& r,
                                        const std::vector<IPoly>& relations,
                                        const std::vector<IPoly>& images,
                                        long expected_rank,
                                        const std::vector<long>& primes) {
  FreenessReport rep;
  rep.expected = expected_rank;
  std::vector<IPoly> gens = relations;
  gens.insert(gens.end(), images.begin(), images.end());

  StaircaseResult sq = staircase(r, buchberger(r, to_rational(r, gens)));
  if (!sq.finite) {
    rep.note = "quotient by subring images is not Artinian over Q";
    return rep;
  }
  rep.artinian = true;
  rep.basis_q = sq.basis;
  FiberRank fq;
  fq.prime = 0;
  fq.rank = static_cast<long>(sq.basis.size());
  rep.fibers.push_back(fq);

  bool all_ok = fq.rank == expected_rank;
  for (long p : primes) {
    StaircaseResult sp = staircase(r, buchberger(r, to_fp(r, gens, p)));
    FiberRank fr;
    fr.prime = p;
    if (!sp.finite) {
      fr.rank = -1;
      fr.basis_matches_q = false;
      rep.note = "fiber at p=" + std::to_string(p) + " is not Artinian";
      all_ok = false;
    } else {
      fr.rank = static_cast<long>(sp.basis.size());
      fr.basis_matches_q = sp.basis == sq.basis;
      if (fr.rank != expected_rank || !fr.basis_matches_q) all_ok = false;
    }
    rep.fibers.push_back(fr);
  }
  rep.ok = all_ok;
  return rep;
}

bool ideal_equal_fibers(const Ring& r, const std::vector<IPoly>& a,
                        const std::vector<IPoly>& b,
                        const std::vector<long>& primes) {
  if (!ideal_equal(r, to_rational(r, a), to_rational(r, b))) return false;
  for (long p : primes)
    if (!ideal_equal(r, to_fp(r, a, p), to_fp(r, b, p))) return false;
  return true;
}

}  // namespace defect
