#pragma once

/* The three explicit parametric presentations (Steinberg, unipotent,
 * phi-unipotent): relation lists over Z[q_] with s_, t_ available as extra
 * parameters, their CI covers, S-sequences, augmentations, and closed-form
 * expected invariants. */

#include "defect/defectcore.hpp"

namespace defect {

enum class FamilyId { steinberg, unipotent, phi_unipotent };

FamilyId family_from_string(const std::string& s);  /* st, un, phi-uni */
std::string family_name(FamilyId fam);

struct FamilyInstance {
  FamilyId fam;
  long p = 0;
  Int q, s, t;
};

/* n = v_p(gcd(s, t, q-1)) */
long monodromy_n(const FamilyInstance& inst);

/* throws std::invalid_argument on regime violations: p not an odd prime,
 * q != 1 mod p, p does not divide s or t, or t = 0 */
void validate_instance(const FamilyInstance& inst);

/* parametric ring (vars + params q_, s_, t_) and the exact relation list */
RingPresentation presentation(FamilyId fam);

/* parametric cover; phi_variant_s4 selects s4 (admissible when t != s) over
 * s4' (admissible when s != 0); ignored for the other families */
std::vector<IPoly> family_cover(FamilyId fam, bool phi_variant_s4 = true);

/* the three-element S-sequence (parametric; lands in ker lambda) */
std::vector<IPoly> family_s_sequence(FamilyId fam);

/* param-free ring with the same variables */
Ring specialized_ring(FamilyId fam);

AugmentationPoint augmentation(const FamilyInstance& inst);

/* fully specialized CICover with the variant selected for phi-uni */
CICover instantiate(const FamilyInstance& inst);

struct ExpectedInvariants {
  long ann_v = 0;
  long fitt_v = 0;
  long c1 = 0;
  long d1 = 0;
  long delta = 0;
  /* phi-uni closed forms assume v((t-s)t) >= 3n (resp. v(st) >= 3n when
   * s = t); false means the closed forms are not asserted for this tuple */
  bool regime_ok = true;
};

ExpectedInvariants expected_invariants(const FamilyInstance& inst);

/* delta closed form (2n, n, 2n) with the phi-uni regime flag */
struct ExpectedDefect {
  long delta = 0;
  bool regime_ok = true;
};

ExpectedDefect expected_defect(const FamilyInstance& inst);

/* specialized alternative covers / S-sequences for invariance testing
 * (only combinations that pass check_ci_cover are returned) */
std::vector<std::vector<IPoly>> alt_covers(const FamilyInstance& inst);
std::vector<std::vector<IPoly>> alt_s_sequences(const FamilyInstance& inst);

}  // namespace defect
