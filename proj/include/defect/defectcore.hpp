#pragma once

/* The invariant pipeline: CI-cover validation, c1 = v(lambda(Fitt)) -
 * v(lambda(Ann)), D1 = Fitting length minus Jacobian-lattice index, and the
 * Wiles defect delta = D1 - c1. All module-level invariants are computed by
 * exact O-linear algebra on certified finite flat dimension-one models
 * (quotients by the S-sequence shifted into ker lambda), where annihilators,
 * ideal kernels, syzygies and Fitting base changes are honest lattice
 * computations. */

#include "defect/oalgebra.hpp"

namespace defect {

struct CICover {
  RingPresentation parent;        /* R = P/J, param-free ring */
  std::vector<IPoly> cover;       /* s_1..s_m with R~ = P/(s) */
  std::vector<IPoly> s_sequence;  /* y_i; theta relations are y_i - lambda(y_i) */
  AugmentationPoint lambda;       /* assigns every ring symbol */
};

struct CoverReport {
  bool membership_q = false;   /* cover subseteq J over Q */
  bool membership_fp = false;  /* and over the F_p fiber */
  RegSeqReport regseq;         /* (cover, theta, p) regularity */
  OIdeal minor_ideal;          /* top Jacobian minors of the cover at lambda */
  bool ok = false;
  std::string note;
};

CoverReport check_ci_cover(const CICover& c);

/* the two dimension-one models and the kernel lattice of R~_theta -> R_theta */
struct DimensionOneModels {
  ArtinianModel cover_model;
  ArtinianModel full_model;
  IntMatrix kernel;  /* rows: O-basis of I_theta in cover-model coordinates */
};

DimensionOneModels build_models(const CICover& c);

OIdeal lambda_ann(const CICover& c);
OIdeal lambda_fitt(const CICover& c);
long c1(const CICover& c);

struct D1Result {
  long hom_I_length = 0;
  long lattice_kernel_length = 0;
  long d1 = 0;
  /* valuations of the nonzero elementary divisors of the specialized
   * presentation matrix of I tensor_lambda O */
  std::vector<long> elementary_divisors;
};

D1Result d1(const CICover& c);

struct DefectReport {
  OIdeal ann;   /* lambda(Ann(I)) */
  OIdeal fitt;  /* lambda(Fitt_0(I)) */
  long c1 = 0;
  long hom_I_length = 0;
  long lattice_kernel_length = 0;
  long d1 = 0;
  long delta = 0;  /* = (D1 - c1)/e with e = 1 */
  std::vector<long> elementary_divisors;
  /* provenance */
  long prime = 0;
  std::size_t cover_size = 0;
  std::size_t cover_rank = 0;   /* O-rank of R~_theta */
  std::size_t target_rank = 0;  /* O-rank of R_theta */
  std::string note;
};

DefectReport wiles_defect(const CICover& c);
std::string report_to_json(const DefectReport& r);

/* greedy cover search: relations whose Jacobian rows at lambda extend a
 * maximal-rank set, validated by regularity; random integer recombinations up
 * to a retry budget on failure */
std::optional<std::vector<IPoly>> find_ci_cover(const RingPresentation& parent,
                                                const std::vector<IPoly>& s_sequence,
                                                const AugmentationPoint& lambda,
                                                int retries = 16);

/* Gorenstein duality cross-check: rebuilds the cover model on a basis adapted
 * to the kernel lattice and the mod-p socles (target lifts first, kernel
 * lattice last, with the final kernel element reducing to the cover-fiber
 * socle), then runs duality_ann_oracle. Throws std::invalid_argument when no
 * adapted basis exists, e.g. when a socle is not one-dimensional. */
DualityResult duality_ann_via_adapted_basis(const DimensionOneModels& models);

struct IdentityCheck {
  std::string name;
  bool applicable = false;
  bool pass = false;
  std::string detail;
};

struct IdentityReport {
  std::vector<IdentityCheck> checks;
  bool all_pass = false;
};

/* (a) Phi - Psi = D1 - c1 on the dimension-one model; (b) invariance across
 * alternative covers; (c) invariance across alternative S-sequences;
 * (d) additivity of Phi and Psi under tensor squares; (e) delta = 0 when the
 * full relation list is itself an admissible cover */
IdentityReport verify_identities(const CICover& main,
                                 const std::vector<std::vector<IPoly>>& alt_covers,
                                 const std::vector<std::vector<IPoly>>& alt_s_sequences);

}  // namespace defect
