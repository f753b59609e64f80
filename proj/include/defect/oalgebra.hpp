#pragma once

/* Finite flat O-algebras given by explicit structure constants: the cotangent
 * length Phi, the congruence-module length Psi, the torsion-free invariant
 * c0, tensor products, the Koszul-homology route to c1, and the Gorenstein
 * duality route to lambda(Ann). Entries are p-integral rationals; all lattice
 * computations happen after clearing prime-to-p denominators (unit scalings,
 * invisible to p-local lengths). */

#include "defect/idealkit.hpp"

namespace defect {

struct FiniteOAlgebra {
  std::size_t n = 0;
  std::vector<RatMatrix> mult;  /* mult[i] column j = coordinates of b_i b_j */
  std::vector<Rat> lambda;      /* augmentation values lambda(b_i) */
  std::vector<Rat> unit;        /* coordinates of 1 */
  DvrContext ctx;
  /* optional rows of p-power-torsion relations: the module is O^n / <rows> */
  std::optional<IntMatrix> torsion;
};

/* multiplication of coordinate vectors */
std::vector<Rat> alg_mul(const FiniteOAlgebra& b, const std::vector<Rat>& u,
                         const std::vector<Rat>& v);
/* matrix of multiplication by u */
RatMatrix op_matrix(const FiniteOAlgebra& b, const std::vector<Rat>& u);
Rat alg_lambda(const FiniteOAlgebra& b, const std::vector<Rat>& u);

/* checks commutativity, associativity, unit laws, lambda multiplicativity,
 * p-integrality of all entries, and that torsion rows are killed by lambda;
 * throws std::invalid_argument with a description on failure */
void validate(const FiniteOAlgebra& b);

/* clear denominators of v (must be prime to p) by the lcm: a unit scaling */
std::vector<Int> clear_prime_to_p(const std::vector<Rat>& v, const Int& p);

/* saturated kernel lattice of lambda (rows) */
IntMatrix kernel_lattice(const FiniteOAlgebra& b);

/* l(ker lambda / (ker lambda)^2); nullopt if infinite */
std::optional<long> phi_length(const FiniteOAlgebra& b);

/* quotient by the saturation of the torsion rows (identity if torsion-free) */
FiniteOAlgebra torsion_free_quotient(const FiniteOAlgebra& b);

/* l(O / lambda(Ann(ker lambda))) on the torsion-free quotient; nullopt if
 * lambda kills the whole annihilator */
std::optional<long> psi_length(const FiniteOAlgebra& b);

/* psi of the torsion-free quotient (identical to psi_length by construction,
 * kept as the named invariant) */
std::optional<long> c0(const FiniteOAlgebra& b);

/* tensor product over O of torsion-free algebras */
FiniteOAlgebra tensor_product(const FiniteOAlgebra& a, const FiniteOAlgebra& b);

/* Koszul-homology route: A a complete-intersection model, xs coordinates of
 * ideal generators (|xs| <= 3); returns l(lambda(Ann)/lambda(Fitt)) where
 * Ann = H_d(K_A(x)) and Fitt = products of H_1 classes */
std::optional<long> koszul_c1_oracle(const FiniteOAlgebra& a,
                                     const std::vector<std::vector<Rat>>& xs);

struct DualityResult {
  Rat det_c;
  Rat value;                  /* lambda of the annihilator generator */
  std::optional<long> valuation;
  bool det_is_unit = false;
};

/* Gorenstein duality route on a cover model: basis arranged with
 * basis[socle_idx] reducing to a socle generator of B/(p) and
 * basis[target_idx] to a socle generator of the target quotient; solves
 * mu C = e_target for C = (c_{ij,socle_idx}) and returns lambda(sum mu_i b_i) */
DualityResult duality_ann_oracle(const FiniteOAlgebra& b, std::size_t socle_idx,
                                 std::size_t target_idx);

/* Build a FiniteOAlgebra from an Artinian quotient: Groebner basis over Q,
 * standard-monomial basis, structure constants from normal forms, certified
 * against the F_p fiber (equal staircases and reduction-compatible
 * constants). pt must assign every ring symbol. */
FiniteOAlgebra algebra_from_artinian(const Ring& r,
                                     const std::vector<IPoly>& relations,
                                     const AugmentationPoint& pt);

/* coordinates of a polynomial in the algebra built by algebra_from_artinian */
struct ArtinianModel {
  Ring ring;
  std::vector<QPoly> gb;
  std::vector<Monomial> basis;
  /* monomial basis of the Q-quotient (normal-form target of gb) together
   * with the change of basis: coords in basis = (coords in qbasis) * to_basis */
  std::vector<Monomial> qbasis;
  RatMatrix to_basis;
  FiniteOAlgebra algebra;
};

ArtinianModel artinian_model(const Ring& r, const std::vector<IPoly>& relations,
                             const AugmentationPoint& pt);

std::vector<Rat> model_coords(const ArtinianModel& m, const IPoly& f);

}  // namespace defect
