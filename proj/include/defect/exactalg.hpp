#pragma once

/* Exact arithmetic foundation: arbitrary-precision integers and rationals,
 * prime fields, p-adic valuations, integer-matrix Smith normal form, minors,
 * and finite-index lattice quotients over the DVR model O = Z localized at a
 * prime p (ramification index e = 1, lengths = p-adic valuations). */

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace defect {

using Int = mpz_class;
using Rat = mpq_class;

/* p-adic valuation; std::nullopt for x == 0. */
std::optional<long> valuation(const Int& x, const Int& p);
std::optional<long> valuation(const Rat& x, const Int& p);

struct DvrContext {
  Int p;  /* odd prime; e is fixed to 1 */
};

/* The ideal (p^v) of O; v absent means the zero ideal. */
struct OIdeal {
  std::optional<long> v;

  bool is_zero() const { return !v.has_value(); }
  bool operator==(const OIdeal&) const = default;
};

OIdeal oideal_of(const Int& gen, const DvrContext& ctx);
/* Ideal generated by several elements: minimum valuation. */
OIdeal oideal_of(const std::vector<Int>& gens, const DvrContext& ctx);

/* Residue field element; the modulus travels with the value so that mixed
 * arithmetic can be checked. */
struct FpElem {
  long v = 0;  /* in [0, p) */
  long p = 0;

  FpElem() = default;
  FpElem(long value, long prime);
  FpElem(const Int& value, long prime);

  bool is_zero() const { return v == 0; }
  bool operator==(const FpElem&) const = default;
};

FpElem operator+(const FpElem& a, const FpElem& b);
FpElem operator-(const FpElem& a, const FpElem& b);
FpElem operator*(const FpElem& a, const FpElem& b);
FpElem operator-(const FpElem& a);
FpElem inverse(const FpElem& a);

/* Small dense matrix. */
template <class T>
struct Mat {
  std::size_t rows = 0, cols = 0;
  std::vector<T> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

  T& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const T& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  bool operator==(const Mat&) const = default;
};

using IntMatrix = Mat<Int>;
using RatMatrix = Mat<Rat>;

IntMatrix identity_matrix(std::size_t n);
IntMatrix mat_mul(const IntMatrix& x, const IntMatrix& y);
IntMatrix mat_transpose(const IntMatrix& m);

/* inverse of a unimodular integer matrix (throws if det is not a unit) */
IntMatrix unimodular_inverse(const IntMatrix& m);

/* Exact determinant (fraction-free Bareiss elimination). */
Int det(IntMatrix m);

/* gcd over all i x i minors; 0 if all vanish. Throws on i out of range. */
Int gcd_of_minors(const IntMatrix& m, std::size_t i);

struct SnfResult {
  std::vector<Int> diag;  /* d1 | d2 | ..., nonnegative */
  IntMatrix u, v;         /* unimodular; u * m * v = diag */
};

SnfResult smith_normal_form(const IntMatrix& m);

/* O-sublattice of O^n given by spanning rows (not necessarily a basis). */
struct Lattice {
  IntMatrix span;  /* rows span the lattice; span.cols = ambient dim */
};

/* Row basis of the row space: nonzero rows of a Hermite-style echelon form. */
IntMatrix row_basis(const IntMatrix& m);
std::size_t lattice_rank(const Lattice& l);

struct LatticeError : std::runtime_error {
  std::vector<Int> witness;  /* offending vector, if any */
  explicit LatticeError(const std::string& what, std::vector<Int> w = {})
      : std::runtime_error(what), witness(std::move(w)) {}
};

/* length of big/small localized at ctx.p; requires small subseteq big after
 * saturating denominators at p, and equal ranks. Throws LatticeError with a
 * witness row on containment failure. */
long lattice_quotient_length(const Lattice& big, const Lattice& small,
                             const DvrContext& ctx);

/* Solve x * m = rhs over Q (m given by rows); nullopt if inconsistent. */
std::optional<std::vector<Rat>> solve_left(const IntMatrix& m,
                                           const std::vector<Int>& rhs);

/* Basis of the integer kernel lattice {x in Z^rows : x * m = 0} (saturated). */
IntMatrix left_kernel(const IntMatrix& m);

}  // namespace defect
