#pragma once

/* The regression suite behind `defect verify paper`: family closed forms,
 * generator-set identities, fiber ranks and socles, symbolic Jacobian-minor
 * ideals, determinantal divisors, property checks (Phi - Psi, invariance,
 * additivity, delta = 0 iff CI), cross-route oracles, and engine-level
 * properties. Checks are pure and may run concurrently; the assembled report
 * is ordered by check name. */

#include "defect/families.hpp"
#include "defect/ringfile.hpp"

namespace defect {

struct VerifyOptions {
  std::vector<long> primes = {3, 5, 7, 11, 13};
  int jobs = 1;
  long budget = 0;  /* 0: DEFECT_BUDGET or the built-in default */
};

struct VerifyCheck {
  std::string name;
  bool pass = false;
  bool skipped = false;  /* budget exhausted; distinct from failure */
  std::string detail;
};

struct VerifySuite {
  std::vector<VerifyCheck> checks;
  bool all_pass = false;  /* no failures (skips allowed) */
};

VerifySuite verify_paper(const VerifyOptions& opt = {});

std::string suite_to_text(const VerifySuite& s);
std::string suite_to_json(const VerifySuite& s);

}  // namespace defect
