/* Command-line front end: family computations, ring-file reports, Groebner
 * bases, and the regression suite. Exit codes: 0 pass, 1 check failure,
 * 2 input error, 3 budget exhausted. */

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "defect/verify.hpp"

using namespace defect;

namespace {

std::string fmt_oideal(const OIdeal& x) {
  return x.v ? std::to_string(*x.v) : "infinite";
}

void print_report_text(std::ostream& os, const DefectReport& rep) {
  os << "ann_valuation          " << fmt_oideal(rep.ann) << "\n";
  os << "fitt_valuation         " << fmt_oideal(rep.fitt) << "\n";
  os << "c1                     " << rep.c1 << "\n";
  os << "hom_I_length           " << rep.hom_I_length << "\n";
  os << "lattice_kernel_length  " << rep.lattice_kernel_length << "\n";
  os << "d1                     " << rep.d1 << "\n";
  os << "delta                  " << rep.delta << "\n";
  os << "prime                  " << rep.prime << "\n";
  os << "cover_size             " << rep.cover_size << "\n";
  os << "cover_rank             " << rep.cover_rank << "\n";
  os << "target_rank            " << rep.target_rank << "\n";
  os << "elementary_divisors   ";
  for (long v : rep.elementary_divisors) os << " " << v;
  os << "\n";
  if (!rep.note.empty()) os << "note                   " << rep.note << "\n";
}

std::vector<long> parse_primes(const std::string& text) {
  std::vector<long> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    long p = std::stol(tok, &pos);
    if (pos != tok.size() || p < 2)
      throw std::invalid_argument("bad prime list entry: " + tok);
    out.push_back(p);
  }
  if (out.empty()) throw std::invalid_argument("empty prime list");
  return out;
}

int cmd_family(const std::string& fam_name, long p, const std::string& q,
               const std::string& s, const std::string& t, bool json,
               long budget) {
  FamilyInstance inst{family_from_string(fam_name), p, Int(q), Int(s), Int(t)};
  validate_instance(inst);
  BudgetGuard guard(budget > 0 ? budget : detail::default_budget());
  CICover c = instantiate(inst);
  CoverReport cr = check_ci_cover(c);
  if (!cr.ok) throw std::invalid_argument("cover not admissible: " + cr.note);
  DefectReport rep = wiles_defect(c);
  ExpectedInvariants e = expected_invariants(inst);
  bool closed_form_match =
      !e.regime_ok ||
      (rep.ann == OIdeal{e.ann_v} && rep.fitt == OIdeal{e.fitt_v} &&
       rep.c1 == e.c1 && rep.d1 == e.d1 && rep.delta == e.delta);
  if (json) {
    nlohmann::ordered_json j;
    j["command"] = "family";
    j["family"] = family_name(inst.fam);
    j["p"] = inst.p;
    j["q"] = inst.q.get_str();
    j["s"] = inst.s.get_str();
    j["t"] = inst.t.get_str();
    j["monodromy_n"] = monodromy_n(inst);
    j["report"] = nlohmann::ordered_json::parse(report_to_json(rep));
    j["closed_form_regime"] = e.regime_ok;
    j["closed_form_match"] = closed_form_match;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "family                 " << family_name(inst.fam) << "\n";
    std::cout << "monodromy_n            " << monodromy_n(inst) << "\n";
    print_report_text(std::cout, rep);
    std::cout << "closed_form_regime     " << (e.regime_ok ? "yes" : "no")
              << "\n";
    std::cout << "closed_form_match      " << (closed_form_match ? "yes" : "no")
              << "\n";
  }
  return closed_form_match ? 0 : 1;
}

int cmd_ring(const std::string& path, const std::vector<std::size_t>& cover_idx,
             bool json, long budget) {
  RingFile rf = load_ring_file(path);
  BudgetGuard guard(budget > 0 ? budget : detail::default_budget());
  std::vector<CICover> covers;
  if (!cover_idx.empty()) {
    CoverSpec spec;
    spec.indices = cover_idx;
    for (std::size_t i : cover_idx)
      if (i == 0 || i > rf.relations.size())
        throw std::invalid_argument("--cover index out of range");
    covers.push_back(build_cover(rf, spec));
  } else if (!rf.covers.empty()) {
    for (std::size_t k = 0; k < rf.covers.size(); ++k)
      covers.push_back(build_cover(rf, k));
  } else {
    CICover c = build_cover(rf, CoverSpec{});
    auto found = find_ci_cover(c.parent, c.s_sequence, c.lambda);
    if (!found)
      throw std::invalid_argument("no admissible CI cover found for " + path);
    c.cover = *found;
    covers.push_back(std::move(c));
  }
  std::vector<DefectReport> reps;
  for (const auto& c : covers) {
    CoverReport cr = check_ci_cover(c);
    if (!cr.ok)
      throw std::invalid_argument("cover not admissible: " + cr.note);
    reps.push_back(wiles_defect(c));
  }
  bool agree = true;
  for (std::size_t k = 1; k < reps.size(); ++k)
    agree = agree && reps[k].ann == reps[0].ann &&
            reps[k].c1 == reps[0].c1 && reps[k].d1 == reps[0].d1 &&
            reps[k].delta == reps[0].delta;
  if (json) {
    nlohmann::ordered_json j;
    j["command"] = "ring";
    j["file"] = path;
    j["reports"] = nlohmann::ordered_json::array();
    for (const auto& rep : reps)
      j["reports"].push_back(nlohmann::ordered_json::parse(report_to_json(rep)));
    j["covers_agree"] = agree;
    std::cout << j.dump(2) << "\n";
  } else {
    for (std::size_t k = 0; k < reps.size(); ++k) {
      if (reps.size() > 1) std::cout << "cover " << k + 1 << "\n";
      print_report_text(std::cout, reps[k]);
    }
    if (reps.size() > 1)
      std::cout << "covers_agree           " << (agree ? "yes" : "no") << "\n";
  }
  return agree ? 0 : 1;
}

int cmd_gb(const std::string& path, const std::string& order) {
  RingFile rf = load_ring_file(path);
  OrderKind kind;
  if (order == "lex")
    kind = OrderKind::lex;
  else if (order == "grevlex")
    kind = OrderKind::grevlex;
  else
    throw std::invalid_argument("unknown order: " + order);
  Ring r = make_ring(rf.vars, rf.params, kind);
  std::vector<QPoly> gens;
  for (const auto& text : rf.relations)
    gens.push_back(to_rational(r, parse_poly(r, text)));
  std::vector<QPoly> gb = buchberger(r, gens);
  for (const auto& f : gb) std::cout << to_string(r, f) << "\n";
  return 0;
}

int cmd_verify(const VerifyOptions& opt, bool json) {
  VerifySuite suite = verify_paper(opt);
  if (json)
    std::cout << suite_to_json(suite);
  else
    std::cout << suite_to_text(suite);
  return suite.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wiles defect calculator for augmented local rings"};
  app.require_subcommand(1);

  std::string fam_name, q_text, s_text, t_text;
  long p_val = 0, budget = 0;
  bool json = false;
  std::string primes_text;

  CLI::App* fam = app.add_subcommand("family", "closed-form family instance");
  fam->add_option("family", fam_name, "st, un or phi-uni")->required();
  fam->add_option("--p", p_val, "odd prime p")->required();
  fam->add_option("--q", q_text, "q with q = 1 mod p")->required();
  fam->add_option("--s", s_text, "augmentation value s")->required();
  fam->add_option("--t", t_text, "augmentation value t (nonzero)")->required();
  fam->add_flag("--json", json, "machine-readable report");
  fam->add_option("--primes", primes_text, "accepted for interface parity");
  fam->add_option("--budget", budget, "reduction-step budget");

  std::string ring_path;
  std::vector<std::size_t> cover_idx;
  CLI::App* ring = app.add_subcommand("ring", "defect report for a ring file");
  ring->add_option("file", ring_path, "ring file")->required();
  ring->add_option("--cover", cover_idx, "1-based relation indices");
  ring->add_flag("--json", json, "machine-readable report");
  ring->add_option("--budget", budget, "reduction-step budget");

  std::string gb_path, order = "grevlex";
  CLI::App* gb = app.add_subcommand("gb", "reduced Groebner basis over Q");
  gb->add_option("file", gb_path, "ring file")->required();
  gb->add_option("--order", order, "lex or grevlex")->required();

  CLI::App* verify = app.add_subcommand("verify", "regression suites");
  CLI::App* paper = verify->add_subcommand("paper", "the full regression suite");
  verify->require_subcommand(1);
  int jobs = 1;
  paper->add_option("--primes", primes_text, "comma-separated fiber primes");
  paper->add_option("--jobs", jobs, "concurrent checks");
  paper->add_option("--budget", budget, "per-check reduction-step budget");
  paper->add_flag("--json", json, "machine-readable report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*fam) return cmd_family(fam_name, p_val, q_text, s_text, t_text, json,
                                budget);
    if (*ring) return cmd_ring(ring_path, cover_idx, json, budget);
    if (*gb) return cmd_gb(gb_path, order);
    if (*paper) {
      VerifyOptions opt;
      if (!primes_text.empty()) opt.primes = parse_primes(primes_text);
      opt.jobs = jobs;
      opt.budget = budget;
      return cmd_verify(opt, json);
    }
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const RingFileError& e) {
    std::cerr << "error: line " << e.line << ": " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: parse error at column " << e.pos << ": " << e.what()
              << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
