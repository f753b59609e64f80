#include "defect/ringfile.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace defect {

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

bool all_indices(const std::vector<std::string>& toks) {
  for (const auto& t : toks)
    for (char c : t)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return !toks.empty();
}

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_keyword(const std::string& w) {
  return w == "vars" || w == "params" || w == "relations" || w == "cover" ||
         w == "augmentation" || w == "s_sequence" || w == "prime";
}

}  // namespace

RingFile parse_ring_file(std::istream& in) {
  RingFile rf;
  std::string section;
  std::string raw;
  std::size_t ln = 0;
  bool saw_vars = false, saw_prime = false;
  while (std::getline(in, raw)) {
    ++ln;
    std::string line = raw;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;
    std::vector<std::string> toks = split_ws(line);
    const std::string& head = toks[0];
    if (is_keyword(head)) {
      std::vector<std::string> rest(toks.begin() + 1, toks.end());
      if (head == "vars") {
        if (saw_vars) throw RingFileError("duplicate vars section", ln);
        if (rest.empty()) throw RingFileError("vars needs at least one name", ln);
        rf.vars = rest;
        saw_vars = true;
        section = "";
      } else if (head == "params") {
        rf.params = rest;
        section = "";
      } else if (head == "prime") {
        if (rest.size() != 1)
          throw RingFileError("prime takes exactly one integer", ln);
        try {
          rf.prime = Int(rest[0]);
        } catch (const std::invalid_argument&) {
          throw RingFileError("prime is not an integer", ln);
        }
        if (rf.prime <= 1) throw RingFileError("prime must exceed 1", ln);
        saw_prime = true;
        section = "";
      } else if (head == "cover") {
        CoverSpec spec;
        if (!rest.empty()) {
          if (!all_indices(rest))
            throw RingFileError(
                "cover takes 1-based relation indices on the keyword line "
                "(use a block for expressions)",
                ln);
          for (const auto& t : rest)
            spec.indices.push_back(static_cast<std::size_t>(std::stoul(t)));
          rf.covers.push_back(std::move(spec));
          section = "";
        } else {
          rf.covers.push_back(std::move(spec));
          section = "cover";
        }
      } else {
        section = head; /* relations / augmentation / s_sequence blocks */
      }
      continue;
    }
    if (section == "relations") {
      rf.relations.push_back(line);
    } else if (section == "cover") {
      rf.covers.back().exprs.push_back(line);
    } else if (section == "s_sequence") {
      rf.s_sequence.push_back(line);
    } else if (section == "augmentation") {
      std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw RingFileError("augmentation lines read `symbol = integer`", ln);
      std::string sym = strip(line.substr(0, eq));
      std::string val = strip(line.substr(eq + 1));
      if (sym.empty() || val.empty())
        throw RingFileError("augmentation lines read `symbol = integer`", ln);
      try {
        rf.augmentation.emplace_back(sym, Int(val));
      } catch (const std::invalid_argument&) {
        throw RingFileError("augmentation value is not an integer", ln);
      }
    } else {
      throw RingFileError("content outside any section: " + line, ln);
    }
  }
  if (!saw_vars) throw RingFileError("missing vars section", ln);
  if (!saw_prime) throw RingFileError("missing prime", ln);
  if (rf.relations.empty()) throw RingFileError("missing relations", ln);
  for (const auto& c : rf.covers)
    for (std::size_t i : c.indices)
      if (i == 0 || i > rf.relations.size())
        throw RingFileError("cover index out of range", ln);
  /* all referenced augmentation symbols must be declared */
  for (const auto& [sym, val] : rf.augmentation) {
    bool found = false;
    for (const auto& v : rf.vars) found = found || v == sym;
    for (const auto& v : rf.params) found = found || v == sym;
    if (!found)
      throw RingFileError("augmentation symbol not declared: " + sym, ln);
  }
  return rf;
}

RingFile parse_ring_file_text(const std::string& text) {
  std::istringstream is(text);
  return parse_ring_file(is);
}

RingFile load_ring_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RingFileError("cannot open " + path, 0);
  return parse_ring_file(in);
}

Ring ring_of(const RingFile& rf) { return make_ring(rf.vars, rf.params); }

CICover build_cover(const RingFile& rf, const CoverSpec& spec) {
  if (!rf.params.empty())
    throw RingFileError(
        "defect computation needs a fully specialized ring (no params)", 0);
  Ring r = ring_of(rf);
  auto parse_at = [&](const std::string& text) {
    try {
      return parse_poly(r, text);
    } catch (const ParseError& e) {
      throw RingFileError(std::string("parse error at column ") +
                              std::to_string(e.pos) + " in `" + text +
                              "`: " + e.what(),
                          0);
    }
  };
  CICover c;
  c.parent.ring = r;
  for (const auto& s : rf.relations) c.parent.relations.push_back(parse_at(s));
  for (std::size_t i : spec.indices)
    c.cover.push_back(c.parent.relations[i - 1]);
  for (const auto& s : spec.exprs) c.cover.push_back(parse_at(s));
  for (const auto& s : rf.s_sequence) c.s_sequence.push_back(parse_at(s));
  for (const auto& v : rf.vars) c.lambda.assign[v] = 0;
  for (const auto& [sym, val] : rf.augmentation) c.lambda.assign[sym] = val;
  c.lambda.ctx = DvrContext{rf.prime};
  return c;
}

CICover build_cover(const RingFile& rf, std::size_t cover_idx) {
  if (rf.covers.empty()) {
    /* no declared cover: the caller is expected to search; return with the
     * cover empty */
    return build_cover(rf, CoverSpec{});
  }
  if (cover_idx >= rf.covers.size())
    throw RingFileError("cover index out of range", 0);
  return build_cover(rf, rf.covers[cover_idx]);
}

}  // namespace defect
