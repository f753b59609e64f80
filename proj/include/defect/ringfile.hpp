#pragma once

/* Line-oriented plain-text ring files: variable declarations, relations,
 * optional covers (by 1-based relation indices or explicit expressions), an
 * augmentation, the prime, and an optional S-sequence. Hand-authorable,
 * diff-friendly fixtures for the CLI. */

#include <istream>

#include "defect/defectcore.hpp"

namespace defect {

struct RingFileError : std::runtime_error {
  std::size_t line;  /* 1-based */
  RingFileError(const std::string& what, std::size_t at)
      : std::runtime_error(what), line(at) {}
};

struct CoverSpec {
  std::vector<std::size_t> indices;  /* 1-based into relations; or */
  std::vector<std::string> exprs;    /* explicit expression block */
};

struct RingFile {
  std::vector<std::string> vars;
  std::vector<std::string> params;
  std::vector<std::string> relations;
  std::vector<CoverSpec> covers;
  std::vector<std::string> s_sequence;
  std::vector<std::pair<std::string, Int>> augmentation;
  Int prime = 0;
};

/* throws RingFileError with the offending line number */
RingFile parse_ring_file(std::istream& in);
RingFile parse_ring_file_text(const std::string& text);
RingFile load_ring_file(const std::string& path);

Ring ring_of(const RingFile& rf);

/* specialized cover for the given declared cover (or an explicit index list
 * overriding the file); throws RingFileError on inconsistencies */
CICover build_cover(const RingFile& rf, const CoverSpec& spec);
CICover build_cover(const RingFile& rf, std::size_t cover_idx = 0);

}  // namespace defect
