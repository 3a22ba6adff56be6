#ifndef MSGW_IO_HPP
#define MSGW_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "msgw/core.hpp"
#include "msgw/games.hpp"

namespace msgw {

/// Structure file, versioned key:value text:
///   msgw-structure v1
///   name: LO(3)
///   size: 3
///   relation </2: (0,1) (0,2) (1,2)
///   constant c: 0
/// Lines starting with '#' are comments.
StructurePtr read_structure(std::istream& in, const std::string& what);
StructurePtr read_structure_file(const std::string& path);
std::string write_structure(const Structure& s);

/// A structure argument: "LO:n", "RT:[-,0,0,1,2]" (parent list, '-' marks the
/// root), or a file path. An optional "*N" suffix sets a multiplicity.
Weighted parse_structure_spec(const std::string& spec);

/// FNV-1a digest of the canonical structure text.
std::string structure_digest(const Structure& s);

/// One run's machine-readable record; versioned, stable field order.
struct RunReport {
  std::string command;
  std::vector<std::string> input_lines;  // side=left name=... digest=...
  std::string winner;
  std::string certificate;  // formula text, empty when none
  int measure_value = -1;   // -1 when not applicable
  std::uint64_t nodes = 0;
  double wall_ms = 0;
  std::string engine_version;
};

std::string format_report(const RunReport& r);

}  // namespace msgw

#endif
