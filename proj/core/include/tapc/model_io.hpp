#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "tapc/model.hpp"

namespace tapc {

// Parse failure for the text formats, carrying the 1-based source line.
struct ParseError : std::runtime_error {
  int line = 0;
  ParseError(const std::string& what, int line_no)
      : std::runtime_error(what + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
};

// Plain-text scenario format, versioned and unit-annotated. All numbers are
// written with 17 significant digits, so save -> load -> save reproduces the
// bytes and load recovers the exact doubles.
void save_scenario(std::ostream& os, const NetworkScenario& sc);
void save_scenario_file(const std::string& path, const NetworkScenario& sc);
NetworkScenario load_scenario(std::istream& is);           // throws ParseError
NetworkScenario load_scenario_file(const std::string& path);

// Per-user allocation table next to its scenario, for inspection and plotting.
void save_allocation(std::ostream& os, const Allocation& alloc, const NetworkScenario& sc);

}  // namespace tapc
