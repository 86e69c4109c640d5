#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nbf/sample.hpp"
#include "nbf/sim.hpp"

namespace nbf {

struct ParsedGroups {
    Sample sample1;
    Sample sample2;
};

// Long-format input with header `group,value` (case-insensitive, whitespace
// tolerated). Exactly two distinct group labels must appear; order of first
// appearance decides which is sample 1, and `swap_groups` flips that.
// Malformed rows raise with the offending line number.
ParsedGroups read_group_value_csv(const std::string& path, bool swap_groups);

// Simulation report rows; doubles use the shortest representation that
// parses back to the identical value, so emitted files round-trip exactly.
void write_sim_csv(const SimReport& report, std::ostream& out);
void write_sim_csv_file(const SimReport& report, const std::string& path);
std::vector<SimCell> read_sim_csv(const std::string& path);

// Shortest decimal string that strtod maps back to exactly `value`.
std::string format_double_exact(double value);

// Quotes a field if it contains a comma, quote, or newline.
std::string csv_escape(const std::string& field);

}  // namespace nbf
