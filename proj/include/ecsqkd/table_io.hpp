#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecsqkd/optimize.hpp"

namespace ecsqkd {

/// Column order of the sweep table, shared by CSV headers and JSON keys.
inline constexpr std::array<std::string_view, 8> kSweepColumns{
    "distance_km", "mu", "q_zz", "s", "e_zz", "rate_ecs", "rate_bell", "rate_plob"};

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_json(std::ostream& out, const std::vector<SweepRow>& rows);

/// Parses a table produced by write_csv. Throws std::runtime_error on a
/// malformed header or cell.
std::vector<SweepRow> read_csv(std::istream& in);

}  // namespace ecsqkd
