#include "ecsqkd/table_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ecsqkd {
namespace {

std::array<std::optional<double>, kSweepColumns.size()> cells(const SweepRow& row) {
  std::optional<double> q, s, e;
  if (row.ecs_stats) {
    q = row.ecs_stats->q_zz;
    s = row.ecs_stats->s;
    e = row.ecs_stats->e_zz;
  }
  return {row.distance_km, row.mu, q, s, e, row.rate_ecs, row.rate_bell, row.rate_plob};
}

std::optional<double> parse_cell(std::string_view text, std::size_t line) {
  if (text.empty()) return std::nullopt;
  double value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::runtime_error("csv line " + std::to_string(line) + ": bad number '" + std::string(text) + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    parts.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  for (std::size_t i = 0; i < kSweepColumns.size(); ++i) out << (i ? "," : "") << kSweepColumns[i];
  out << '\n';
  for (const auto& row : rows) {
    const auto values = cells(row);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out << ',';
      if (values[i]) out << format_double(*values[i]);
    }
    out << '\n';
  }
}

void write_json(std::ostream& out, const std::vector<SweepRow>& rows) {
  auto table = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json obj;
    const auto values = cells(row);
    for (std::size_t i = 0; i < values.size(); ++i) {
      const std::string key(kSweepColumns[i]);
      if (values[i])
        obj[key] = *values[i];
      else
        obj[key] = nullptr;
    }
    table.push_back(std::move(obj));
  }
  out << table.dump(2) << '\n';
}

std::vector<SweepRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: missing header");
  const auto header = split(line);
  if (header.size() != kSweepColumns.size() || !std::equal(header.begin(), header.end(), kSweepColumns.begin()))
    throw std::runtime_error("csv: unexpected header '" + line + "'");

  std::vector<SweepRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto parts = split(line);
    if (parts.size() != kSweepColumns.size())
      throw std::runtime_error("csv line " + std::to_string(line_no) + ": expected " +
                               std::to_string(kSweepColumns.size()) + " fields");
    std::array<std::optional<double>, kSweepColumns.size()> v;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = parse_cell(parts[i], line_no);
    if (!v[0]) throw std::runtime_error("csv line " + std::to_string(line_no) + ": distance is required");

    SweepRow row;
    row.distance_km = *v[0];
    row.mu = v[1];
    if (v[2] || v[3] || v[4]) {
      if (!(v[2] && v[3] && v[4]))
        throw std::runtime_error("csv line " + std::to_string(line_no) + ": partial ECS statistics");
      row.ecs_stats = DetectorStats{*v[2], *v[3], *v[4]};
    }
    row.rate_ecs = v[5];
    row.rate_bell = v[6];
    row.rate_plob = v[7];
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ecsqkd
