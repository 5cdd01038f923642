#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ecsqkd/params.hpp"

namespace ecsqkd {

/// Golden-section search for a maximum of a unimodal f on [lo, hi].
/// Returns (x, f(x)) once the bracket is narrower than tol.
template <class F>
std::pair<double, double> golden_section_maximize(F&& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 < f2 ? std::pair{x2, f2} : std::pair{x1, f1};
}

/// `points` log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int points);

struct MuSearch {
  double lo = 1e-4;
  double hi = 1.0;
  int seed_points = 200;
  int audit_points = 2000;
  double tolerance = 1e-10;
};

struct MuOptimum {
  double mu = 0;
  double rate = 0;
  bool zero_rate = false;  // no positive rate anywhere in the interval
};

/// ECS key rate at intensity mu for a fixed distance and channel.
double ecs_rate(double mu, double distance_km, const ProtocolParams& params);

/// Maximizes the ECS key rate over mu: log-grid seed, then golden-section
/// refinement inside the neighbours of the best seed point.
/// params.mu is ignored.
MuOptimum optimize_mu(double distance_km, const ProtocolParams& params, const MuSearch& search = {});

/// Best rate on the audit grid; optimize_mu must never fall below it.
double audit_max_rate(double distance_km, const ProtocolParams& params, const MuSearch& search = {});

enum class Protocol { Ecs, Bell, Plob };

std::string_view to_string(Protocol p);
std::optional<Protocol> parse_protocol(std::string_view name);

struct ProtocolSet {
  bool ecs = false;
  bool bell = false;
  bool plob = false;

  static ProtocolSet all() { return {true, true, true}; }
  bool empty() const { return !ecs && !bell && !plob; }
  bool contains(Protocol p) const;
  void insert(Protocol p);
};

struct SweepConfig {
  double l_min_km = 0;
  double l_max_km = 600;
  double l_step_km = 5;
  ProtocolParams base;               // base.mu is used only when fixed_mu is set
  std::optional<double> fixed_mu;    // empty: optimize mu per distance
  ProtocolSet protocols = ProtocolSet::all();
  MuSearch search;
  int jobs = 1;

  void validate() const;
  std::vector<double> distances() const;
};

struct SweepRow {
  double distance_km = 0;
  std::optional<double> mu;
  std::optional<DetectorStats> ecs_stats;
  std::optional<double> rate_ecs;
  std::optional<double> rate_bell;
  std::optional<double> rate_plob;
  bool zero_rate = false;  // ECS optimizer found no positive rate

  bool operator==(const SweepRow&) const = default;
};

SweepRow evaluate_row(const SweepConfig& config, double distance_km);

/// One row per grid distance, ordered by distance. Rows are computed on
/// config.jobs threads.
std::vector<SweepRow> sweep(const SweepConfig& config);

/// Rate of one protocol at one distance, mu optimized for ECS unless the
/// config fixes it.
double protocol_rate(Protocol protocol, const SweepConfig& config, double distance_km);

/// Bisection for the distance where rate(first) - rate(second) changes from
/// positive to non-positive (or back) inside [lo, hi]. Returns the midpoint of
/// the final bracket, which is narrower than 2 * tol_km. Empty if the sign
/// class at both ends is the same.
std::optional<double> find_crossover(Protocol first, Protocol second, const SweepConfig& config, double lo, double hi,
                                     double tol_km = 0.5);

}  // namespace ecsqkd
