#include "ecsqkd/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

#include "ecsqkd/rates.hpp"

namespace ecsqkd {

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0 && hi >= lo) || points < 1) throw std::invalid_argument("log_grid: need 0 < lo <= hi and points >= 1");
  std::vector<double> grid(points);
  if (points == 1) {
    grid[0] = lo;
    return grid;
  }
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) grid[i] = lo * std::exp(step * i);
  grid.back() = hi;
  return grid;
}

double ecs_rate(double mu, double distance_km, const ProtocolParams& params) {
  const double eta = channel_efficiency(distance_km, params.beta_db_per_km, params.eta_d);
  return key_rate(ecs_misaligned_stats(mu, eta, params.p_d, params.e_d));
}

MuOptimum optimize_mu(double distance_km, const ProtocolParams& params, const MuSearch& search) {
  auto rate = [&](double mu) { return ecs_rate(mu, distance_km, params); };
  const auto grid = log_grid(search.lo, search.hi, search.seed_points);

  std::size_t best = 0;
  double best_rate = -1;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = rate(grid[i]);
    if (r > best_rate) {
      best_rate = r;
      best = i;
    }
  }
  if (!(best_rate > 0)) return {(search.lo + search.hi) / 2, 0.0, true};

  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[std::min(best + 1, grid.size() - 1)];
  const auto [mu, r] = golden_section_maximize(rate, lo, hi, search.tolerance);
  if (r >= best_rate) return {mu, r, false};
  return {grid[best], best_rate, false};
}

double audit_max_rate(double distance_km, const ProtocolParams& params, const MuSearch& search) {
  double best = 0;
  for (double mu : log_grid(search.lo, search.hi, search.audit_points))
    best = std::max(best, ecs_rate(mu, distance_km, params));
  return best;
}

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::Ecs: return "ecs";
    case Protocol::Bell: return "bell";
    case Protocol::Plob: return "plob";
  }
  return "?";
}

std::optional<Protocol> parse_protocol(std::string_view name) {
  if (name == "ecs") return Protocol::Ecs;
  if (name == "bell") return Protocol::Bell;
  if (name == "plob") return Protocol::Plob;
  return std::nullopt;
}

bool ProtocolSet::contains(Protocol p) const {
  switch (p) {
    case Protocol::Ecs: return ecs;
    case Protocol::Bell: return bell;
    case Protocol::Plob: return plob;
  }
  return false;
}

void ProtocolSet::insert(Protocol p) {
  switch (p) {
    case Protocol::Ecs: ecs = true; break;
    case Protocol::Bell: bell = true; break;
    case Protocol::Plob: plob = true; break;
  }
}

void SweepConfig::validate() const {
  if (!(l_min_km >= 0)) throw DomainError("sweep: l_min must be >= 0");
  if (!(l_min_km <= l_max_km)) throw DomainError("sweep: l_min must not exceed l_max");
  if (!(l_step_km > 0)) throw DomainError("sweep: l_step must be > 0");
  if (protocols.empty()) throw DomainError("sweep: protocol set is empty");
  if (!(search.lo > 0 && search.lo < search.hi)) throw DomainError("sweep: invalid mu search interval");
  ProtocolParams p = base;
  if (fixed_mu) p.mu = *fixed_mu;
  p.validate();
}

std::vector<double> SweepConfig::distances() const {
  const auto count = static_cast<std::size_t>(std::floor((l_max_km - l_min_km) / l_step_km + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = l_min_km + static_cast<double>(i) * l_step_km;
  return out;
}

SweepRow evaluate_row(const SweepConfig& config, double distance_km) {
  SweepRow row;
  row.distance_km = distance_km;
  const auto& base = config.base;
  const double eta = channel_efficiency(distance_km, base.beta_db_per_km, base.eta_d);

  if (config.protocols.ecs) {
    double mu = 0;
    if (config.fixed_mu) {
      mu = *config.fixed_mu;
    } else {
      const auto opt = optimize_mu(distance_km, base, config.search);
      mu = opt.mu;
      row.zero_rate = opt.zero_rate;
    }
    const auto stats = ecs_misaligned_stats(mu, eta, base.p_d, base.e_d);
    row.mu = mu;
    row.ecs_stats = stats;
    row.rate_ecs = key_rate(stats);
  }
  if (config.protocols.bell) row.rate_bell = key_rate(bell_state_stats(eta, base.p_d));
  if (config.protocols.plob) row.rate_plob = plob_bound(distance_km, base.beta_db_per_km, base.eta_d);
  return row;
}

std::vector<SweepRow> sweep(const SweepConfig& config) {
  config.validate();
  const auto grid = config.distances();
  std::vector<SweepRow> rows(grid.size());
  const int workers = std::clamp(config.jobs, 1, static_cast<int>(grid.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) rows[i] = evaluate_row(config, grid[i]);
    return rows;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < grid.size() && !failed; i = next++) {
          try {
            rows[i] = evaluate_row(config, grid[i]);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

double protocol_rate(Protocol protocol, const SweepConfig& config, double distance_km) {
  const auto& base = config.base;
  switch (protocol) {
    case Protocol::Ecs:
      if (config.fixed_mu) return ecs_rate(*config.fixed_mu, distance_km, base);
      return optimize_mu(distance_km, base, config.search).rate;
    case Protocol::Bell:
      return key_rate(
          bell_state_stats(channel_efficiency(distance_km, base.beta_db_per_km, base.eta_d), base.p_d));
    case Protocol::Plob:
      return plob_bound(distance_km, base.beta_db_per_km, base.eta_d);
  }
  return 0;
}

std::optional<double> find_crossover(Protocol first, Protocol second, const SweepConfig& config, double lo, double hi,
                                     double tol_km) {
  if (!(lo <= hi)) throw DomainError("find_crossover: empty bracket");
  auto ahead = [&](double distance) {
    return protocol_rate(first, config, distance) - protocol_rate(second, config, distance) > 0;
  };
  const bool ahead_lo = ahead(lo);
  if (ahead_lo == ahead(hi)) return std::nullopt;
  while (hi - lo > 2 * tol_km) {
    const double mid = (lo + hi) / 2;
    if (ahead(mid) == ahead_lo)
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / 2;
}

}  // namespace ecsqkd
