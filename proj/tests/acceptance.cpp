// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ecsqkd/fock.hpp"
#include "ecsqkd/optimize.hpp"
#include "ecsqkd/rates.hpp"
#include "ecsqkd/verify.hpp"

using namespace ecsqkd;

namespace {

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail) {
  std::printf("[%s] %d. %s: %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

SweepConfig reference_params(double e_d = 0.0) {
  SweepConfig c;
  c.base.beta_db_per_km = 0.2;
  c.base.eta_d = 0.8;
  c.base.p_d = 1e-7;
  c.base.e_d = e_d;
  return c;
}

// Least-squares slope of log10(rate) against distance.
double log_slope(Protocol p, const SweepConfig& config, double lo, double hi, double step) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (double L = lo; L <= hi + 1e-9; L += step) {
    const double y = std::log10(protocol_rate(p, config, L));
    sx += L;
    sy += y;
    sxx += L * L;
    sxy += L * y;
    ++n;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void chsh_threshold() {
  double lo = 0.1, hi = 1.0;  // s(lo) > 2 > s(hi)
  while (hi - lo > 1e-13) {
    const double mid = (lo + hi) / 2;
    (ecs_ideal_stats(mid).s > 2 ? lo : hi) = mid;
  }
  const double root = (lo + hi) / 2;
  const double analytic = -std::log(std::numbers::sqrt2 - 1) / 2;
  report(1, "CHSH violation threshold", std::abs(root - 0.4407) <= 1e-4,
         fmt("root mu = %.6f (analytic %.6f), target 0.4407 +/- 1e-4", root, analytic));
}

void oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  VerifyOptions options;
  options.oracle.n_max = 30;
  const auto r = verify_closed_forms(default_verify_grid(), options);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = r.passed && r.max_dq < 1e-8 && r.max_ds < 1e-8 && r.max_de < 1e-8 && r.qber_reading == "eta";
  report(2, "Oracle equivalence (180-point grid, n_max=30)", ok,
         fmt("max |dQ|=%.2e |dS|=%.2e |de|=%.2e (tol 1e-8); literal eta_d reading max |de|=%.2e; "
             "oracle supports '%s' reading; %.1f s",
             r.max_dq, r.max_ds, r.max_de, r.max_de_literal, r.qber_reading.c_str(), seconds));
}

void reduction_identities() {
  double worst_misaligned = 0, worst_lossy = 0;
  for (int i = 1; i <= 100; ++i) {
    const double mu = i / 100.0;
    for (double eta : {0.05, 0.2, 0.5, 1.0})
      for (double p_d : {0.0, 1e-7, 1e-5}) {
        const auto a = ecs_misaligned_stats(mu, eta, p_d, 0.0);
        const auto b = ecs_lossy_stats(mu, eta, p_d);
        worst_misaligned = std::max({worst_misaligned, std::abs(a.q_zz - b.q_zz), std::abs(a.s - b.s),
                                     std::abs(a.e_zz - b.e_zz)});
      }
    const auto a = ecs_lossy_stats(mu, 1.0, 0.0);
    const auto b = ecs_ideal_stats(mu);
    worst_lossy =
        std::max({worst_lossy, std::abs(a.q_zz - b.q_zz), std::abs(a.s - b.s), std::abs(a.e_zz - b.e_zz)});
  }
  report(3, "Reduction identities", worst_misaligned <= 1e-12 && worst_lossy <= 1e-12,
         fmt("misaligned(e_d=0) vs lossy %.2e, lossy(eta=1,p_d=0) vs ideal %.2e (tol 1e-12)", worst_misaligned,
             worst_lossy));
}

void bell_crossovers() {
  const auto config = reference_params();
  const auto lower = find_crossover(Protocol::Ecs, Protocol::Bell, config, 50, 200);
  const auto upper = find_crossover(Protocol::Ecs, Protocol::Bell, config, 350, 550);
  const double ecs = protocol_rate(Protocol::Ecs, config, 400);
  const double bell = protocol_rate(Protocol::Bell, config, 400);
  const double ratio = ecs / bell;

  const bool lower_ok = lower && std::abs(*lower - 100) <= 15;
  const bool upper_ok = upper && std::abs(*upper - 450) <= 67.5;
  const bool ratio_ok = ratio >= std::pow(10.0, 3.5);
  report(4, "ECS vs Bell-state crossovers", lower_ok && upper_ok && ratio_ok,
         fmt("lower crossover %.1f km [%s, want 85-115], upper crossover %.1f km [%s, want 382.5-517.5], "
             "R_ECS/R_Bell at 400 km = %.3g = 10^%.2f [%s, want >= 10^3.5]",
             lower.value_or(NAN), lower_ok ? "ok" : "out", upper.value_or(NAN), upper_ok ? "ok" : "out", ratio,
             std::log10(ratio), ratio_ok ? "ok" : "out"));
}

void plob_crossing() {
  const auto config = reference_params();
  const auto crossing = find_crossover(Protocol::Ecs, Protocol::Plob, config, 100, 250);
  const bool crossing_ok = crossing && std::abs(*crossing - 150) <= 20;

  const auto noisy = reference_params(0.07);
  std::optional<double> first, last;
  for (double L = 0; L <= 600; L += 1) {
    if (protocol_rate(Protocol::Ecs, noisy, L) > protocol_rate(Protocol::Plob, noisy, L)) {
      if (!first) first = L;
      last = L;
    }
  }
  report(5, "PLOB crossing", crossing_ok && first.has_value(),
         fmt("ECS first exceeds PLOB at %.1f km (want 150 +/- 20); with e_d=0.07 ECS > PLOB on [%.0f, %.0f] km",
             crossing.value_or(NAN), first.value_or(NAN), last.value_or(NAN)));
}

void scaling_laws() {
  const auto config = reference_params();
  const double ecs = log_slope(Protocol::Ecs, config, 200, 350, 5);
  const double bell = log_slope(Protocol::Bell, config, 200, 350, 5);
  const bool ok = std::abs(ecs / -0.01 - 1) <= 0.15 && std::abs(bell / -0.02 - 1) <= 0.15;
  report(6, "Scaling laws (200-350 km)", ok,
         fmt("d log10 R / dL: ECS %.5f /km (want -0.01 +/- 15%%), Bell %.5f /km (want -0.02 +/- 15%%)", ecs, bell));
}

void parity_law() {
  using State = TruncatedOpticalState<double>;
  double worst = 0;
  for (double mu : {0.1, 0.5, 1.0}) {
    const double a = std::sqrt(mu);
    const auto p = coherent_fock<double>({a, 0.0}, 30);
    const auto m = coherent_fock<double>({-a, 0.0}, 30);
    const auto pp = tensor(p, p).amplitudes();
    const auto mm = tensor(m, m).amplitudes();
    const auto pm = tensor(p, m).amplitudes();
    const auto mp = tensor(m, p).amplitudes();
    struct Case {
      State::Amplitudes amps;
      int bright;
      int parity;
    };
    const Case cases[] = {{pp + mm, 0, 0}, {pp - mm, 0, 1}, {pm + mp, 1, 0}, {pm - mp, 1, 1}};
    for (const auto& c : cases) {
      const auto out = beamsplitter_apply(State(c.amps / c.amps.norm(), 60), 0, 1, 0.5);
      const auto dark = out.photon_distribution(1 - c.bright);
      const auto bright = out.photon_distribution(c.bright);
      double residual = 1 - dark(0);
      for (int n = 0; n <= 60; ++n)
        if (n % 2 != c.parity) residual += bright(n);
      worst = std::max(worst, std::abs(residual));
    }
  }
  report(7, "Parity law", worst < 1e-12, fmt("largest residual mass %.2e over 4 ECSs x mu {0.1, 0.5, 1} (tol 1e-12)", worst));
}

void optimizer_certificate() {
  std::mt19937 rng(20240611);
  std::uniform_int_distribution<int> step(0, 120);
  std::uniform_real_distribution<double> misalignment(0.0, 0.07);
  double worst_gap = -INFINITY;
  int positive = 0;
  bool ok = true;
  for (int i = 0; i < 20; ++i) {
    auto config = reference_params(misalignment(rng));
    const double L = 5.0 * step(rng);
    const auto row = evaluate_row(config, L);
    const double audit = audit_max_rate(L, config.base, config.search);
    const double gap = audit - *row.rate_ecs;
    worst_gap = std::max(worst_gap, gap);
    ok = ok && *row.rate_ecs >= audit - 1e-12;
    positive += *row.rate_ecs > 0;
  }
  report(8, "Optimizer certificate", ok,
         fmt("20 random rows (%d with positive rate); max(audit - R(mu*)) = %.2e (must be <= 1e-12)", positive,
             worst_gap));
}

}  // namespace

int main() {
  chsh_threshold();
  oracle_equivalence();
  reduction_identities();
  bell_crossovers();
  plob_crossing();
  scaling_laws();
  parity_law();
  optimizer_certificate();
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
