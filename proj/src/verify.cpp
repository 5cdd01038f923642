#include "ecsqkd/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "ecsqkd/rates.hpp"

namespace ecsqkd {

std::vector<VerifyPoint> default_verify_grid() {
  std::vector<VerifyPoint> grid;
  for (double mu : {0.01, 0.05, 0.1, 0.25, 0.5})
    for (double eta : {0.05, 0.2, 0.5, 1.0})
      for (double p_d : {0.0, 1e-7, 1e-5})
        for (double e_d : {0.0, 0.01, 0.07}) grid.push_back({mu, eta, p_d, e_d});
  return grid;
}

double misaligned_ezz_literal(double mu, double eta, double eta_d, double p_d, double e_d) {
  const double denom = std::exp(2 * mu * (1 - eta * e_d)) + std::exp(2 * mu * (1 - eta + eta * e_d)) -
                       2 * (1 - p_d) * std::exp(2 * mu * (1 - eta));
  return (std::exp(2 * mu * (1 - eta_d + eta * e_d)) - (1 - p_d) * std::exp(2 * mu * (1 - eta))) / denom;
}

namespace {

PointCheck check_point(const VerifyPoint& pt, const VerifyOptions& options) {
  PointCheck check;
  check.point = pt;
  try {
    check.closed_form = ecs_misaligned_stats(pt.mu, pt.eta, pt.p_d, pt.e_d);
    switch (options.fault) {
      case FaultInjection::Qzz: check.closed_form.q_zz += options.fault_size; break;
      case FaultInjection::S: check.closed_form.s += options.fault_size; break;
      case FaultInjection::Ezz: check.closed_form.e_zz += options.fault_size; break;
      case FaultInjection::None: break;
    }
    check.oracle = oracle_stats(pt.mu, pt.eta, pt.p_d, pt.e_d, options.oracle);
    check.dq = std::abs(check.closed_form.q_zz - check.oracle.q_zz);
    check.ds = std::abs(check.closed_form.s - check.oracle.s);
    check.de = std::abs(check.closed_form.e_zz - check.oracle.e_zz);
    check.de_literal =
        std::abs(misaligned_ezz_literal(pt.mu, pt.eta, options.eta_d, pt.p_d, pt.e_d) - check.oracle.e_zz);
  } catch (const TruncationError& e) {
    check.error = e.what();
  }
  return check;
}

}  // namespace

VerifyReport verify_closed_forms(const std::vector<VerifyPoint>& points, const VerifyOptions& options) {
  VerifyReport report;
  report.tolerance = options.tolerance;
  report.checks.resize(points.size());

  const int workers = std::clamp(options.jobs, 1, std::max<int>(1, static_cast<int>(points.size())));
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < points.size(); i = next++) report.checks[i] = check_point(points[i], options);
      });
  }

  for (const auto& c : report.checks) {
    if (c.error) {
      ++report.truncation_failures;
      continue;
    }
    report.max_dq = std::max(report.max_dq, c.dq);
    report.max_ds = std::max(report.max_ds, c.ds);
    report.max_de = std::max(report.max_de, c.de);
    report.max_de_literal = std::max(report.max_de_literal, c.de_literal);
  }
  const double tol = options.tolerance;
  report.passed = report.truncation_failures == 0 && !points.empty() &&
                  std::all_of(report.checks.begin(), report.checks.end(), [&](const auto& c) { return c.passed(tol); });

  const bool eta_ok = report.max_de < tol;
  const bool literal_ok = report.max_de_literal < tol;
  report.qber_reading = eta_ok ? (literal_ok ? "both" : "eta") : (literal_ok ? "eta_d" : "neither");
  return report;
}

}  // namespace ecsqkd
