#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ecsqkd/oracle.hpp"
#include "ecsqkd/params.hpp"

namespace ecsqkd {

struct VerifyPoint {
  double mu;
  double eta;
  double p_d;
  double e_d;
};

/// mu x eta x p_d x e_d = {0.01, 0.05, 0.1, 0.25, 0.5} x {0.05, 0.2, 0.5, 1}
/// x {0, 1e-7, 1e-5} x {0, 0.01, 0.07}.
std::vector<VerifyPoint> default_verify_grid();

/// Test hook: offsets one closed-form field before comparison.
enum class FaultInjection { None, Qzz, S, Ezz };

struct VerifyOptions {
  OracleOptions oracle;
  double tolerance = 1e-8;
  double eta_d = 0.8;  // detector efficiency used by the literal QBER reading
  FaultInjection fault = FaultInjection::None;
  double fault_size = 1e-6;
  int jobs = 1;
};

struct PointCheck {
  VerifyPoint point;
  DetectorStats closed_form;
  DetectorStats oracle;
  double dq = 0;
  double ds = 0;
  double de = 0;
  double de_literal = 0;  // oracle vs QBER numerator with eta_d in place of eta
  std::optional<std::string> error;

  bool passed(double tolerance) const { return !error && dq < tolerance && ds < tolerance && de < tolerance; }
};

struct VerifyReport {
  std::vector<PointCheck> checks;
  double max_dq = 0;
  double max_ds = 0;
  double max_de = 0;
  double max_de_literal = 0;
  std::size_t truncation_failures = 0;
  double tolerance = 0;
  bool passed = false;
  /// Which misaligned-QBER reading the oracle supports: "eta", "eta_d",
  /// "both" or "neither".
  std::string qber_reading;
};

/// Misaligned QBER with eta_d in the first numerator exponent, as a competing
/// reading of the closed form.
double misaligned_ezz_literal(double mu, double eta, double eta_d, double p_d, double e_d);

VerifyReport verify_closed_forms(const std::vector<VerifyPoint>& points, const VerifyOptions& options = {});

}  // namespace ecsqkd
