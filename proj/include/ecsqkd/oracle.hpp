#pragma once

#include <vector>

#include "ecsqkd/cat_state.hpp"
#include "ecsqkd/fock.hpp"
#include "ecsqkd/params.hpp"

namespace ecsqkd {

struct OracleOptions {
  int n_max = 30;  // per-arm Fock cutoff; the two-mode stage uses 2 * n_max
};

/// Heralded correlator for one (Alice, Bob) setting pair, after the D2 flip rule.
struct SettingPairResult {
  SettingRole alice;
  SettingRole bob;
  double herald_probability;  // P(D1-only) + P(D2-only)
  double correlator;          // <A B> conditioned on a herald
};

struct OracleReport {
  DetectorStats stats;
  std::vector<SettingPairResult> pairs;
  double max_norm_defect = 0;  // max |trace - 1| over all conditional two-mode states
};

/// First-principles heralded statistics: cat-state preparation, pure loss on
/// both arms, a relative phase on Bob's arm, the central 50:50 beamsplitter,
/// threshold detection with dark counts and the D2 flip of Bob's Z outcome.
OracleReport oracle_run(double mu, double eta, double p_d, double e_d, const OracleOptions& options = {});

inline DetectorStats oracle_stats(double mu, double eta, double p_d, double e_d, const OracleOptions& options = {}) {
  return oracle_run(mu, eta, p_d, e_d, options).stats;
}

}  // namespace ecsqkd
