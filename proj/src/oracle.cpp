#include "ecsqkd/oracle.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace ecsqkd {
namespace {

struct PreparedArm {
  double prior = 0;
  OpticalEnsemble<double> ensemble;
};

// Arm state for one (setting, outcome): conditional cat, then pure loss.
PreparedArm prepare_arm(double mu, double theta, int outcome, double eta, int n_max) {
  const auto decomposition = CatStateDecomposition<double>::make(mu, theta);
  const auto cond = decomposition.conditional(outcome);
  const double alpha = std::sqrt(mu);
  const auto plus = coherent_fock<double>({alpha, 0.0}, n_max);
  const auto minus = coherent_fock<double>({-alpha, 0.0}, n_max);
  TruncatedOpticalState<double> cat(cond.amp_pos * plus.amplitudes() + cond.amp_neg * minus.amplitudes(), n_max);
  return {cond.prior, apply_loss(cat, eta)};
}

int outcome_index(int outcome) { return outcome == +1 ? 0 : 1; }

}  // namespace

OracleReport oracle_run(double mu, double eta, double p_d, double e_d, const OracleOptions& options) {
  if (!(mu > 0)) throw std::domain_error("oracle: mu must be > 0");
  if (!(eta > 0 && eta <= 1)) throw std::domain_error("oracle: eta must lie in (0, 1]");
  if (!(p_d >= 0 && p_d < 1)) throw std::domain_error("oracle: p_d must lie in [0, 1)");
  if (!(e_d >= 0 && e_d <= 0.5)) throw std::domain_error("oracle: e_d must lie in [0, 0.5]");
  if (options.n_max < 1) throw std::invalid_argument("oracle: n_max must be positive");

  const int n_max = options.n_max;
  std::array<std::array<PreparedArm, 2>, kSettings.size()> arms;
  for (const auto& s : kSettings)
    for (int outcome : {+1, -1})
      arms[static_cast<int>(s.role)][outcome_index(outcome)] = prepare_arm(mu, s.theta, outcome, eta, n_max);

  const Beamsplitter<double> central(0.5, 2 * n_max);
  const double delta0 = misalignment_phase(e_d);

  OracleReport report;
  auto run_pair = [&](SettingRole alice, SettingRole bob) {
    const bool flip_on_d2 = setting(bob).z_basis();
    double herald = 0;
    double agree_minus_disagree = 0;
    double errors = 0;
    for (int a : {+1, -1}) {
      for (int b : {+1, -1}) {
        const auto& arm_a = arms[static_cast<int>(alice)][outcome_index(a)];
        const auto& arm_b = arms[static_cast<int>(bob)][outcome_index(b)];
        VacuumProbabilities<double> vac;
        double trace = 0;
        for (const auto& u : arm_a.ensemble) {
          for (const auto& v : arm_b.ensemble) {
            auto joint = misalignment_rotate(tensor(u, v), 1, delta0);
            central.apply(joint, 0, 1);
            vac += vacuum_probabilities(joint);
            trace += joint.squared_norm();
          }
        }
        report.max_norm_defect = std::max(report.max_norm_defect, std::abs(trace - 1));

        const auto outcomes = threshold_detect(vac, p_d);
        const double weight = arm_a.prior * arm_b.prior;
        const double d1 = outcomes[static_cast<int>(Herald::D1Only)].probability;
        const double d2 = outcomes[static_cast<int>(Herald::D2Only)].probability;
        const int b_d2 = flip_on_d2 ? -b : b;
        herald += weight * (d1 + d2);
        agree_minus_disagree += weight * (a * b * d1 + a * b_d2 * d2);
        errors += weight * ((a != b ? d1 : 0.0) + (a != b_d2 ? d2 : 0.0));
      }
    }
    report.pairs.push_back({alice, bob, herald, agree_minus_disagree / herald});
    return std::array<double, 2>{herald, errors / herald};
  };

  const auto zz = run_pair(SettingRole::A0, SettingRole::B1);
  report.stats.q_zz = zz[0];
  report.stats.e_zz = zz[1];

  run_pair(SettingRole::A1, SettingRole::B1);
  run_pair(SettingRole::A1, SettingRole::B2);
  run_pair(SettingRole::A2, SettingRole::B1);
  run_pair(SettingRole::A2, SettingRole::B2);
  const auto& p = report.pairs;
  report.stats.s = p[1].correlator - p[2].correlator + p[3].correlator + p[4].correlator;
  return report;
}

}  // namespace ecsqkd
