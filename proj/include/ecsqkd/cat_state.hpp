#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <numbers>
#include <stdexcept>
#include <string_view>

namespace ecsqkd {

enum class SettingRole { A0, A1, A2, B1, B2 };

/// Spin measurement along chi_theta = cos(theta) sigma_z + sin(theta) sigma_x.
struct MeasurementSetting {
  SettingRole role;
  double theta;
  bool z_basis() const { return role == SettingRole::A0 || role == SettingRole::B1; }
};

inline constexpr std::array<MeasurementSetting, 5> kSettings{{
    {SettingRole::A0, 0.0},
    {SettingRole::A1, std::numbers::pi / 4},
    {SettingRole::A2, -std::numbers::pi / 4},
    {SettingRole::B1, 0.0},
    {SettingRole::B2, std::numbers::pi / 2},
}};

constexpr MeasurementSetting setting(SettingRole role) { return kSettings[static_cast<int>(role)]; }

constexpr std::string_view to_string(SettingRole role) {
  constexpr std::array<std::string_view, 5> names{"A0", "A1", "A2", "B1", "B2"};
  return names[static_cast<int>(role)];
}

/// Optical state left in a sender's arm after the atom is measured along
/// chi_theta with outcome +1 or -1: amp_pos |alpha> + amp_neg |-alpha>,
/// reached with probability `prior`.
template <std::floating_point Real>
struct ConditionalCat {
  Real amp_pos;
  Real amp_neg;
  Real prior;
};

/// Normalizations of the atom-light cat state (|+z>|alpha> + |-z>|-alpha>)/sqrt(2)
/// rewritten in the two-party ECS basis and in the chi_theta spin basis.
template <std::floating_point Real>
struct CatStateDecomposition {
  Real mu;
  Real theta;
  Real n_plus;   // 2 (1 + e^{-4 mu})
  Real n_minus;  // 2 (1 - e^{-4 mu})
  Real m_plus;   // sqrt(1 + sin(theta) e^{-2 mu})
  Real m_minus;  // sqrt(1 - sin(theta) e^{-2 mu})

  static CatStateDecomposition make(Real mu, Real theta) {
    if (!(mu > 0)) throw std::domain_error("CatStateDecomposition: mu must be > 0");
    const Real v2 = std::exp(-2 * mu);
    const Real v4 = std::exp(-4 * mu);
    return {mu, theta, 2 * (1 + v4), -2 * std::expm1(-4 * mu), std::sqrt(1 + std::sin(theta) * v2),
            std::sqrt(1 - std::sin(theta) * v2)};
  }

  /// Overlap <alpha|-alpha>.
  Real coherent_overlap() const { return std::exp(-2 * mu); }

  ConditionalCat<Real> conditional(int outcome) const {
    const Real c = std::cos(theta / 2);
    const Real s = std::sin(theta / 2);
    if (outcome == +1) return {c / m_plus, s / m_plus, m_plus * m_plus / 2};
    if (outcome == -1) return {s / m_minus, -c / m_minus, m_minus * m_minus / 2};
    throw std::invalid_argument("CatStateDecomposition: outcome must be +1 or -1");
  }
};

}  // namespace ecsqkd
