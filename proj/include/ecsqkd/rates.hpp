#pragma once

// Closed-form heralded statistics and key rates for the entangled-coherent-state
// (ECS) protocol, the Bell-state baseline and the repeaterless PLOB bound.
//
// All stats functions take the per-arm transmittance eta directly; use
// channel_efficiency() to obtain it from a fiber length.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ecsqkd/params.hpp"

namespace ecsqkd {

/// H2(x) in bits, with H2(0) = H2(1) = 0.
template <std::floating_point Real>
Real binary_entropy(Real x) {
  if (!(x >= 0 && x <= 1)) throw DomainError("binary_entropy: argument outside [0, 1]");
  if (x == 0 || x == 1) return Real(0);
  const Real ln2 = std::numbers::ln2_v<Real>;
  return -(x * std::log(x) + (1 - x) * std::log1p(-x)) / ln2;
}

/// Device-independent key rate per trial (one-way, asymptotic, p_zz -> 1).
/// No CHSH violation or a negative bracket yields zero.
template <std::floating_point Real>
Real key_rate(const BasicDetectorStats<Real>& stats) {
  if (!(stats.s > 2)) return Real(0);
  const Real half = stats.s / 2;
  // Clamp guards S a few ulps above the Tsirelson bound.
  const Real p = std::min(Real(1), (1 + std::sqrt(half * half - 1)) / 2);
  const Real e = std::clamp(stats.e_zz, Real(0), Real(1));
  const Real bracket = 1 - binary_entropy(e) - binary_entropy(p);
  return std::max(Real(0), stats.q_zz * bracket);
}

/// Per-arm transmittance with the central station placed midway.
template <std::floating_point Real>
Real channel_efficiency(Real distance_km, Real beta_db_per_km, Real eta_d) {
  return eta_d * std::pow(Real(10), -beta_db_per_km * (distance_km / 2) / 10);
}

/// Lossless channel, ideal threshold detectors.
template <std::floating_point Real>
BasicDetectorStats<Real> ecs_ideal_stats(Real mu) {
  if (!(mu > 0)) throw DomainError("ecs_ideal_stats: mu must be > 0");
  const Real v = std::exp(-2 * mu);
  return {-std::expm1(-2 * mu), std::numbers::sqrt2_v<Real> * (1 + v), Real(0)};
}

/// Symmetric lossy channel with dark counts.
///
/// Evaluated in a rearranged form; with x = 2mu*eta and y = 2mu(1-eta) the
/// common denominator is e^y (expm1(x) + 2 p_d), and the CHSH numerator
/// sinh(2mu) - cosh(y) + (1-p_d)e^-y equals sinh(2mu) - sinh(y) - p_d e^-y.
template <std::floating_point Real>
BasicDetectorStats<Real> ecs_lossy_stats(Real mu, Real eta, Real p_d) {
  if (!(mu > 0)) throw DomainError("ecs_lossy_stats: mu must be > 0");
  if (!(eta > 0 && eta <= 1)) throw DomainError("ecs_lossy_stats: eta must lie in (0, 1]");
  if (!(p_d >= 0 && p_d < 1)) throw DomainError("ecs_lossy_stats: p_d must lie in [0, 1)");

  const Real x = 2 * mu * eta;
  const Real y = 2 * mu * (1 - eta);
  const Real core = std::expm1(x) + 2 * p_d;
  if (!(core > 0)) throw DomainError("ecs_lossy_stats: degenerate denominator");

  BasicDetectorStats<Real> out;
  out.q_zz = (1 - p_d) * std::exp(-x) * core;
  const Real numer = 2 * std::cosh(mu * (2 - eta)) * std::sinh(mu * eta) - p_d * std::exp(-y);
  out.s = 2 * std::numbers::sqrt2_v<Real> * numer * std::exp(-y) / core;
  out.e_zz = p_d / core;
  return out;
}

/// Lossy channel with a fixed relative phase drift between the two arms,
/// e_d = (1 - cos delta0) / 2.
///
/// The QBER numerator uses the per-arm transmittance eta in the exponent
/// 2mu(1 - eta + eta e_d); this reduces to ecs_lossy_stats at e_d = 0 and
/// matches the Fock-space oracle.
template <std::floating_point Real>
BasicDetectorStats<Real> ecs_misaligned_stats(Real mu, Real eta, Real p_d, Real e_d) {
  if (!(mu > 0)) throw DomainError("ecs_misaligned_stats: mu must be > 0");
  if (!(eta > 0 && eta <= 1)) throw DomainError("ecs_misaligned_stats: eta must lie in (0, 1]");
  if (!(p_d >= 0 && p_d < 1)) throw DomainError("ecs_misaligned_stats: p_d must lie in [0, 1)");
  if (!(e_d >= 0 && e_d <= Real(0.5))) throw DomainError("ecs_misaligned_stats: e_d must lie in [0, 0.5]");

  // Mean photon numbers reaching the "wrong" and "right" output port.
  const Real a = 2 * mu * eta * e_d;
  const Real b = 2 * mu * eta * (1 - e_d);
  const Real y = 2 * mu * (1 - eta);
  const Real ea = std::expm1(a);
  const Real eb = std::expm1(b);
  const Real core = ea + eb + 2 * p_d;
  if (!(core > 0)) throw DomainError("ecs_misaligned_stats: degenerate denominator");

  BasicDetectorStats<Real> out;
  out.q_zz = (1 - p_d) * std::exp(-(a + b)) * core;
  const Real w = std::exp(y) * (eb - ea) - std::exp(-y) * (std::expm1(-a) + std::expm1(-b)) -
                 2 * p_d * std::exp(-y);
  out.s = std::numbers::sqrt2_v<Real> * w * std::exp(-y) / core;
  out.e_zz = (ea + p_d) / core;
  return out;
}

/// Heralded Bell-state baseline (two-photon interference at the central station).
template <std::floating_point Real>
BasicDetectorStats<Real> bell_state_stats(Real eta, Real p_d) {
  if (!(eta >= 0 && eta <= 1)) throw DomainError("bell_state_stats: eta must lie in [0, 1]");
  if (!(p_d >= 0 && p_d < 1)) throw DomainError("bell_state_stats: p_d must lie in [0, 1)");
  const Real denom = 8 * eta * (1 - 2 * p_d) * p_d + 8 * p_d * p_d + eta * eta * (1 - 6 * p_d + 8 * p_d * p_d);
  if (!(denom > 0)) throw DomainError("bell_state_stats: zero denominator");

  const Real one_minus = 1 - p_d;
  BasicDetectorStats<Real> out;
  out.q_zz = one_minus * one_minus *
             (eta * eta / 2 + (4 * eta - 3 * eta * eta) * p_d + 4 * (1 - eta) * (1 - eta) * p_d * p_d);
  out.s = 2 * std::numbers::sqrt2_v<Real> * eta * eta * one_minus / denom;
  out.e_zz = (1 - eta * eta * (1 - 2 * p_d) / denom) / 2;
  return out;
}

/// Repeaterless secret-key capacity -log2(1 - eta_AB) over the full
/// Alice-Bob path.
template <std::floating_point Real>
Real plob_bound(Real distance_km, Real beta_db_per_km, Real eta_d) {
  const Real eta_ab = eta_d * std::pow(Real(10), -beta_db_per_km * distance_km / 10);
  if (!(eta_ab >= 0 && eta_ab < 1)) throw DomainError("plob_bound: transmittance must lie in [0, 1)");
  return -std::log1p(-eta_ab) / std::numbers::ln2_v<Real>;
}

/// Channel efficiency, misaligned ECS statistics and key rate at one point.
template <std::floating_point Real>
BasicKeyRatePoint<Real> evaluate_ecs(const BasicProtocolParams<Real>& params) {
  params.validate();
  const Real eta = channel_efficiency(params.distance_km, params.beta_db_per_km, params.eta_d);
  BasicKeyRatePoint<Real> point;
  point.params = params;
  point.stats = ecs_misaligned_stats(params.mu, eta, params.p_d, params.e_d);
  point.rate = key_rate(point.stats);
  return point;
}

}  // namespace ecsqkd
