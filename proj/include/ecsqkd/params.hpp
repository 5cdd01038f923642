#pragma once

#include <concepts>
#include <stdexcept>
#include <string>

namespace ecsqkd {

/// Raised when an input lies outside the domain of a rate formula or when a
/// closed form degenerates (zero denominator, divergent bound).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Physical inputs of one protocol evaluation.
///
/// Distances are the total Alice-Bob separation; the half-path to the central
/// station is applied only by channel_efficiency().
template <std::floating_point Real>
struct BasicProtocolParams {
  Real mu = Real(0.1);               // coherent-state intensity |alpha|^2
  Real beta_db_per_km = Real(0.2);   // fiber loss
  Real eta_d = Real(0.8);            // detector efficiency
  Real p_d = Real(1e-7);             // dark-count probability per gate
  Real e_d = Real(0);                // optical misalignment error
  Real distance_km = Real(0);

  void validate() const {
    auto fail = [](const std::string& what) { throw DomainError("invalid protocol parameter: " + what); };
    if (!(mu > 0)) fail("mu must be > 0");
    if (!(beta_db_per_km >= 0)) fail("beta must be >= 0");
    if (!(eta_d > 0 && eta_d <= 1)) fail("eta_d must lie in (0, 1]");
    if (!(p_d >= 0 && p_d < 1)) fail("p_d must lie in [0, 1)");
    if (!(e_d >= 0 && e_d <= Real(0.5))) fail("e_d must lie in [0, 0.5]");
    if (!(distance_km >= 0)) fail("distance must be >= 0");
  }
};

/// Heralded statistics: Z-basis gain, CHSH value and Z-basis QBER.
template <std::floating_point Real>
struct BasicDetectorStats {
  Real q_zz = 0;
  Real s = 0;
  Real e_zz = 0;

  bool operator==(const BasicDetectorStats&) const = default;
};

template <std::floating_point Real>
struct BasicKeyRatePoint {
  Real rate = 0;
  BasicDetectorStats<Real> stats;
  BasicProtocolParams<Real> params;
};

using ProtocolParams = BasicProtocolParams<double>;
using DetectorStats = BasicDetectorStats<double>;
using KeyRatePoint = BasicKeyRatePoint<double>;

}  // namespace ecsqkd
