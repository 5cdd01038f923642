#pragma once

// Truncated Fock-space states of one or two optical modes and the linear-optics
// operations needed to propagate cat states to a pair of threshold detectors.
//
// A state stores amplitudes(n0, n1) for |n0>|n1>. Single-mode states have one
// column. The cutoff bounds the total photon number n0 + n1, which keeps every
// beamsplitter exactly unitary on the truncated space.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <concepts>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecsqkd {

class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest Poisson tail mass accepted when expanding a coherent state.
inline constexpr double kMaxTailMass = 1e-12;

/// P(N > n_max) for N ~ Poisson(mean), summed term by term above the cutoff.
template <std::floating_point Scalar>
Scalar poisson_tail(Scalar mean, int n_max) {
  if (mean <= 0) return Scalar(0);
  const int start = n_max + 1;
  Scalar log_term = -mean + start * std::log(mean) - std::lgamma(Scalar(start + 1));
  Scalar tail = 0;
  for (int n = start; n < start + 10000; ++n) {
    const Scalar term = std::exp(log_term);
    tail += term;
    if (n > mean && term < tail * std::numeric_limits<Scalar>::epsilon()) break;
    log_term += std::log(mean) - std::log(Scalar(n + 1));
  }
  return tail;
}

template <std::floating_point Scalar>
class TruncatedOpticalState {
 public:
  using Complex = std::complex<Scalar>;
  using Amplitudes = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

  TruncatedOpticalState() = default;

  /// Vacuum on `modes` modes (1 or 2) with total-photon cutoff `cutoff`.
  TruncatedOpticalState(int modes, int cutoff) : cutoff_(cutoff) {
    if (modes != 1 && modes != 2) throw std::invalid_argument("TruncatedOpticalState: 1 or 2 modes supported");
    if (cutoff < 0) throw std::invalid_argument("TruncatedOpticalState: negative cutoff");
    amps_ = Amplitudes::Zero(cutoff + 1, modes == 1 ? 1 : cutoff + 1);
    amps_(0, 0) = Complex(1);
  }

  /// Takes ownership of explicit amplitudes; entries beyond the cutoff must be zero.
  TruncatedOpticalState(Amplitudes amps, int cutoff) : amps_(std::move(amps)), cutoff_(cutoff) {
    if (amps_.rows() != cutoff + 1 || (amps_.cols() != 1 && amps_.cols() != cutoff + 1))
      throw std::invalid_argument("TruncatedOpticalState: amplitude shape does not match cutoff");
  }

  int modes() const { return amps_.cols() == 1 ? 1 : 2; }
  int cutoff() const { return cutoff_; }
  const Amplitudes& amplitudes() const { return amps_; }
  Amplitudes& amplitudes() { return amps_; }

  Complex operator()(int n0, int n1 = 0) const { return amps_(n0, n1); }
  Complex& operator()(int n0, int n1 = 0) { return amps_(n0, n1); }

  Scalar squared_norm() const { return amps_.squaredNorm(); }

  /// Photon-number distribution of one mode, marginalized over the other.
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> photon_distribution(int mode) const {
    check_mode(mode);
    const auto probs = amps_.cwiseAbs2();
    if (mode == 0) return probs.rowwise().sum();
    return probs.colwise().sum().transpose();
  }

  Scalar mean_photons(int mode) const {
    const auto dist = photon_distribution(mode);
    Scalar mean = 0;
    for (Eigen::Index n = 0; n < dist.size(); ++n) mean += Scalar(n) * dist(n);
    return mean;
  }

  void check_mode(int mode) const {
    if (mode < 0 || mode >= modes())
      throw std::out_of_range("mode index " + std::to_string(mode) + " out of range for " +
                              std::to_string(modes()) + "-mode state");
  }

 private:
  Amplitudes amps_;
  int cutoff_ = 0;
};

/// Pure single-mode coherent state e^{-|a|^2/2} a^n / sqrt(n!) truncated at n_max.
/// Throws TruncationError if the discarded Poisson tail exceeds kMaxTailMass.
template <std::floating_point Scalar>
TruncatedOpticalState<Scalar> coherent_fock(std::complex<Scalar> alpha, int n_max) {
  const Scalar mean = std::norm(alpha);
  const Scalar tail = poisson_tail(mean, n_max);
  if (tail > Scalar(kMaxTailMass))
    throw TruncationError("coherent_fock: cutoff " + std::to_string(n_max) + " leaves tail mass " +
                          std::to_string(tail) + " for |alpha|^2 = " + std::to_string(mean));
  TruncatedOpticalState<Scalar> state(1, n_max);
  state(0) = std::complex<Scalar>(std::exp(-mean / 2));
  for (int n = 1; n <= n_max; ++n) state(n) = state(n - 1) * alpha / std::sqrt(Scalar(n));
  return state;
}

/// |a>|b> as a two-mode state; the joint cutoff is the sum of both cutoffs.
template <std::floating_point Scalar>
TruncatedOpticalState<Scalar> tensor(const TruncatedOpticalState<Scalar>& a, const TruncatedOpticalState<Scalar>& b) {
  if (a.modes() != 1 || b.modes() != 1) throw std::invalid_argument("tensor: single-mode factors expected");
  const int cutoff = a.cutoff() + b.cutoff();
  typename TruncatedOpticalState<Scalar>::Amplitudes amps =
      TruncatedOpticalState<Scalar>::Amplitudes::Zero(cutoff + 1, cutoff + 1);
  amps.topLeftCorner(a.cutoff() + 1, b.cutoff() + 1) = a.amplitudes() * b.amplitudes().transpose();
  return TruncatedOpticalState<Scalar>(std::move(amps), cutoff);
}

/// Two-mode beamsplitter acting on creation operators as
///   a_i^dag -> t a_i^dag + r a_j^dag,   a_j^dag -> r a_i^dag - t a_j^dag,
/// with t = sqrt(T), r = sqrt(1 - T). At T = 1/2 the outputs are
/// c = (a + b)/sqrt(2) on mode i and d = (a - b)/sqrt(2) on mode j.
///
/// The transformation conserves total photon number, so it is stored as one
/// real orthogonal block per photon number N <= cutoff. Block column n is the
/// image of |n, N - n>, built by repeated application of the output creation
/// operators to vacuum.
template <std::floating_point Scalar>
class Beamsplitter {
 public:
  using Block = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Beamsplitter(Scalar transmittance, int cutoff) : transmittance_(transmittance), cutoff_(cutoff) {
    if (!(transmittance >= 0 && transmittance <= 1))
      throw std::invalid_argument("Beamsplitter: transmittance outside [0, 1]");
    const Scalar t = std::sqrt(transmittance);
    const Scalar r = std::sqrt(1 - transmittance);
    blocks_.reserve(cutoff + 1);
    blocks_.push_back(Block::Ones(1, 1));
    for (int total = 1; total <= cutoff; ++total) {
      const Block& prev = blocks_.back();
      Block block = Block::Zero(total + 1, total + 1);
      // Column n holds |n, total - n>. n = 0 raises mode j, others raise mode i.
      for (int n = 0; n <= total; ++n) {
        const bool raise_i = n > 0;
        const int src = raise_i ? n - 1 : 0;  // source column in the previous block
        const Scalar norm = 1 / std::sqrt(Scalar(raise_i ? n : total));
        const Scalar ci = raise_i ? t : r;    // coefficient on output mode i
        const Scalar cj = raise_i ? r : -t;   // coefficient on output mode j
        for (int p = 0; p < total; ++p) {
          // prev row p is |p, total-1-p>; raise output mode i -> |p+1, .>, mode j -> |p, .+1>.
          const Scalar amp = prev(p, src) * norm;
          if (amp == 0) continue;
          block(p + 1, n) += amp * ci * std::sqrt(Scalar(p + 1));
          block(p, n) += amp * cj * std::sqrt(Scalar(total - p));
        }
      }
      blocks_.push_back(std::move(block));
    }
  }

  Scalar transmittance() const { return transmittance_; }
  int cutoff() const { return cutoff_; }
  const Block& block(int total) const { return blocks_.at(total); }

  /// Applies the transformation with mode_i -> mode 0 or 1 of a two-mode state.
  void apply(TruncatedOpticalState<Scalar>& state, int mode_i, int mode_j) const {
    if (state.modes() != 2) throw std::out_of_range("Beamsplitter: two-mode state required");
    state.check_mode(mode_i);
    state.check_mode(mode_j);
    if (mode_i == mode_j) throw std::out_of_range("Beamsplitter: modes must differ");
    if (state.cutoff() > cutoff_) throw std::invalid_argument("Beamsplitter: state cutoff exceeds beamsplitter cutoff");

    const bool swapped = mode_i == 1;
    auto& amps = state.amplitudes();
    using CVec = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
    for (int total = 0; total <= state.cutoff(); ++total) {
      CVec in(total + 1);
      for (int n = 0; n <= total; ++n) in(n) = swapped ? amps(total - n, n) : amps(n, total - n);
      const CVec out = blocks_[total] * in;
      for (int n = 0; n <= total; ++n) {
        if (swapped)
          amps(total - n, n) = out(n);
        else
          amps(n, total - n) = out(n);
      }
    }
  }

 private:
  Scalar transmittance_;
  int cutoff_;
  std::vector<Block> blocks_;
};

/// One-shot beamsplitter application; build a Beamsplitter to reuse the blocks.
template <std::floating_point Scalar>
TruncatedOpticalState<Scalar> beamsplitter_apply(TruncatedOpticalState<Scalar> state, int mode_i, int mode_j,
                                                 Scalar transmittance) {
  if (state.modes() != 2) throw std::out_of_range("beamsplitter_apply: two-mode state required");
  Beamsplitter<Scalar>(transmittance, state.cutoff()).apply(state, mode_i, mode_j);
  return state;
}

/// Phase rotation exp(i n delta0) on one mode.
template <std::floating_point Scalar>
TruncatedOpticalState<Scalar> misalignment_rotate(TruncatedOpticalState<Scalar> state, int mode, Scalar delta0) {
  state.check_mode(mode);
  auto& amps = state.amplitudes();
  for (int n = 0; n <= state.cutoff(); ++n) {
    const std::complex<Scalar> phase = std::polar(Scalar(1), delta0 * Scalar(n));
    if (mode == 0)
      amps.row(n) *= phase;
    else if (n < amps.cols())
      amps.col(n) *= phase;
  }
  return state;
}

/// Phase drift that produces misalignment error e_d = (1 - cos delta0) / 2.
template <std::floating_point Scalar>
Scalar misalignment_phase(Scalar e_d) {
  return std::acos(1 - 2 * e_d);
}

/// Mixed state written as a sum of unnormalized pure components,
/// rho = sum_k |psi_k><psi_k|.
template <std::floating_point Scalar>
using OpticalEnsemble = std::vector<TruncatedOpticalState<Scalar>>;

/// Traces out mode 1 of a two-mode pure state. The reduced state of mode 0 is
/// returned as its spectral components; components with weight below
/// `weight_floor` are dropped.
template <std::floating_point Scalar>
OpticalEnsemble<Scalar> trace_out_mode1(const TruncatedOpticalState<Scalar>& state, Scalar weight_floor = Scalar(1e-30)) {
  if (state.modes() != 2) throw std::invalid_argument("trace_out_mode1: two-mode state required");
  using Amplitudes = typename TruncatedOpticalState<Scalar>::Amplitudes;
  Eigen::JacobiSVD<Amplitudes> svd(state.amplitudes(), Eigen::ComputeThinU);
  OpticalEnsemble<Scalar> out;
  const auto& sigma = svd.singularValues();
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    if (sigma(k) * sigma(k) < weight_floor) break;  // singular values are sorted
    Amplitudes column = svd.matrixU().col(k) * std::complex<Scalar>(sigma(k));
    out.emplace_back(std::move(column), state.cutoff());
  }
  return out;
}

/// Pure loss: couples a single-mode state to a vacuum environment through a
/// beamsplitter of transmittance eta and traces the environment.
template <std::floating_point Scalar>
OpticalEnsemble<Scalar> apply_loss(const TruncatedOpticalState<Scalar>& state, Scalar eta) {
  if (state.modes() != 1) throw std::invalid_argument("apply_loss: single-mode state required");
  typename TruncatedOpticalState<Scalar>::Amplitudes amps =
      TruncatedOpticalState<Scalar>::Amplitudes::Zero(state.cutoff() + 1, state.cutoff() + 1);
  amps.col(0) = state.amplitudes().col(0);
  TruncatedOpticalState<Scalar> joint(std::move(amps), state.cutoff());
  Beamsplitter<Scalar>(eta, state.cutoff()).apply(joint, 0, 1);
  return trace_out_mode1(joint);
}

enum class Herald { D1Only = 0, D2Only = 1, None = 2, Both = 3 };

template <std::floating_point Scalar>
struct HeraldOutcome {
  Herald which;
  Scalar probability;
};

/// Vacuum probabilities of the two detector modes: P(n0 = 0), P(n1 = 0) and
/// P(n0 = 0, n1 = 0). Linear in the state, so ensembles simply add.
template <std::floating_point Scalar>
struct VacuumProbabilities {
  Scalar mode0 = 0;
  Scalar mode1 = 0;
  Scalar both = 0;

  VacuumProbabilities& operator+=(const VacuumProbabilities& other) {
    mode0 += other.mode0;
    mode1 += other.mode1;
    both += other.both;
    return *this;
  }
};

template <std::floating_point Scalar>
VacuumProbabilities<Scalar> vacuum_probabilities(const TruncatedOpticalState<Scalar>& state) {
  if (state.modes() != 2) throw std::invalid_argument("vacuum_probabilities: two-mode state required");
  const auto& amps = state.amplitudes();
  return {amps.row(0).squaredNorm(), amps.col(0).squaredNorm(), std::norm(amps(0, 0))};
}

/// Click statistics of two threshold detectors with independent dark counts,
/// D1 on mode 0 and D2 on mode 1. Indexed by Herald.
template <std::floating_point Scalar>
std::array<HeraldOutcome<Scalar>, 4> threshold_detect(const VacuumProbabilities<Scalar>& vac, Scalar p_d) {
  const Scalar quiet = 1 - p_d;
  const Scalar none = quiet * quiet * vac.both;
  const Scalar d1 = quiet * vac.mode1 - none;
  const Scalar d2 = quiet * vac.mode0 - none;
  return {{{Herald::D1Only, d1}, {Herald::D2Only, d2}, {Herald::None, none}, {Herald::Both, 1 - d1 - d2 - none}}};
}

template <std::floating_point Scalar>
std::array<HeraldOutcome<Scalar>, 4> threshold_detect(const TruncatedOpticalState<Scalar>& state, Scalar p_d) {
  return threshold_detect(vacuum_probabilities(state), p_d);
}

}  // namespace ecsqkd
