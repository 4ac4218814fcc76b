#pragma once

#include <cstdint>
#include <optional>

#include "ddlqr/linalg.hpp"

namespace ddlqr {

class LtiSystem;

enum class NoiseKind { gaussian_iid, uniform_iid, zero };

/// Excitation or disturbance description. scale is the standard deviation for
/// gaussian_iid and the half-width for uniform_iid; ignored for zero.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::zero;
  double scale = 0.0;
  std::uint64_t seed = 0;

  static NoiseSpec gaussian(double scale, std::uint64_t seed) {
    return {NoiseKind::gaussian_iid, scale, seed};
  }
  static NoiseSpec uniform(double half_width, std::uint64_t seed) {
    return {NoiseKind::uniform_iid, half_width, seed};
  }
  static NoiseSpec none() { return {}; }

  void validate() const;
  bool operator==(const NoiseSpec&) const = default;
};

// Generation record kept alongside a simulated dataset (JSON sidecar).
struct DatasetOrigin {
  std::uint64_t seed = 0;
  NoiseSpec input;
  NoiseSpec noise;
  bool operator==(const DatasetOrigin&) const = default;
};

/// One experiment: columns are time samples k = 0..T-1.
struct Dataset {
  Matrix U0;                 // m x T
  Matrix X0;                 // n x T
  Matrix X1;                 // n x T
  std::optional<Matrix> D0;  // n x T, disturbance oracle
  std::optional<DatasetOrigin> origin;

  [[nodiscard]] Eigen::Index n() const { return X0.rows(); }
  [[nodiscard]] Eigen::Index m() const { return U0.rows(); }
  [[nodiscard]] Eigen::Index T() const { return X0.cols(); }

  /// Throws InvalidInput when the column counts disagree or entries are not finite.
  void validate() const;
};

struct DerivedData {
  Matrix W0;       // (m+n) x T, [U0; X0]
  Matrix W0_pinv;  // T x (m+n)
  Matrix Pi;       // T x T, I - W0^+ W0
  Eigen::Index rank = 0;
  bool identifiable = false;
  // sigma_min(W0) / sigma_max(D0); +inf for D0 == 0, 0 when not identifiable.
  std::optional<double> snr;
};

DerivedData derive(const Dataset& ds);

/// SNR in decibels, 10*log10(snr); +inf / -inf at the extremes.
double snr_decibels(double snr);

/// Ordinary least squares [B_hat A_hat] = X1 W0^+. Throws NotIdentifiable.
LtiSystem least_squares_id(const Dataset& ds);

}  // namespace ddlqr
