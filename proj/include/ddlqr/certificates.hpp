#pragma once

#include <optional>
#include <vector>

#include "ddlqr/data.hpp"
#include "ddlqr/solution.hpp"
#include "ddlqr/system.hpp"

namespace ddlqr {

/// Values of eta tried when reporting the smallest passing certificate.
const std::vector<double>& eta_scan();

/// Slack allowed on Theta + I <= 0, which every synthesized (P, G) satisfies
/// up to solver accuracy.
inline constexpr double kThetaTolerance = 1e-6;

struct FeasibilityCheck {
  Matrix Psi_star;           // Psi at G* = W0^+ [K*; I], P* = Gramian of the optimal loop
  double margin = 0.0;       // 1 - lambda_max(-Psi*)
  std::optional<double> eta2;  // smallest eta in eta_scan() with -Psi* <= (1 - 1/eta) I

  [[nodiscard]] bool holds(double eta2) const;
};

/// Noise-aware quantities for a solution's (P, G):
///   M = G P G',  Theta = X1 M X1' - P,  Psi = D0 M D0' - X1 M D0' - D0 M X1'.
struct Certificates {
  Matrix M;
  Matrix Theta;
  Matrix Psi;
  double eta1_margin = 0.0;   // 1 - lambda_max(Psi)
  double theta_slack = 0.0;   // lambda_max(Theta + I)
  double m_norm = 0.0;        // ||M||_2
  double x1m_norm = 0.0;      // ||X1 M||_2
  std::optional<double> eta1;  // smallest eta in eta_scan() passing lemma1_holds

  // Present when the true plant was supplied.
  std::optional<FeasibilityCheck> feasibility;

  /// Psi <= (1 - 1/eta1) I together with Theta + I <= 0 (within
  /// kThetaTolerance). Sufficient for the true closed loop to be Schur.
  [[nodiscard]] bool lemma1_holds(double eta1) const;

  /// delta^2 ||M|| + 2 delta ||X1 M|| <= 1 - 1/eta1 together with Theta + I <= 0.
  [[nodiscard]] bool delta_test(double delta, double eta1) const;
};

/// Needs the disturbance record (OracleRequired otherwise) and a solution
/// carrying P and G. Pass the true plant to also evaluate the feasibility
/// condition at the optimal gain.
Certificates certificates(const LqrSolution& sol, const Dataset& ds, const LtiSystem* truth = nullptr,
                          const LqrWeights* weights = nullptr);

/// Data-only stability test with a known noise bound ||D0||_2 <= delta.
/// InvalidInput for eta1 < 1, negative delta, or (when D0 is present)
/// delta < ||D0||_2. With D0 present a passing test is cross-checked against
/// lemma1_holds; a mismatch raises NumericalFailure.
bool stability_test(const LqrSolution& sol, const Dataset& ds, double delta, double eta1);

}  // namespace ddlqr
