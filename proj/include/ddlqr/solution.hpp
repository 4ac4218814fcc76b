#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "ddlqr/linalg.hpp"

namespace ddlqr {

/// Data-driven LQR formulations.
enum class Variant {
  indirect_ce,         // least-squares identification, then Riccati on (A_hat, B_hat)
  compact,             // LMI program on X1 W0^+ [K; I], cross-checked against Riccati
  direct_plain,        // data LMIs with D0 disregarded, G unconstrained
  direct_orthogonal,   // data LMIs plus Pi Y = 0
  direct_regularized,  // data LMIs plus lambda ||Pi Y|| + rho trace(G P G')
  direct_ideal,        // data LMIs with X1 - D0 (needs the disturbance record)
};

enum class NormKind { frobenius, spectral };

struct Method {
  Variant variant = Variant::indirect_ce;
  double lambda = 0.0;  // certainty-equivalence penalty weight
  double rho = 0.0;     // robustness-promoting trace(G P G') weight
  NormKind norm = NormKind::frobenius;
  bool zero_gain = false;  // add K = 0 (open-loop certification)

  static Method indirect() { return {}; }
  static Method of(Variant v) { return Method{v}; }
  static Method regularized(double lambda, double rho = 0.0, NormKind norm = NormKind::frobenius) {
    return Method{Variant::direct_regularized, lambda, rho, norm};
  }

  /// Throws InvalidInput on negative weights.
  void validate() const;
};

std::string_view to_string(Variant v);
std::string_view to_string(NormKind k);
Variant parse_variant(std::string_view s);
NormKind parse_norm_kind(std::string_view s);

enum class LqrStatus { optimal, numerical_failure };
std::string_view to_string(LqrStatus s);

/// Output of every synthesis route. Data-dependent fields (Y, G) are empty
/// matrices for the purely model-based route.
struct LqrSolution {
  Matrix K;  // m x n
  Matrix P;  // n x n, equals X0 Y for the data routes
  Matrix X;  // m x m epigraph slack for trace(K'RKP)
  Matrix Y;  // T x n
  Matrix G;  // T x n, Y P^-1
  double objective = 0.0;
  LqrStatus status = LqrStatus::optimal;
  std::optional<Method> method;
  std::string note;  // failure detail when status != optimal

  // Compact route: relative Frobenius gap between LMI and Riccati gains.
  std::optional<double> route_discrepancy;
  int solver_iterations = 0;
};

}  // namespace ddlqr
