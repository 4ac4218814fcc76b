#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ddlqr/linalg.hpp"

// Symmetric-cone programs over a flat vector of scalar decision variables:
//
//   minimize    c(v)
//   subject to  S_k(v) PSD          for every psd block
//               t_j(v) >= ||u_j(v)|| for every second-order cone
//               e_i(v) = 0          for every equality
//
// where c, S_k, t_j, u_j, e_i are affine in v.
namespace ddlqr::sdp {

struct LinearTerm {
  int var;
  double coef;
};

class AffineExpr {
 public:
  AffineExpr() = default;
  AffineExpr(double constant) : constant_(constant) {}  // NOLINT(google-explicit-constructor)

  static AffineExpr variable(int index, double coef = 1.0);

  [[nodiscard]] double constant() const { return constant_; }
  [[nodiscard]] const std::vector<LinearTerm>& terms() const { return terms_; }
  [[nodiscard]] bool is_constant() const { return terms_.empty(); }

  AffineExpr& operator+=(const AffineExpr& other);
  AffineExpr& operator-=(const AffineExpr& other);
  AffineExpr& operator*=(double s);
  AffineExpr& add_term(int var, double coef);

  /// Merges duplicate variables and drops zero coefficients.
  void compress();

  [[nodiscard]] double evaluate(const Vector& values) const;
  [[nodiscard]] int max_variable() const;

 private:
  double constant_ = 0.0;
  std::vector<LinearTerm> terms_;
};

AffineExpr operator+(AffineExpr a, const AffineExpr& b);
AffineExpr operator-(AffineExpr a, const AffineExpr& b);
AffineExpr operator-(AffineExpr a);
AffineExpr operator*(double s, AffineExpr a);

/// Dense matrix of affine expressions; the building block for LMIs.
class AffineMatrix {
 public:
  AffineMatrix() = default;
  AffineMatrix(Eigen::Index rows, Eigen::Index cols);

  static AffineMatrix constant(const Matrix& m);

  [[nodiscard]] Eigen::Index rows() const { return rows_; }
  [[nodiscard]] Eigen::Index cols() const { return cols_; }

  AffineExpr& operator()(Eigen::Index i, Eigen::Index j) { return data_[index(i, j)]; }
  const AffineExpr& operator()(Eigen::Index i, Eigen::Index j) const { return data_[index(i, j)]; }

  [[nodiscard]] AffineMatrix transpose() const;
  [[nodiscard]] AffineMatrix block(Eigen::Index i, Eigen::Index j, Eigen::Index r, Eigen::Index c) const;
  [[nodiscard]] AffineExpr trace() const;
  /// Column-major list of entries.
  [[nodiscard]] std::vector<AffineExpr> vec() const;
  /// (M + M') / 2.
  [[nodiscard]] AffineMatrix symmetric_part() const;
  [[nodiscard]] Matrix evaluate(const Vector& values) const;

  AffineMatrix& operator+=(const AffineMatrix& o);
  AffineMatrix& operator-=(const AffineMatrix& o);

  /// [[a, b], [c, d]] block assembly; row/column sizes must agree.
  static AffineMatrix blocks(const AffineMatrix& a, const AffineMatrix& b,
                             const AffineMatrix& c, const AffineMatrix& d);

 private:
  [[nodiscard]] std::size_t index(Eigen::Index i, Eigen::Index j) const {
    return static_cast<std::size_t>(j * rows_ + i);
  }
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::vector<AffineExpr> data_;
};

AffineMatrix operator+(AffineMatrix a, const AffineMatrix& b);
AffineMatrix operator-(AffineMatrix a, const AffineMatrix& b);
AffineMatrix operator*(const Matrix& c, const AffineMatrix& m);
AffineMatrix operator*(const AffineMatrix& m, const Matrix& c);
AffineMatrix operator*(double s, AffineMatrix m);

struct SocConstraint {
  AffineExpr t;
  std::vector<AffineExpr> u;
};

class ConicProgram {
 public:
  int add_variable();
  /// rows x cols block of fresh variables.
  AffineMatrix add_matrix_variable(Eigen::Index rows, Eigen::Index cols);
  /// n x n symmetric matrix backed by n(n+1)/2 fresh variables.
  AffineMatrix add_symmetric_variable(Eigen::Index n);

  void set_objective(AffineExpr objective);
  /// Throws InvalidInput unless the block is square and symmetric term by term.
  void add_psd(AffineMatrix block);
  void add_soc(AffineExpr t, std::vector<AffineExpr> u);
  void add_equality(AffineExpr e);
  void add_equality(const AffineMatrix& m);

  [[nodiscard]] int num_variables() const { return num_vars_; }
  [[nodiscard]] const AffineExpr& objective() const { return objective_; }
  [[nodiscard]] const std::vector<AffineMatrix>& psd_blocks() const { return psd_; }
  [[nodiscard]] const std::vector<SocConstraint>& soc_constraints() const { return soc_; }
  [[nodiscard]] const std::vector<AffineExpr>& equalities() const { return eq_; }

 private:
  void check_vars(const AffineExpr& e) const;

  int num_vars_ = 0;
  AffineExpr objective_;
  std::vector<AffineMatrix> psd_;
  std::vector<SocConstraint> soc_;
  std::vector<AffineExpr> eq_;
};

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure };
std::string_view to_string(SolveStatus s);

struct Residuals {
  double equality = 0.0;       // max |e_i(v)|
  double psd_violation = 0.0;  // max over blocks of max(0, -lambda_min(S_k(v)))
  double soc_violation = 0.0;  // max over cones of max(0, ||u_j(v)|| - t_j(v))

  [[nodiscard]] double worst() const;
};

/// Residual bound an optimal solution must meet.
inline constexpr double kCertificateTolerance = 1e-7;

struct SolverOptions {
  double tol = 1e-8;  // primal/dual feasibility and relative gap
  int max_iterations = 100;
};

struct ConicSolution {
  Vector values;
  double objective = 0.0;
  SolveStatus status = SolveStatus::numerical_failure;
  Residuals residuals;
  int iterations = 0;
  std::string detail;
};

/// Re-evaluates every constraint at `values` from the program data, using
/// symmetric eigenvalues for the PSD blocks. Independent of the solver.
Residuals measure_residuals(const ConicProgram& p, const Vector& values);

/// Homogeneous primal-dual interior point method with Nesterov-Todd scaling.
/// Equalities are eliminated up front; status optimal is only reported when
/// measure_residuals confirms every bound at kCertificateTolerance.
ConicSolution solve(const ConicProgram& p, const SolverOptions& opts = {});

/// Sparse triplet dump: one "row var coef" line per nonzero, var = -1 for the
/// constant. Row 0 is the objective; comment lines describe the row layout.
std::string to_triplets(const ConicProgram& p);

}  // namespace ddlqr::sdp
