#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "ddlqr/error.hpp"
#include "ddlqr/sdp.hpp"

namespace ddlqr::sdp {

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "numerical_failure";
}

double Residuals::worst() const { return std::max({equality, psd_violation, soc_violation}); }

int ConicProgram::add_variable() { return num_vars_++; }

AffineMatrix ConicProgram::add_matrix_variable(Eigen::Index rows, Eigen::Index cols) {
  AffineMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = AffineExpr::variable(add_variable());
  return m;
}

AffineMatrix ConicProgram::add_symmetric_variable(Eigen::Index n) {
  AffineMatrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      m(i, j) = AffineExpr::variable(add_variable());
      m(j, i) = m(i, j);
    }
  }
  return m;
}

void ConicProgram::check_vars(const AffineExpr& e) const {
  for (const LinearTerm& t : e.terms()) {
    if (t.var < 0 || t.var >= num_vars_) {
      throw InvalidInput("ConicProgram: expression references undeclared variable " +
                         std::to_string(t.var));
    }
    if (!std::isfinite(t.coef)) throw InvalidInput("ConicProgram: non-finite coefficient");
  }
  if (!std::isfinite(e.constant())) throw InvalidInput("ConicProgram: non-finite constant");
}

void ConicProgram::set_objective(AffineExpr objective) {
  objective.compress();
  check_vars(objective);
  objective_ = std::move(objective);
}

namespace {

bool same_expr(const AffineExpr& a, const AffineExpr& b) {
  auto close = [](double x, double y) {
    return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
  };
  if (!close(a.constant(), b.constant())) return false;
  if (a.terms().size() != b.terms().size()) return false;
  for (std::size_t k = 0; k < a.terms().size(); ++k) {
    if (a.terms()[k].var != b.terms()[k].var || !close(a.terms()[k].coef, b.terms()[k].coef)) {
      return false;
    }
  }
  return true;
}

}  // namespace

void ConicProgram::add_psd(AffineMatrix block) {
  if (block.rows() < 1 || block.rows() != block.cols()) {
    throw InvalidInput("add_psd: block must be square and nonempty");
  }
  for (Eigen::Index j = 0; j < block.cols(); ++j) {
    for (Eigen::Index i = 0; i < block.rows(); ++i) {
      block(i, j).compress();
      check_vars(block(i, j));
    }
  }
  for (Eigen::Index j = 0; j < block.cols(); ++j) {
    for (Eigen::Index i = j + 1; i < block.rows(); ++i) {
      if (!same_expr(block(i, j), block(j, i))) {
        throw InvalidInput("add_psd: block is not symmetric at (" + std::to_string(i) + "," +
                           std::to_string(j) + ")");
      }
      block(j, i) = block(i, j);
    }
  }
  psd_.push_back(std::move(block));
}

void ConicProgram::add_soc(AffineExpr t, std::vector<AffineExpr> u) {
  t.compress();
  check_vars(t);
  for (AffineExpr& e : u) {
    e.compress();
    check_vars(e);
  }
  soc_.push_back(SocConstraint{std::move(t), std::move(u)});
}

void ConicProgram::add_equality(AffineExpr e) {
  e.compress();
  check_vars(e);
  if (e.is_constant()) {
    if (std::abs(e.constant()) > 0.0) throw InvalidInput("add_equality: constant nonzero equality");
    return;
  }
  eq_.push_back(std::move(e));
}

void ConicProgram::add_equality(const AffineMatrix& m) {
  for (const AffineExpr& e : m.vec()) add_equality(e);
}

Residuals measure_residuals(const ConicProgram& p, const Vector& values) {
  if (values.size() != p.num_variables()) {
    throw InvalidInput("measure_residuals: value vector has the wrong length");
  }
  Residuals r;
  for (const AffineExpr& e : p.equalities()) {
    r.equality = std::max(r.equality, std::abs(e.evaluate(values)));
  }
  for (const AffineMatrix& block : p.psd_blocks()) {
    const Matrix s = block.evaluate(values);
    r.psd_violation = std::max(r.psd_violation, -linalg::min_eigenvalue_symmetric(s));
  }
  for (const SocConstraint& c : p.soc_constraints()) {
    double sq = 0.0;
    for (const AffineExpr& e : c.u) sq += std::pow(e.evaluate(values), 2);
    r.soc_violation = std::max(r.soc_violation, std::sqrt(sq) - c.t.evaluate(values));
  }
  if (!std::isfinite(r.equality) || !std::isfinite(r.psd_violation) || !std::isfinite(r.soc_violation)) {
    r.equality = r.psd_violation = r.soc_violation = std::numeric_limits<double>::infinity();
  }
  return r;
}

std::string to_triplets(const ConicProgram& p) {
  std::ostringstream out;
  out.precision(17);
  int row = 0;
  auto emit = [&](const AffineExpr& e) {
    if (e.constant() != 0.0) out << row << ' ' << -1 << ' ' << e.constant() << '\n';
    for (const LinearTerm& t : e.terms()) out << row << ' ' << t.var << ' ' << t.coef << '\n';
    ++row;
  };
  out << "# variables " << p.num_variables() << '\n';
  out << "# objective row 0\n";
  emit(p.objective());
  if (!p.equalities().empty()) {
    out << "# equality rows " << row << ".." << row + static_cast<int>(p.equalities().size()) - 1 << '\n';
  }
  for (const AffineExpr& e : p.equalities()) emit(e);
  for (std::size_t b = 0; b < p.psd_blocks().size(); ++b) {
    const AffineMatrix& m = p.psd_blocks()[b];
    const auto k = static_cast<int>(m.rows());
    out << "# psd block " << b << " size " << k << " rows " << row << ".." << row + k * (k + 1) / 2 - 1
        << " (lower triangle, column major)\n";
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = j; i < m.rows(); ++i) emit(m(i, j));
  }
  for (std::size_t c = 0; c < p.soc_constraints().size(); ++c) {
    const SocConstraint& s = p.soc_constraints()[c];
    out << "# soc " << c << " size " << s.u.size() + 1 << " rows " << row << ".."
        << row + static_cast<int>(s.u.size()) << " (t first)\n";
    emit(s.t);
    for (const AffineExpr& e : s.u) emit(e);
  }
  return out.str();
}

}  // namespace ddlqr::sdp
