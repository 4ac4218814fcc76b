#include <algorithm>
#include <string>

#include "ddlqr/error.hpp"
#include "ddlqr/sdp.hpp"

namespace ddlqr::sdp {

AffineExpr AffineExpr::variable(int index, double coef) {
  AffineExpr e;
  e.terms_.push_back({index, coef});
  return e;
}

AffineExpr& AffineExpr::add_term(int var, double coef) {
  terms_.push_back({var, coef});
  return *this;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& other) {
  constant_ += other.constant_;
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  compress();
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& other) {
  constant_ -= other.constant_;
  for (const LinearTerm& t : other.terms_) terms_.push_back({t.var, -t.coef});
  compress();
  return *this;
}

AffineExpr& AffineExpr::operator*=(double s) {
  constant_ *= s;
  for (LinearTerm& t : terms_) t.coef *= s;
  compress();
  return *this;
}

void AffineExpr::compress() {
  if (terms_.size() > 1) {
    std::sort(terms_.begin(), terms_.end(),
              [](const LinearTerm& a, const LinearTerm& b) { return a.var < b.var; });
    std::size_t out = 0;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (out > 0 && terms_[out - 1].var == terms_[i].var) {
        terms_[out - 1].coef += terms_[i].coef;
      } else {
        terms_[out++] = terms_[i];
      }
    }
    terms_.resize(out);
  }
  terms_.erase(std::remove_if(terms_.begin(), terms_.end(),
                              [](const LinearTerm& t) { return t.coef == 0.0; }),
               terms_.end());
}

double AffineExpr::evaluate(const Vector& values) const {
  double v = constant_;
  for (const LinearTerm& t : terms_) v += t.coef * values(t.var);
  return v;
}

int AffineExpr::max_variable() const {
  int m = -1;
  for (const LinearTerm& t : terms_) m = std::max(m, t.var);
  return m;
}

AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
AffineExpr operator-(AffineExpr a) { return a *= -1.0; }
AffineExpr operator*(double s, AffineExpr a) { return a *= s; }

AffineMatrix::AffineMatrix(Eigen::Index rows, Eigen::Index cols)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols)) {}

AffineMatrix AffineMatrix::constant(const Matrix& m) {
  AffineMatrix out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) out(i, j) = AffineExpr(m(i, j));
  return out;
}

AffineMatrix AffineMatrix::transpose() const {
  AffineMatrix out(cols_, rows_);
  for (Eigen::Index j = 0; j < cols_; ++j)
    for (Eigen::Index i = 0; i < rows_; ++i) out(j, i) = (*this)(i, j);
  return out;
}

AffineMatrix AffineMatrix::block(Eigen::Index i, Eigen::Index j, Eigen::Index r, Eigen::Index c) const {
  if (i < 0 || j < 0 || i + r > rows_ || j + c > cols_) {
    throw InvalidInput("AffineMatrix::block out of range");
  }
  AffineMatrix out(r, c);
  for (Eigen::Index jj = 0; jj < c; ++jj)
    for (Eigen::Index ii = 0; ii < r; ++ii) out(ii, jj) = (*this)(i + ii, j + jj);
  return out;
}

AffineExpr AffineMatrix::trace() const {
  AffineExpr t;
  for (Eigen::Index i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

std::vector<AffineExpr> AffineMatrix::vec() const { return data_; }

AffineMatrix AffineMatrix::symmetric_part() const {
  if (rows_ != cols_) throw InvalidInput("symmetric_part: matrix must be square");
  AffineMatrix out(rows_, cols_);
  for (Eigen::Index j = 0; j < cols_; ++j) {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      out(i, j) = 0.5 * ((*this)(i, j) + (*this)(j, i));
    }
  }
  return out;
}

Matrix AffineMatrix::evaluate(const Vector& values) const {
  Matrix out(rows_, cols_);
  for (Eigen::Index j = 0; j < cols_; ++j)
    for (Eigen::Index i = 0; i < rows_; ++i) out(i, j) = (*this)(i, j).evaluate(values);
  return out;
}

AffineMatrix& AffineMatrix::operator+=(const AffineMatrix& o) {
  if (o.rows_ != rows_ || o.cols_ != cols_) throw InvalidInput("AffineMatrix: size mismatch in +");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

AffineMatrix& AffineMatrix::operator-=(const AffineMatrix& o) {
  if (o.rows_ != rows_ || o.cols_ != cols_) throw InvalidInput("AffineMatrix: size mismatch in -");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

AffineMatrix AffineMatrix::blocks(const AffineMatrix& a, const AffineMatrix& b,
                                  const AffineMatrix& c, const AffineMatrix& d) {
  if (a.rows() != b.rows() || c.rows() != d.rows() || a.cols() != c.cols() || b.cols() != d.cols()) {
    throw InvalidInput("AffineMatrix::blocks: incompatible block sizes");
  }
  AffineMatrix out(a.rows() + c.rows(), a.cols() + b.cols());
  auto place = [&out](const AffineMatrix& src, Eigen::Index r0, Eigen::Index c0) {
    for (Eigen::Index j = 0; j < src.cols(); ++j)
      for (Eigen::Index i = 0; i < src.rows(); ++i) out(r0 + i, c0 + j) = src(i, j);
  };
  place(a, 0, 0);
  place(b, 0, a.cols());
  place(c, a.rows(), 0);
  place(d, a.rows(), a.cols());
  return out;
}

AffineMatrix operator+(AffineMatrix a, const AffineMatrix& b) { return a += b; }
AffineMatrix operator-(AffineMatrix a, const AffineMatrix& b) { return a -= b; }

AffineMatrix operator*(const Matrix& c, const AffineMatrix& m) {
  if (c.cols() != m.rows()) throw InvalidInput("Matrix * AffineMatrix: inner dimensions differ");
  AffineMatrix out(c.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      AffineExpr acc;
      double constant = 0.0;
      for (Eigen::Index k = 0; k < c.cols(); ++k) {
        const double ck = c(i, k);
        if (ck == 0.0) continue;
        const AffineExpr& e = m(k, j);
        constant += ck * e.constant();
        for (const LinearTerm& t : e.terms()) acc.add_term(t.var, ck * t.coef);
      }
      acc += AffineExpr(constant);
      out(i, j) = std::move(acc);
    }
  }
  return out;
}

AffineMatrix operator*(const AffineMatrix& m, const Matrix& c) {
  return (c.transpose() * m.transpose()).transpose();
}

AffineMatrix operator*(double s, AffineMatrix m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) *= s;
  return m;
}

}  // namespace ddlqr::sdp
