#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace qpvlab {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Default tolerance for Hermiticity, positivity and normalization checks.
inline constexpr double kTolerance = 1e-9;

/// Dense row-major complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const double> diag);
  /// |a><b|
  static ComplexMatrix outer(std::span<const Complex> a, std::span<const Complex> b);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const Complex> data() const { return data_; }
  std::span<Complex> data() { return data_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  Complex trace() const;
  double frobenius_norm() const;
  double max_abs_diff(const ComplexMatrix& other) const;

  bool is_finite() const;
  bool is_hermitian(double tol = kTolerance) const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex scale);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  ComplexVector data_;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector kron(std::span<const Complex> a, std::span<const Complex> b);
ComplexVector matvec(const ComplexMatrix& m, std::span<const Complex> v);
Complex inner(std::span<const Complex> a, std::span<const Complex> b);  // <a|b>
double norm(std::span<const Complex> v);

/// Eigen-decomposition of a Hermitian matrix; values ascending, vectors as columns.
struct HermitianEigen {
  std::vector<double> values;
  ComplexMatrix vectors;

  ComplexVector vector(std::size_t i) const;
};

/// Cyclic complex Jacobi. Throws std::invalid_argument if `m` is not Hermitian
/// within `hermitian_tol` (absolute, entrywise).
HermitianEigen eigh(const ComplexMatrix& m, double hermitian_tol = kTolerance);
std::vector<double> eigvalsh(const ComplexMatrix& m, double hermitian_tol = kTolerance);

/// V f(D) V^dagger
ComplexMatrix spectral_map(const HermitianEigen& eig, const std::function<double(double)>& f);

/// True iff min eigenvalue of (a - b) >= -tol. Both inputs must be Hermitian.
bool psd_dominates(const ComplexMatrix& a, const ComplexMatrix& b, double tol = kTolerance);

}  // namespace qpvlab
