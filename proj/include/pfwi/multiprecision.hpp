#pragma once

// Arbitrary-precision scalar, complex and dense-matrix types used by the
// kernel fit. Arithmetic is MPFR through Boost.Multiprecision; precision is
// chosen at run time with PrecisionScope.

#include <complex>
#include <cstddef>
#include <mutex>
#include <vector>

#include <boost/multiprecision/mpfr.hpp>

namespace pfwi::mp {

using Real = boost::multiprecision::mpfr_float;

/// Sets the MPFR working precision for the lifetime of the scope. Boost keeps
/// this precision process-global, so scopes serialise across threads.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

  static unsigned bits_to_digits10(unsigned bits);

 private:
  std::unique_lock<std::recursive_mutex> lock_;
  unsigned saved_digits10_;
};

/// Minimal complex number over an MPFR real.
struct Complex {
  Real re{0};
  Real im{0};

  Complex() = default;
  Complex(Real r) : re(std::move(r)), im(0) {}
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  explicit Complex(std::complex<double> z) : re(z.real()), im(z.imag()) {}

  std::complex<double> to_double() const {
    return {static_cast<double>(re), static_cast<double>(im)};
  }

  Complex& operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
  Complex& operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }
};

inline Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
inline Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
inline Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
inline Complex operator*(const Complex& a, const Complex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline Complex operator*(const Real& a, const Complex& b) { return {a * b.re, a * b.im}; }
inline Complex operator*(const Complex& a, const Real& b) { return {a.re * b, a.im * b}; }
inline Complex operator/(const Complex& a, const Real& b) { return {a.re / b, a.im / b}; }
inline Complex conj(const Complex& a) { return {a.re, -a.im}; }
inline Real norm(const Complex& a) { return a.re * a.re + a.im * a.im; }
inline Real abs(const Complex& a) { return boost::multiprecision::sqrt(norm(a)); }
inline Complex operator/(const Complex& a, const Complex& b) {
  const Real d = norm(b);
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
inline Complex operator+(const Complex& a, const Real& b) { return {a.re + b, a.im}; }
inline Complex operator-(const Complex& a, const Real& b) { return {a.re - b, a.im}; }

/// Principal square root, branch cut on the negative real axis.
Complex sqrt(const Complex& z);

/// Dense row-major complex matrix.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), a_(n * n) {}

  std::size_t size() const { return n_; }
  Complex& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  Matrix adjoint() const;
  Matrix operator*(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  Real frobenius() const;
  /// S <- (S + S^*)/2.
  void symmetrize();

  static Matrix identity(std::size_t n);

 private:
  std::size_t n_ = 0;
  std::vector<Complex> a_;
};

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Eigenvalues in ascending order; columns of `vectors` are the
/// orthonormal eigenvectors.
struct HermitianEigen {
  std::vector<Real> values;
  Matrix vectors;
};
HermitianEigen jacobi_eigen(Matrix a, unsigned bits);

}  // namespace pfwi::mp
