#include "pfwi/multiprecision.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pfwi::mp {

namespace {
std::recursive_mutex& precision_mutex() {
  static std::recursive_mutex m;
  return m;
}
}  // namespace

unsigned PrecisionScope::bits_to_digits10(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

PrecisionScope::PrecisionScope(unsigned bits)
    : lock_(precision_mutex()), saved_digits10_(Real::default_precision()) {
  Real::default_precision(bits_to_digits10(bits));
}

PrecisionScope::~PrecisionScope() { Real::default_precision(saved_digits10_); }

Complex sqrt(const Complex& z) {
  using boost::multiprecision::sqrt;
  if (z.re == 0 && z.im == 0) return {};
  const Real r = abs(z);
  if (z.re >= 0) {
    Real t = sqrt((r + z.re) / 2);
    return {t, z.im / (2 * t)};
  }
  Real t = sqrt((r - z.re) / 2);
  Real re = boost::multiprecision::abs(z.im) / (2 * t);
  return {re, z.im < 0 ? Real(-t) : t};
}

Matrix Matrix::adjoint() const {
  Matrix out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out(j, i) = conj((*this)(i, j));
  return out;
}

Matrix Matrix::operator*(const Matrix& o) const {
  Matrix out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = 0; k < n_; ++k) {
      const Complex& aik = (*this)(i, k);
      for (std::size_t j = 0; j < n_; ++j) out(i, j) += aik * o(k, j);
    }
  return out;
}

Matrix Matrix::operator-(const Matrix& o) const {
  Matrix out(n_);
  for (std::size_t k = 0; k < a_.size(); ++k) out.a_[k] = a_[k] - o.a_[k];
  return out;
}

Real Matrix::frobenius() const {
  Real s = 0;
  for (const auto& z : a_) s += norm(z);
  return boost::multiprecision::sqrt(s);
}

void Matrix::symmetrize() {
  for (std::size_t i = 0; i < n_; ++i) {
    (*this)(i, i).im = 0;
    for (std::size_t j = i + 1; j < n_; ++j) {
      Complex avg = ((*this)(i, j) + conj((*this)(j, i))) / Real(2);
      (*this)(i, j) = avg;
      (*this)(j, i) = conj(avg);
    }
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix out(n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = Real(1);
  return out;
}

HermitianEigen jacobi_eigen(Matrix a, unsigned bits) {
  using boost::multiprecision::abs;
  using boost::multiprecision::sqrt;
  const std::size_t n = a.size();
  Matrix v = Matrix::identity(n);
  const Real eps = boost::multiprecision::ldexp(Real(1), -static_cast<int>(bits));
  const Real scale = a.frobenius();

  auto off_norm2 = [&] {
    Real s = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += norm(a(i, j));
    return s;
  };

  const Real target = eps * scale * eps * scale;
  for (int sweep = 0; sweep < 100 && off_norm2() > target; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Real mag = pfwi::mp::abs(a(p, q));
        if (mag == 0 || mag <= eps * eps * scale) {
          a(p, q) = Complex();
          a(q, p) = Complex();
          continue;
        }
        // phase that makes the (p,q) entry real
        const Complex ph{a(p, q).re / mag, a(p, q).im / mag};  // e^{i theta}
        const Complex phc = conj(ph);                          // e^{-i theta}
        const Real tau = (a(q, q).re - a(p, p).re) / (2 * mag);
        const Real t = (tau >= 0 ? Real(1) : Real(-1)) / (abs(tau) + sqrt(1 + tau * tau));
        const Real c = 1 / sqrt(1 + t * t);
        const Real s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = phc * a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = ph * a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = Complex();
        a(q, p) = Complex();
        a(p, p).im = 0;
        a(q, q).im = 0;
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = phc * v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i).re < a(j, j).re; });

  HermitianEigen out;
  out.vectors = Matrix(n);
  out.values.reserve(n);
  for (std::size_t c = 0; c < n; ++c) {
    out.values.push_back(a(order[c], order[c]).re);
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, c) = v(k, order[c]);
  }
  return out;
}

}  // namespace pfwi::mp
