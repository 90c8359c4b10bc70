#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "kobalab/error.hpp"

namespace kobalab {

using Complex = std::complex<double>;

/// A point (or tangent vector) of C^n. The dimension is fixed at construction
/// and all components are finite.
class CPoint {
 public:
  CPoint() = default;
  explicit CPoint(std::size_t dim) : coords_(dim, Complex{}) {}
  CPoint(std::initializer_list<Complex> coords) : coords_(coords) { check_finite(); }
  explicit CPoint(std::vector<Complex> coords) : coords_(std::move(coords)) { check_finite(); }

  /// (c, 0, ..., 0) in dimension `dim`.
  static CPoint axis(std::size_t dim, Complex c, std::size_t index = 0) {
    CPoint p(dim);
    p.coords_.at(index) = c;
    p.check_finite();
    return p;
  }

  std::size_t dim() const { return coords_.size(); }
  const Complex& operator[](std::size_t i) const { return coords_[i]; }
  Complex& operator[](std::size_t i) { return coords_[i]; }
  std::span<const Complex> coords() const { return coords_; }
  auto begin() const { return coords_.begin(); }
  auto end() const { return coords_.end(); }

  double norm() const {
    double s = 0.0;
    for (const auto& c : coords_) s += std::norm(c);
    return std::sqrt(s);
  }
  double max_abs() const {
    double m = 0.0;
    for (const auto& c : coords_) m = std::max(m, std::abs(c));
    return m;
  }
  /// Euclidean norm of (z_2, ..., z_n).
  double tail_norm() const {
    double s = 0.0;
    for (std::size_t j = 1; j < coords_.size(); ++j) s += std::norm(coords_[j]);
    return std::sqrt(s);
  }
  bool is_zero() const {
    for (const auto& c : coords_)
      if (c != Complex{}) return false;
    return true;
  }

  CPoint& operator+=(const CPoint& o) {
    require_same_dim(o);
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += o.coords_[i];
    return *this;
  }
  CPoint& operator-=(const CPoint& o) {
    require_same_dim(o);
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= o.coords_[i];
    return *this;
  }
  CPoint& operator*=(Complex s) {
    for (auto& c : coords_) c *= s;
    return *this;
  }
  friend CPoint operator+(CPoint a, const CPoint& b) { return a += b; }
  friend CPoint operator-(CPoint a, const CPoint& b) { return a -= b; }
  friend CPoint operator*(Complex s, CPoint a) { return a *= s; }
  friend CPoint operator*(CPoint a, Complex s) { return a *= s; }
  friend bool operator==(const CPoint& a, const CPoint& b) { return a.coords_ == b.coords_; }

  void require_same_dim(const CPoint& o) const {
    if (o.dim() != dim()) throw ArgumentError("dimension mismatch: " + std::to_string(dim()) + " vs " + std::to_string(o.dim()));
  }

 private:
  void check_finite() const {
    for (const auto& c : coords_)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw ArgumentError("CPoint component is not finite");
  }

  std::vector<Complex> coords_;
};

inline double distance(const CPoint& a, const CPoint& b) { return (a - b).norm(); }

/// Hermitian inner product <a, b> = sum a_j conj(b_j).
inline Complex inner(const CPoint& a, const CPoint& b) {
  a.require_same_dim(b);
  Complex s{};
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * std::conj(b[i]);
  return s;
}

}  // namespace kobalab
