#pragma once
// ============================================================================
// numeric.hpp -- floating-point helpers shared across precisions
//
// Elementary functions overloaded for double, long double and __float128 so
// that the quadrature and series code can be instantiated at any of them.
// ============================================================================
#include <cmath>

#include <quadmath.h>

namespace edsense {

using quad = __float128;

namespace fp {

inline double exp(double v) { return std::exp(v); }
inline long double exp(long double v) { return std::exp(v); }
inline quad exp(quad v) { return expq(v); }

inline double log(double v) { return std::log(v); }
inline long double log(long double v) { return std::log(v); }
inline quad log(quad v) { return logq(v); }

inline double sqrt(double v) { return std::sqrt(v); }
inline long double sqrt(long double v) { return std::sqrt(v); }
inline quad sqrt(quad v) { return sqrtq(v); }

inline double abs(double v) { return std::fabs(v); }
inline long double abs(long double v) { return std::fabs(v); }
inline quad abs(quad v) { return fabsq(v); }

inline double lgamma(double v) { return std::lgamma(v); }
inline long double lgamma(long double v) { return std::lgamma(v); }
inline quad lgamma(quad v) { return lgammaq(v); }

inline bool isfinite(double v) { return std::isfinite(v); }
inline bool isfinite(long double v) { return std::isfinite(v); }
inline bool isfinite(quad v) { return finiteq(v) != 0; }

/// Unit roundoff of each supported type.
template <class Real>
constexpr Real epsilon();
template <>
constexpr double epsilon<double>() { return 0x1p-52; }
template <>
constexpr long double epsilon<long double>() { return 0x1p-63L; }
template <>
constexpr quad epsilon<quad>() { return static_cast<quad>(0x1p-56) * static_cast<quad>(0x1p-56); }

}  // namespace fp

namespace detail {

// Neumaier-compensated accumulator.
template <class T>
class BasicCompensatedSum {
 public:
  void add(T v) noexcept {
    const T t = sum_ + v;
    if (fp::abs(sum_) >= fp::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] T value() const noexcept { return sum_ + comp_; }

 private:
  T sum_ = 0;
  T comp_ = 0;
};

using CompensatedSum = BasicCompensatedSum<double>;

}  // namespace detail
}  // namespace edsense
