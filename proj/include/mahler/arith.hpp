#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace mahler {

using Rational = mpq_class;

/// Which arithmetic produced a polytope's combinatorial certificates.
enum class Kernel { Rational, Double };

std::string_view to_string(Kernel k);
Kernel parse_kernel(std::string_view s);

template <class T>
struct Vec3 {
  T x{};
  T y{};
  T z{};

  T& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }
  const T& operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }

  friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {T(a.x + b.x), T(a.y + b.y), T(a.z + b.z)}; }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {T(a.x - b.x), T(a.y - b.y), T(a.z - b.z)}; }
  friend Vec3 operator-(const Vec3& a) { return {T(-a.x), T(-a.y), T(-a.z)}; }
  friend Vec3 operator*(const T& s, const Vec3& a) { return {T(s * a.x), T(s * a.y), T(s * a.z)}; }
  friend Vec3 operator*(const Vec3& a, const T& s) { return s * a; }
  friend Vec3 operator/(const Vec3& a, const T& s) { return {T(a.x / s), T(a.y / s), T(a.z / s)}; }
  friend bool operator==(const Vec3& a, const Vec3& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }
};

using Point3 = Vec3<double>;
using QPoint3 = Vec3<Rational>;

template <class T>
T dot(const Vec3<T>& a, const Vec3<T>& b) {
  return T(a.x * b.x + a.y * b.y + a.z * b.z);
}

template <class T>
Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
  return {T(a.y * b.z - a.z * b.y), T(a.z * b.x - a.x * b.z), T(a.x * b.y - a.y * b.x)};
}

template <class T>
T det3(const Vec3<T>& a, const Vec3<T>& b, const Vec3<T>& c) {
  return dot(a, cross(b, c));
}

inline double norm(const Point3& v) { return std::sqrt(dot(v, v)); }

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) { return v.get_d(); }
inline Point3 to_double(const Point3& v) { return v; }
inline Point3 to_double(const QPoint3& v) { return {v.x.get_d(), v.y.get_d(), v.z.get_d()}; }

/// Exact conversion: every finite double is a dyadic rational.
inline Rational to_rational(double v) { return Rational(v); }
inline QPoint3 to_rational(const Point3& v) { return {Rational(v.x), Rational(v.y), Rational(v.z)}; }

/// Rounds to the nearest multiple of 2^-bits.
Rational snap_rational(double v, int bits = 40);

/// Sign with an absolute dead band; the band is ignored for exact scalars.
inline int sign_of(double v, double eps) { return v > eps ? 1 : (v < -eps ? -1 : 0); }
inline int sign_of(const Rational& v, double /*eps*/) { return sgn(v); }

template <class T>
inline constexpr bool is_exact_v = false;
template <>
inline constexpr bool is_exact_v<Rational> = true;

/// Parses "3", "-1/3", "0.125", "2.5e-3" exactly.
Rational parse_rational(std::string_view text);

/// Shortest round-trip form is not guaranteed; always 17 significant digits.
std::string format_double(double v);
std::string format_rational(const Rational& q);

/// A scalar result that carries its exact value when the rational kernel produced it.
class Real {
 public:
  Real() = default;
  explicit Real(double v) : value_(v) {}
  explicit Real(const Rational& q) : value_(q.get_d()), exact_(q) {}

  double value() const { return value_; }
  bool is_exact() const { return exact_.has_value(); }
  const Rational& rational() const { return *exact_; }

  /// "32/3" in exact mode, 17 significant digits otherwise.
  std::string str() const { return exact_ ? format_rational(*exact_) : format_double(value_); }

 private:
  double value_ = 0.0;
  std::optional<Rational> exact_;
};

Real operator*(const Real& a, const Real& b);
Real operator-(const Real& a, const Real& b);

}  // namespace mahler
