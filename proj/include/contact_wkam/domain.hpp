#ifndef CONTACT_WKAM_DOMAIN_HPP
#define CONTACT_WKAM_DOMAIN_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace wkam {

inline constexpr double two_pi = 6.283185307179586476925286766559;

/// Uniform periodic grid on a flat circle of given circumference.
struct CircleDomain {
  double circumference{two_pi};
  int n_points{512};

  CircleDomain() = default;
  CircleDomain(double circ, int n) : circumference(circ), n_points(n) {
    if (!(circ > 0.0)) throw std::invalid_argument("circumference must be positive");
    if (n < 8) throw std::invalid_argument("n_points must be >= 8");
  }

  double dx() const { return circumference / n_points; }
  double x(int i) const { return index_wrap(i) * dx(); }

  int index_wrap(int i) const {
    int m = i % n_points;
    return m < 0 ? m + n_points : m;
  }

  /// Reduce a coordinate to [0, circumference).
  double wrap(double x) const {
    double y = std::fmod(x, circumference);
    return y < 0.0 ? y + circumference : y;
  }

  /// Signed shortest displacement from a to b, in (-C/2, C/2].
  double arc(double a, double b) const {
    double d = wrap(b - a);
    if (d > 0.5 * circumference) d -= circumference;
    return d;
  }

  /// Shortest arc-length distance.
  double dist(double a, double b) const { return std::abs(arc(a, b)); }

  /// Midpoint of the shortest arc from a to b, reduced to [0, C).
  double midpoint(double a, double b) const { return wrap(a + 0.5 * arc(a, b)); }

  /// Index of the grid node nearest to x.
  int nearest_index(double x) const {
    return index_wrap(static_cast<int>(std::lround(wrap(x) / dx())));
  }

  bool operator==(const CircleDomain& o) const {
    return circumference == o.circumference && n_points == o.n_points;
  }
};

/// Real values on the nodes of a CircleDomain.
struct GridFunction {
  CircleDomain domain;
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(const CircleDomain& d, double fill = 0.0)
      : domain(d), values(static_cast<std::size_t>(d.n_points), fill) {}

  double& operator[](int i) { return values[static_cast<std::size_t>(domain.index_wrap(i))]; }
  double operator[](int i) const { return values[static_cast<std::size_t>(domain.index_wrap(i))]; }

  int size() const { return domain.n_points; }

  /// Linear interpolation at an arbitrary point (periodic).
  double interp(double x) const {
    const double dx = domain.dx();
    const double s = domain.wrap(x) / dx;
    const int i0 = static_cast<int>(std::floor(s));
    const double f = s - i0;
    return (1.0 - f) * (*this)[i0] + f * (*this)[i0 + 1];
  }

  double sup_norm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }

  double max() const {
    double m = values.empty() ? 0.0 : values[0];
    for (double v : values) m = std::max(m, v);
    return m;
  }

  double min() const {
    double m = values.empty() ? 0.0 : values[0];
    for (double v : values) m = std::min(m, v);
    return m;
  }

  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }

  /// Centered slope at node i.
  double slope_centered(int i) const {
    return ((*this)[i + 1] - (*this)[i - 1]) / (2.0 * domain.dx());
  }
  double slope_left(int i) const { return ((*this)[i] - (*this)[i - 1]) / domain.dx(); }
  double slope_right(int i) const { return ((*this)[i + 1] - (*this)[i]) / domain.dx(); }
};

inline double sup_distance(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

}  // namespace wkam

#endif
