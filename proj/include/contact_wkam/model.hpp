#ifndef CONTACT_WKAM_MODEL_HPP
#define CONTACT_WKAM_MODEL_HPP

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "contact_wkam/domain.hpp"

namespace wkam {

enum class ModelKind { ExampleE, Custom };

struct LegendreBracketFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Gradients {
  double Hp{};
  double Hx{};
  double Hu{};
};

/// Contact Hamiltonian H(x,p,u) on the circle together with its Lagrangian dual.
///
/// The built-in family is H = lambda*u + p^2/2 + p*V(x); a custom model supplies
/// H directly and gets its Lagrangian by numerical Legendre transform.
struct HamiltonianModel {
  ModelKind kind{ModelKind::ExampleE};
  double lambda{1.0};
  std::function<double(double)> drift;        // V
  std::function<double(double)> drift_prime;  // V'
  std::function<double(double, double, double)> custom_h;  // H(x,p,u), kind==Custom

  double tol_legendre{1e-9};
  double h_fd{1e-5};

  static HamiltonianModel example_e(double lambda) {
    HamiltonianModel m;
    m.kind = ModelKind::ExampleE;
    m.lambda = lambda;
    m.drift = [](double x) { return std::sin(x); };
    m.drift_prime = [](double x) { return std::cos(x); };
    return m;
  }

  static HamiltonianModel custom(double lambda,
                                 std::function<double(double, double, double)> h) {
    HamiltonianModel m;
    m.kind = ModelKind::Custom;
    m.lambda = lambda;
    m.custom_h = std::move(h);
    return m;
  }

  double hamiltonian(double x, double p, double u) const {
    if (kind == ModelKind::ExampleE) {
      const double v = drift(x);
      return lambda * u + 0.5 * p * p + p * v;
    }
    return custom_h(x, p, u);
  }

  /// L(x,v,u) = sup_p { p v - H(x,p,u) }.
  double lagrangian(double x, double v, double u) const {
    if (kind == ModelKind::ExampleE) {
      const double w = v - drift(x);
      return 0.5 * w * w - lambda * u;
    }
    return legendre_sup(x, v, u);
  }

  /// p = dL/dv at (x,v,u).
  double momentum_of_velocity(double x, double v, double u) const {
    if (kind == ModelKind::ExampleE) return v - drift(x);
    const double h = h_fd;
    return (lagrangian(x, v + h, u) - lagrangian(x, v - h, u)) / (2.0 * h);
  }

  Gradients gradients(double x, double p, double u) const {
    if (kind == ModelKind::ExampleE) {
      return {p + drift(x), p * drift_prime(x), lambda};
    }
    const double h = h_fd;
    return {(hamiltonian(x, p + h, u) - hamiltonian(x, p - h, u)) / (2.0 * h),
            (hamiltonian(x + h, p, u) - hamiltonian(x - h, p, u)) / (2.0 * h),
            (hamiltonian(x, p, u + h) - hamiltonian(x, p, u - h)) / (2.0 * h)};
  }

 private:
  /// Bracket the maximizer of p*v - H by symmetric expansion, then ternary search.
  double legendre_sup(double x, double v, double u) const {
    auto f = [&](double p) { return p * v - custom_h(x, p, u); };
    double r = 1.0;
    const int max_expand = 60;
    int k = 0;
    for (; k < max_expand; ++k) {
      // interior point must beat both ends once the bracket is wide enough
      if (f(0.0) > f(-r) && f(0.0) > f(r)) break;
      double best = std::max({f(-r), f(0.0), f(r)});
      double mid = std::max(f(-0.5 * r), f(0.5 * r));
      if (mid >= best && f(-r) < mid && f(r) < mid) break;
      r *= 2.0;
    }
    if (k == max_expand)
      throw LegendreBracketFailure("no finite Legendre bracket; H may fail superlinearity");
    double lo = -r, hi = r;
    while (hi - lo > tol_legendre) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (f(m1) < f(m2))
        lo = m1;
      else
        hi = m2;
    }
    return f(0.5 * (lo + hi));
  }
};

struct ValidationReport {
  bool h1_convexity{false};
  bool h2_superlinearity{false};
  bool h3_monotone{false};
  bool h3_strict{false};
  bool certificate_subsolution{false};
  bool certificate_checked{false};
  double worst_convexity{0.0};
  double worst_hu_low{0.0};
  double worst_hu_high{0.0};
  double certificate_sup{0.0};

  bool ok() const { return h1_convexity && h2_superlinearity && h3_monotone; }
};

/// Sample-lattice check of (H1)-(H3)/(H3') plus an optional subsolution
/// certificate sup_x H(x, Dphi, phi) <= tol.
inline ValidationReport validate_model(const HamiltonianModel& model,
                                       const CircleDomain& domain,
                                       const GridFunction* certificate = nullptr,
                                       double tol = 1e-6) {
  ValidationReport rep;
  const int nx = 16, np = 9, nu = 5;
  const double h = 1e-4;
  double worst_conv = 1e300, hu_min = 1e300, hu_max = -1e300;
  bool superlinear = true;
  for (int ix = 0; ix < nx; ++ix) {
    const double x = domain.circumference * ix / nx;
    for (int ip = 0; ip < np; ++ip) {
      const double p = -4.0 + ip;
      for (int iu = 0; iu < nu; ++iu) {
        const double u = -2.0 + iu;
        const double hpp = (model.hamiltonian(x, p + h, u) - 2.0 * model.hamiltonian(x, p, u) +
                            model.hamiltonian(x, p - h, u)) /
                           (h * h);
        worst_conv = std::min(worst_conv, hpp);
        const double hu = (model.hamiltonian(x, p, u + h) - model.hamiltonian(x, p, u - h)) /
                          (2.0 * h);
        hu_min = std::min(hu_min, hu);
        hu_max = std::max(hu_max, hu);
      }
    }
    // superlinearity probe: H(x,p,0)/|p| must grow with |p|
    for (double sgn : {-1.0, 1.0}) {
      const double a = model.hamiltonian(x, sgn * 8.0, 0.0) / 8.0;
      const double b = model.hamiltonian(x, sgn * 64.0, 0.0) / 64.0;
      if (b <= a + 1.0) superlinear = false;
    }
  }
  rep.worst_convexity = worst_conv;
  rep.h1_convexity = worst_conv > 0.0;
  rep.h2_superlinearity = superlinear;
  rep.worst_hu_low = hu_min;
  rep.worst_hu_high = hu_max;
  rep.h3_monotone = hu_min >= -1e-8 && hu_max <= model.lambda + 1e-6;
  rep.h3_strict = rep.h3_monotone && hu_min > 1e-8;
  if (certificate != nullptr) {
    rep.certificate_checked = true;
    double sup = -1e300;
    for (int i = 0; i < domain.n_points; ++i) {
      const double x = domain.x(i);
      const double dphi = certificate->slope_centered(i);
      sup = std::max(sup, model.hamiltonian(x, dphi, (*certificate)[i]));
    }
    rep.certificate_sup = sup;
    // central differences on a smooth certificate carry O(dx^2) error
    const double slack = 10.0 * domain.dx() * domain.dx();
    rep.certificate_subsolution = sup <= tol + slack;
  }
  return rep;
}

/// Named seed grid functions used by the solver front end.
inline GridFunction make_seed(const CircleDomain& domain, const std::string& name,
                              unsigned rng_seed = 12345) {
  GridFunction g(domain);
  if (name == "zero") {
    return g;
  } else if (name == "cos") {
    for (int i = 0; i < domain.n_points; ++i) g[i] = std::cos(domain.x(i));
  } else if (name == "cos-1") {
    for (int i = 0; i < domain.n_points; ++i) g[i] = std::cos(domain.x(i)) - 1.0;
  } else if (name == "-cos-1") {
    for (int i = 0; i < domain.n_points; ++i) g[i] = -std::cos(domain.x(i)) - 1.0;
  } else if (name == "random-lipschitz") {
    std::mt19937 rng(rng_seed);
    std::uniform_real_distribution<double> uni(-0.5, 0.5);
    std::vector<double> a(4), b(4);
    for (int k = 0; k < 4; ++k) {
      a[k] = uni(rng);
      b[k] = uni(rng);
    }
    for (int i = 0; i < domain.n_points; ++i) {
      const double t = two_pi * i / domain.n_points;
      double s = 0.0;
      for (int k = 0; k < 4; ++k)
        s += (a[k] * std::cos((k + 1) * t) + b[k] * std::sin((k + 1) * t)) / (k + 1);
      g[i] = s;
    }
  } else {
    throw std::invalid_argument("unknown seed expression: " + name);
  }
  return g;
}

}  // namespace wkam

#endif
