#ifndef CONTACT_WKAM_FLOW_HPP
#define CONTACT_WKAM_FLOW_HPP

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "contact_wkam/model.hpp"

namespace wkam {

struct PhaseState {
  double x{};
  double p{};
  double u{};
};

struct BlowUp : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Right-hand side of the characteristic system
///   x' = H_p,  p' = -H_x - H_u p,  u' = H_p p - H.
inline PhaseState vector_field(const HamiltonianModel& model, const PhaseState& s) {
  const Gradients g = model.gradients(s.x, s.p, s.u);
  const double h = model.hamiltonian(s.x, s.p, s.u);
  return {g.Hp, -g.Hx - g.Hu * s.p, g.Hp * s.p - h};
}

struct Trajectory {
  double t0{0.0};
  double dt{};
  std::vector<PhaseState> states;

  double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  const PhaseState& back() const { return states.back(); }
};

namespace detail {
inline PhaseState axpy(const PhaseState& a, double c, const PhaseState& b) {
  return {a.x + c * b.x, a.p + c * b.p, a.u + c * b.u};
}
}  // namespace detail

inline PhaseState rk4_step(const HamiltonianModel& model, const PhaseState& s, double dt) {
  using detail::axpy;
  const PhaseState k1 = vector_field(model, s);
  const PhaseState k2 = vector_field(model, axpy(s, 0.5 * dt, k1));
  const PhaseState k3 = vector_field(model, axpy(s, 0.5 * dt, k2));
  const PhaseState k4 = vector_field(model, axpy(s, dt, k3));
  return {s.x + dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          s.p + dt / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p),
          s.u + dt / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u)};
}

/// Fixed-step RK4 flow. Throws BlowUp when |p| or |u| passes the guard bound.
inline Trajectory integrate(const HamiltonianModel& model, const PhaseState& start,
                            double duration, double dt, double guard = 1e6) {
  if (!(duration != 0.0) || !(dt > 0.0) || dt > std::abs(duration))
    throw std::invalid_argument("integrate: need 0 < dt <= |duration|");
  const double h = duration > 0 ? dt : -dt;
  const auto n_steps = static_cast<std::size_t>(std::llround(std::abs(duration) / dt));
  Trajectory traj;
  traj.dt = h;
  traj.states.reserve(n_steps + 1);
  traj.states.push_back(start);
  PhaseState s = start;
  for (std::size_t i = 0; i < n_steps; ++i) {
    s = rk4_step(model, s, h);
    if (std::abs(s.p) > guard || std::abs(s.u) > guard)
      throw BlowUp("trajectory exceeded guard bound at t=" + std::to_string((i + 1) * h));
    traj.states.push_back(s);
  }
  return traj;
}

inline double product_metric(const CircleDomain& dom, const PhaseState& a, const PhaseState& b) {
  return dom.dist(a.x, b.x) + std::abs(a.p - b.p) + std::abs(a.u - b.u);
}

/// Newton refinement of the (CH) vector field zeros from grid-scan seeds.
inline std::vector<PhaseState> find_equilibria(const HamiltonianModel& model,
                                               const CircleDomain& domain, double u_level,
                                               double tol = 1e-10) {
  std::vector<PhaseState> found;
  auto norm = [&](const PhaseState& f) {
    return std::abs(f.x) + std::abs(f.p) + std::abs(f.u);
  };
  // one representative per grid cell; near-degenerate zeros (flat directions)
  // can leave Newton slightly off, so the candidate with the smaller residual
  // wins the cell
  auto insert = [&](PhaseState s) {
    if (norm(vector_field(model, s)) >= tol) return;
    s.x = domain.wrap(s.x);
    for (PhaseState& q : found)
      if (product_metric(domain, q, s) < 0.5 * domain.dx()) {
        if (norm(vector_field(model, s)) < norm(vector_field(model, q))) q = s;
        return;
      }
    found.push_back(s);
  };
  auto try_seed = [&](PhaseState s) {
    const double h = 1e-6;
    for (int it = 0; it < 60; ++it) {
      const PhaseState f = vector_field(model, s);
      if (norm(f) < tol) break;
      // 3x3 Jacobian by central differences
      double J[3][3];
      const std::array<PhaseState, 3> dirs = {PhaseState{h, 0, 0}, PhaseState{0, h, 0},
                                              PhaseState{0, 0, h}};
      for (int c = 0; c < 3; ++c) {
        const PhaseState fp = vector_field(
            model, {s.x + dirs[c].x, s.p + dirs[c].p, s.u + dirs[c].u});
        const PhaseState fm = vector_field(
            model, {s.x - dirs[c].x, s.p - dirs[c].p, s.u - dirs[c].u});
        J[0][c] = (fp.x - fm.x) / (2 * h);
        J[1][c] = (fp.p - fm.p) / (2 * h);
        J[2][c] = (fp.u - fm.u) / (2 * h);
      }
      // solve J d = -f by Gaussian elimination with partial pivoting
      double A[3][4] = {{J[0][0], J[0][1], J[0][2], -f.x},
                        {J[1][0], J[1][1], J[1][2], -f.p},
                        {J[2][0], J[2][1], J[2][2], -f.u}};
      bool singular = false;
      for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
          if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        if (std::abs(A[piv][c]) < 1e-14) {
          singular = true;
          break;
        }
        if (piv != c)
          for (int k = c; k < 4; ++k) std::swap(A[c][k], A[piv][k]);
        for (int r = 0; r < 3; ++r) {
          if (r == c) continue;
          const double m = A[r][c] / A[c][c];
          for (int k = c; k < 4; ++k) A[r][k] -= m * A[c][k];
        }
      }
      if (singular) return;  // flat direction; the seed itself may already be a zero
      double step_norm = 0.0;
      PhaseState d{A[0][3] / A[0][0], A[1][3] / A[1][1], A[2][3] / A[2][2]};
      step_norm = std::abs(d.x) + std::abs(d.p) + std::abs(d.u);
      if (step_norm > 1.0) {
        d.x /= step_norm;
        d.p /= step_norm;
        d.u /= step_norm;
      }
      s = {domain.wrap(s.x + d.x), s.p + d.p, s.u + d.u};
    }
    insert(s);
  };
  for (int i = 0; i < domain.n_points; ++i)
    for (double p0 : {-1.0, 0.0, 1.0}) try_seed({domain.x(i), p0, u_level});
  // degenerate vector fields (flat directions) defeat Newton; accept raw grid
  // zeros as representatives in that case
  for (int i = 0; i < domain.n_points; ++i) insert({domain.x(i), 0.0, u_level});
  return found;
}

enum class EquilibriumType { Sink, Source, Saddle, Center, Degenerate };

struct EquilibriumReport {
  PhaseState location;
  double jacobian[2][2]{};  // reduced (x,p) block on the zero-energy slice
  std::complex<double> eig1, eig2;
  EquilibriumType classification{EquilibriumType::Degenerate};
};

inline const char* to_string(EquilibriumType t) {
  switch (t) {
    case EquilibriumType::Sink: return "sink";
    case EquilibriumType::Source: return "source";
    case EquilibriumType::Saddle: return "saddle";
    case EquilibriumType::Center: return "center";
    default: return "degenerate";
  }
}

/// Linearization of the reduced (x,p) dynamics at an equilibrium.
/// For the built-in family the matrix is [[V'(x*), 1], [0, -(V'(x*)+lambda)]].
inline EquilibriumReport classify_equilibrium(const HamiltonianModel& model,
                                              const PhaseState& eq) {
  EquilibriumReport rep;
  rep.location = eq;
  if (model.kind == ModelKind::ExampleE) {
    const double vp = model.drift_prime(eq.x);
    rep.jacobian[0][0] = vp;
    rep.jacobian[0][1] = 1.0;
    rep.jacobian[1][0] = 0.0;
    rep.jacobian[1][1] = -(vp + model.lambda);
  } else {
    const double h = 1e-6;
    const PhaseState fx1 = vector_field(model, {eq.x + h, eq.p, eq.u});
    const PhaseState fx0 = vector_field(model, {eq.x - h, eq.p, eq.u});
    const PhaseState fp1 = vector_field(model, {eq.x, eq.p + h, eq.u});
    const PhaseState fp0 = vector_field(model, {eq.x, eq.p - h, eq.u});
    rep.jacobian[0][0] = (fx1.x - fx0.x) / (2 * h);
    rep.jacobian[0][1] = (fp1.x - fp0.x) / (2 * h);
    rep.jacobian[1][0] = (fx1.p - fx0.p) / (2 * h);
    rep.jacobian[1][1] = (fp1.p - fp0.p) / (2 * h);
  }
  const double tr = rep.jacobian[0][0] + rep.jacobian[1][1];
  const double det = rep.jacobian[0][0] * rep.jacobian[1][1] -
                     rep.jacobian[0][1] * rep.jacobian[1][0];
  const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4.0 * det, 0.0));
  rep.eig1 = 0.5 * (tr + disc);
  rep.eig2 = 0.5 * (tr - disc);
  const double m1 = std::abs(rep.eig1), m2 = std::abs(rep.eig2);
  const double r1 = rep.eig1.real(), r2 = rep.eig2.real();
  if (m1 < 1e-8 || m2 < 1e-8)
    rep.classification = EquilibriumType::Degenerate;
  else if (std::abs(r1) < 1e-8 && std::abs(r2) < 1e-8)
    rep.classification = EquilibriumType::Center;
  else if (r1 < 0 && r2 < 0)
    rep.classification = EquilibriumType::Sink;
  else if (r1 > 0 && r2 > 0)
    rep.classification = EquilibriumType::Source;
  else
    rep.classification = EquilibriumType::Saddle;
  return rep;
}

enum class Verdict { Observed, NotObserved };

struct RecurrenceVerdict {
  Verdict verdict{Verdict::NotObserved};
  double return_time{-1.0};
  double min_distance{1e300};
};

/// One-sided recurrence probe: `Observed` certifies a near-return, a
/// `NotObserved` verdict never claims non-recurrence.
inline RecurrenceVerdict is_recurrent(const HamiltonianModel& model, const CircleDomain& domain,
                                      const PhaseState& start, double horizon, double eps,
                                      double t_min, double dt = 0.01, double guard = 1e6) {
  if (!(t_min < horizon)) throw std::invalid_argument("is_recurrent: t_min must be < horizon");
  RecurrenceVerdict v;
  PhaseState s = start;
  const auto n = static_cast<std::size_t>(std::llround(horizon / dt));
  for (std::size_t i = 1; i <= n; ++i) {
    s = rk4_step(model, s, dt);
    if (std::abs(s.p) > guard || std::abs(s.u) > guard)
      throw BlowUp("is_recurrent: trajectory exceeded guard bound");
    const double t = i * dt;
    if (t < t_min) continue;
    const double d = product_metric(domain, s, start);
    v.min_distance = std::min(v.min_distance, d);
    if (d < eps) {
      v.verdict = Verdict::Observed;
      v.return_time = t;
      return v;
    }
  }
  return v;
}

struct TransitVerdict {
  Verdict verdict{Verdict::NotObserved};
  PhaseState witness_start{};
  double hit_time{-1.0};
  int sample_index{-1};
};

/// Samples the start ball and reports the first orbit entering the target ball.
inline TransitVerdict passes_through(const HamiltonianModel& model, const CircleDomain& domain,
                                     const PhaseState& start_center, double start_radius,
                                     const PhaseState& target_center, double target_radius,
                                     double horizon, double dt, int n_samples,
                                     unsigned seed = 2024, double guard = 1e6) {
  if (!(start_radius > 0.0) || !(target_radius > 0.0))
    throw std::invalid_argument("passes_through: radii must be positive");
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  TransitVerdict out;
  for (int k = 0; k < n_samples; ++k) {
    PhaseState s0 = start_center;
    if (k > 0) {  // sample 0 is the center itself
      // rejection sample the product-metric ball
      for (;;) {
        const double a = uni(rng) * start_radius;
        const double b = uni(rng) * start_radius;
        const double c = uni(rng) * start_radius;
        if (std::abs(a) + std::abs(b) + std::abs(c) <= start_radius) {
          s0 = {domain.wrap(start_center.x + a), start_center.p + b, start_center.u + c};
          break;
        }
      }
    }
    PhaseState s = s0;
    const auto n = static_cast<std::size_t>(std::llround(horizon / dt));
    for (std::size_t i = 0; i <= n; ++i) {
      if (product_metric(domain, s, target_center) < target_radius) {
        out.verdict = Verdict::Observed;
        out.witness_start = s0;
        out.hit_time = i * dt;
        out.sample_index = k;
        return out;  // lowest sample index wins
      }
      if (i == n) break;
      s = rk4_step(model, s, dt);
      if (std::abs(s.p) > guard || std::abs(s.u) > guard) break;
    }
  }
  return out;
}

}  // namespace wkam

#endif
