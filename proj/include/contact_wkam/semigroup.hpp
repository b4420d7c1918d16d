#ifndef CONTACT_WKAM_SEMIGROUP_HPP
#define CONTACT_WKAM_SEMIGROUP_HPP

#include <cmath>
#include <string>
#include <vector>

#include "contact_wkam/action.hpp"

namespace wkam {

enum class OperatorKind { Minus, Plus };

inline const char* to_string(OperatorKind k) {
  return k == OperatorKind::Minus ? "minus" : "plus";
}

namespace detail {
inline GridFunction semigroup_step(const StepKernel& kernel, OperatorKind op,
                                   const GridFunction& phi) {
  const int n = kernel.domain.n_points;
  std::vector<std::uint8_t> all(static_cast<std::size_t>(n), 1), out_r;
  std::vector<double> out;
  kernel.sweep(op == OperatorKind::Minus ? Direction::Forward : Direction::Backward,
               phi.values, all, out, out_r, nullptr, nullptr);
  GridFunction g(kernel.domain);
  g.values = out;
  return g;
}
}  // namespace detail

/// One step of the minimizing evolution: (T-_dt phi)(x) = inf over feet y of
/// the implicit one-step value carried from (y, phi(y)) to x.
inline GridFunction step_minus(const HamiltonianModel& model, const GridFunction& phi,
                               double dt, double v_max = 6.0, bool refine = true) {
  StepKernel k(model, phi.domain, dt, v_max, refine);
  return detail::semigroup_step(k, OperatorKind::Minus, phi);
}

/// One step of the maximizing evolution: (T+_dt phi)(x) = sup over feet y of
/// the initial value at x whose one-step transport to y meets phi(y).
inline GridFunction step_plus(const HamiltonianModel& model, const GridFunction& phi,
                              double dt, double v_max = 6.0, bool refine = true) {
  StepKernel k(model, phi.domain, dt, v_max, refine);
  return detail::semigroup_step(k, OperatorKind::Plus, phi);
}

struct SemigroupRun {
  OperatorKind op{OperatorKind::Minus};
  GridFunction initial;
  double dt{};
  std::vector<GridFunction> history;  // sampled slices, optional
  GridFunction result;
  int iterations{0};
  bool converged{false};
  double residual{0.0};  // sup-norm change per unit time at the last step
};

namespace detail {
inline SemigroupRun iterate_semigroup(const HamiltonianModel& model, OperatorKind op,
                                      const GridFunction& phi0, double dt, double t_max,
                                      double tol_fix, double v_max, bool refine,
                                      int history_stride) {
  StepKernel kernel(model, phi0.domain, dt, v_max, refine);
  SemigroupRun run;
  run.op = op;
  run.initial = phi0;
  run.dt = dt;
  const int max_iter = static_cast<int>(std::llround(t_max / dt));
  GridFunction cur = phi0;
  for (int k = 1; k <= max_iter; ++k) {
    GridFunction next = semigroup_step(kernel, op, cur);
    run.residual = sup_distance(next, cur) / dt;
    cur = std::move(next);
    run.iterations = k;
    if (history_stride > 0 && k % history_stride == 0) run.history.push_back(cur);
    if (run.residual < tol_fix) {
      run.converged = true;
      break;
    }
  }
  run.result = std::move(cur);
  return run;
}
}  // namespace detail

/// Iterates the minimizing evolution to its fixed point, the backward
/// weak KAM solution candidate.
inline SemigroupRun solve_backward(const HamiltonianModel& model, const GridFunction& phi0,
                                   double dt, double t_max, double tol_fix = 1e-4,
                                   double v_max = 6.0, bool refine = true,
                                   int history_stride = 0) {
  return detail::iterate_semigroup(model, OperatorKind::Minus, phi0, dt, t_max, tol_fix,
                                   v_max, refine, history_stride);
}

/// Iterates the maximizing evolution; from a subsolution seed the iterates
/// decrease monotonically to a forward weak KAM solution.
inline SemigroupRun solve_forward(const HamiltonianModel& model, const GridFunction& phi0,
                                  double dt, double t_max, double tol_fix = 1e-4,
                                  double v_max = 6.0, bool refine = true,
                                  int history_stride = 0) {
  return detail::iterate_semigroup(model, OperatorKind::Plus, phi0, dt, t_max, tol_fix,
                                   v_max, refine, history_stride);
}

struct FixedPointCheck {
  bool fixed{false};
  double residual{0.0};  // sup-norm drift over the whole stride
};

/// Applies `stride` steps of the chosen evolution and reports the sup-norm
/// drift; `fixed` when the drift stays below tol.
inline FixedPointCheck is_fixed_point(const HamiltonianModel& model, const GridFunction& u,
                                      OperatorKind op, double dt, int stride, double tol,
                                      double v_max = 6.0, bool refine = true) {
  StepKernel kernel(model, u.domain, dt, v_max, refine);
  GridFunction cur = u;
  for (int k = 0; k < stride; ++k) cur = detail::semigroup_step(kernel, op, cur);
  FixedPointCheck c;
  c.residual = sup_distance(cur, u);
  c.fixed = c.residual < tol;
  return c;
}

/// Stationarity residual of a candidate solution: max of |H(x, Du, u)| over
/// grid points where both one-sided slopes agree (kinks are skipped; they are
/// isolated in one dimension).
inline double stationarity_residual(const HamiltonianModel& model, const GridFunction& u,
                                    double slope_tol_cells = 10.0) {
  double worst = 0.0;
  const double tol = slope_tol_cells * u.domain.dx();
  for (int i = 0; i < u.domain.n_points; ++i) {
    const double sl = u.slope_left(i), sr = u.slope_right(i);
    if (std::abs(sl - sr) > tol) continue;
    worst = std::max(worst,
                     std::abs(model.hamiltonian(u.domain.x(i), 0.5 * (sl + sr), u[i])));
  }
  return worst;
}

}  // namespace wkam

#endif
