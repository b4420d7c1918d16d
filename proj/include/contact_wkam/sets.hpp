#ifndef CONTACT_WKAM_SETS_HPP
#define CONTACT_WKAM_SETS_HPP

#include <cmath>
#include <string>
#include <vector>

#include "contact_wkam/flow.hpp"
#include "contact_wkam/semigroup.hpp"

namespace wkam {

/// Per-grid-point classification flags with the diagnostics that justified
/// them. All detection happens on the graph of the backward solution u_ref:
/// the phase point probed at grid index i is (x_i, Du_ref(x_i), u_ref(x_i)).
struct SetReport {
  CircleDomain domain;
  GridFunction u_ref;
  std::vector<std::uint8_t> mane, aubry, strongly_static, mather_candidate;
  std::vector<double> a_gap;  // |forward limit at x - u_ref(x)|, where probed
  std::vector<double> b_gap;  // |backward limsup at x - u_ref(x)|, where probed
  double tol_mane{1e-3}, tol_static{1e-3}, tol_ss{1e-3};

  int count(const std::vector<std::uint8_t>& f) const {
    int c = 0;
    for (auto v : f) c += v != 0;
    return c;
  }
};

/// Flags points where the backward solution meets the maximal forward
/// evolution of itself; under strictly increasing H in u this equality set is
/// both the projected Mane and Aubry set.
inline std::vector<std::uint8_t> mane_membership(const GridFunction& u_minus,
                                                 const GridFunction& u_plus_max, double tol) {
  std::vector<std::uint8_t> flags(static_cast<std::size_t>(u_minus.size()), 0);
  for (int i = 0; i < u_minus.size(); ++i)
    flags[static_cast<std::size_t>(i)] = std::abs(u_minus[i] - u_plus_max[i]) < tol ? 1 : 0;
  return flags;
}

struct MembershipVerdict {
  bool member{false};
  double gap{0.0};
};

/// Static test at one grid point: the forward limit from (x, u_ref(x)),
/// evaluated along its own orbit (diagonal case plus sampled later times),
/// must reproduce the orbit's u-values.
inline MembershipVerdict static_membership(const HamiltonianModel& model,
                                           const GridFunction& u_ref, int x_index,
                                           double t_max, double dt, double tol,
                                           double v_max = 6.0) {
  const CircleDomain& dom = u_ref.domain;
  const int i = dom.index_wrap(x_index);
  // sample times spanning one relaxation scale
  const double span = std::min(dom.circumference, 10.0 / std::max(model.lambda, 0.1));
  const LimitResult lim =
      limit_forward(model, dom, i, u_ref[i], t_max, dt, 2.0, tol, v_max, true);
  MembershipVerdict v;
  v.gap = std::abs(lim.value[i] - u_ref[i]);
  Trajectory orbit = integrate(model, {dom.x(i), u_ref.slope_centered(i), u_ref[i]},
                               span, dt);
  for (int s = 1; s <= 3; ++s) {
    const auto k = static_cast<std::size_t>(
        std::llround(span / (4.0 * dt) * s));
    if (k >= orbit.states.size()) break;
    const PhaseState& q = orbit.states[k];
    v.gap = std::max(v.gap, std::abs(lim.value.interp(q.x) - q.u));
  }
  v.member = v.gap < tol && lim.converged;
  return v;
}

/// Strongly static test at one grid point: the backward limsup from
/// (x, u_ref(x)) evaluated at x must reproduce u_ref(x).
inline MembershipVerdict strongly_static_membership(const HamiltonianModel& model,
                                                    const GridFunction& u_ref, int x_index,
                                                    double t_max, double dt, double tol,
                                                    double v_max = 6.0) {
  const CircleDomain& dom = u_ref.domain;
  const int i = dom.index_wrap(x_index);
  const LimsupResult r =
      limsup_backward(model, dom, i, u_ref[i], t_max, dt, 2.0, tol, v_max, true);
  MembershipVerdict v;
  v.gap = std::abs(r.value[i] - u_ref[i]);
  v.member = v.gap < tol && r.stabilized;
  return v;
}

/// Flags the subset of already-flagged points whose graph orbit is recurrent.
inline std::vector<std::uint8_t> mather_candidates(const HamiltonianModel& model,
                                                   const SetReport& report, double horizon,
                                                   double eps, double t_min = 2.0,
                                                   double dt = 0.01) {
  std::vector<std::uint8_t> flags(report.mane.size(), 0);
  for (int i = 0; i < report.domain.n_points; ++i) {
    if (!report.mane[static_cast<std::size_t>(i)]) continue;
    const PhaseState start{report.domain.x(i), report.u_ref.slope_centered(i),
                           report.u_ref[i]};
    const RecurrenceVerdict v =
        is_recurrent(model, report.domain, start, horizon, eps, t_min, dt);
    flags[static_cast<std::size_t>(i)] = v.verdict == Verdict::Observed ? 1 : 0;
  }
  return flags;
}

struct SetScanParams {
  double dt{0.01};
  double t_max{50.0};
  double tol_mane{1e-3};
  double tol_ss{1e-3};
  double v_max{6.0};
  // coarse pre-pass for the strongly static scan
  int coarse_stride{8};
  double coarse_dt{0.02};
  double coarse_t_max{30.0};
  double coarse_threshold{0.05};
  // recurrence probe
  double recur_horizon{20.0};
  double recur_eps{5e-3};
  double recur_t_min{2.0};
};

/// Full classification pipeline on the graph of u_minus.
///
/// Mane/Aubry flags come from the equality set of u_minus with its maximal
/// forward evolution. The strongly static scan is two-stage: a cheap coarse
/// pass of the backward-limsup gap on a strided subset locates candidate
/// regions, then every point near a candidate is re-probed at full accuracy.
inline SetReport build_set_report(const HamiltonianModel& model, const GridFunction& u_minus,
                                  const GridFunction& u_plus_max, const SetScanParams& p) {
  const CircleDomain& dom = u_minus.domain;
  const int n = dom.n_points;
  SetReport rep;
  rep.domain = dom;
  rep.u_ref = u_minus;
  rep.tol_mane = p.tol_mane;
  rep.tol_static = p.tol_mane;
  rep.tol_ss = p.tol_ss;
  rep.mane = mane_membership(u_minus, u_plus_max, p.tol_mane);
  rep.aubry = rep.mane;  // the two sets coincide when H is strictly increasing in u
  rep.a_gap.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    rep.a_gap[static_cast<std::size_t>(i)] = std::abs(u_minus[i] - u_plus_max[i]);

  rep.strongly_static.assign(static_cast<std::size_t>(n), 0);
  rep.b_gap.assign(static_cast<std::size_t>(n), 1e300);
  std::vector<std::uint8_t> near_candidate(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; i += p.coarse_stride) {
    if (!rep.aubry[static_cast<std::size_t>(i)]) continue;
    const LimsupResult r = limsup_backward(model, dom, i, u_minus[i], p.coarse_t_max,
                                           p.coarse_dt, 2.0, p.tol_ss, p.v_max, true);
    const double gap = std::abs(r.value[i] - u_minus[i]);
    rep.b_gap[static_cast<std::size_t>(i)] = gap;
    if (gap < p.coarse_threshold)
      for (int o = -p.coarse_stride; o <= p.coarse_stride; ++o)
        near_candidate[static_cast<std::size_t>(dom.index_wrap(i + o))] = 1;
  }
  for (int i = 0; i < n; ++i) {
    if (!near_candidate[static_cast<std::size_t>(i)] ||
        !rep.aubry[static_cast<std::size_t>(i)])
      continue;
    const LimsupResult r = limsup_backward(model, dom, i, u_minus[i], p.t_max, p.dt, 2.0,
                                           p.tol_ss, p.v_max, true);
    const double gap = std::abs(r.value[i] - u_minus[i]);
    rep.b_gap[static_cast<std::size_t>(i)] = gap;
    rep.strongly_static[static_cast<std::size_t>(i)] = gap < p.tol_ss && r.stabilized;
  }
  rep.mather_candidate = mather_candidates(model, rep, p.recur_horizon, p.recur_eps,
                                           p.recur_t_min, p.dt);
  // the recurrence probe only refines the chain downward
  for (int i = 0; i < n; ++i)
    rep.mather_candidate[static_cast<std::size_t>(i)] =
        rep.mather_candidate[static_cast<std::size_t>(i)] &&
        rep.strongly_static[static_cast<std::size_t>(i)];
  return rep;
}

struct DiamondVerdict {
  PhaseState X1{}, X2{};
  double lim_forward_at_x2{0.0};
  double limsup_backward_at_x1{0.0};
  bool holds{false};
  bool conclusive{true};
  double gap_forward{0.0}, gap_backward{0.0};
};

/// The two-sided barrier criterion between phase points X1 and X2: the
/// forward limit from X1 must reach u2 at x2 and the backward limsup from X2
/// must reach u1 at x1.
inline DiamondVerdict check_diamond(const HamiltonianModel& model, const CircleDomain& dom,
                                    const PhaseState& X1, const PhaseState& X2, double t_max,
                                    double dt, double tol, double v_max = 6.0) {
  DiamondVerdict v;
  v.X1 = X1;
  v.X2 = X2;
  const int i1 = dom.nearest_index(X1.x), i2 = dom.nearest_index(X2.x);
  const LimitResult fwd =
      limit_forward(model, dom, i1, X1.u, t_max, dt, 2.0, tol, v_max, true);
  const LimsupResult bwd =
      limsup_backward(model, dom, i2, X2.u, t_max, dt, 2.0, tol, v_max, true);
  v.lim_forward_at_x2 = fwd.value[i2];
  v.limsup_backward_at_x1 = bwd.value[i1];
  v.gap_forward = std::abs(v.lim_forward_at_x2 - X2.u);
  v.gap_backward = std::abs(v.limsup_backward_at_x1 - X1.u);
  v.conclusive = fwd.converged && bwd.stabilized;
  v.holds = v.conclusive && v.gap_forward < tol && v.gap_backward < tol;
  return v;
}

struct TransitOrbitResult {
  bool found{false};
  double t_used{-1.0};
  Trajectory orbit;
  PhaseState start{};
  double start_gap{0.0}, target_gap{0.0};
};

/// Builds a candidate transitive orbit from X1 to X2: for each horizon in
/// t_list, extracts the maximizing curve of the backward field seeded at X2,
/// reads off its initial phase point, and integrates it forward; succeeds
/// when the curve starts within eps of X1 and the orbit passes within eps
/// of X2.
inline TransitOrbitResult build_transitive_orbit(const HamiltonianModel& model,
                                                 const CircleDomain& dom, const PhaseState& X1,
                                                 const PhaseState& X2,
                                                 const std::vector<double>& t_list, double dt,
                                                 double eps, double v_max = 6.0) {
  TransitOrbitResult res;
  const int i1 = dom.nearest_index(X1.x), i2 = dom.nearest_index(X2.x);
  for (double tn : t_list) {
    const ActionField field =
        backward_action(model, dom, i2, X2.u, tn, dt, v_max, true);
    if (!field.is_reached(field.n_steps, i1)) continue;
    const MinimizerCurve curve = extract_minimizer(model, field, i1, field.n_steps);
    const PhaseState start{curve.positions.front(), curve.p_along.front(),
                           curve.u_along.front()};
    const double sgap = product_metric(dom, start, X1);
    if (sgap >= eps) continue;
    Trajectory orbit = integrate(model, start, tn + 2.0, dt);
    double tgap = 1e300;
    for (const PhaseState& q : orbit.states)
      tgap = std::min(tgap, product_metric(dom, q, X2));
    if (tgap < eps) {
      res.found = true;
      res.t_used = tn;
      res.orbit = std::move(orbit);
      res.start = start;
      res.start_gap = sgap;
      res.target_gap = tgap;
      return res;
    }
  }
  return res;
}

/// The minimal forward solution through the base point x0: the backward
/// limsup barrier seeded at (x0, u_minus(x0)).
inline GridFunction minimal_forward_solution(const HamiltonianModel& model,
                                             const GridFunction& u_minus, int x0_index,
                                             double t_max, double dt, double v_max = 6.0) {
  const LimsupResult r =
      limsup_backward(model, u_minus.domain, x0_index, u_minus[x0_index], t_max, dt, 2.0,
                      1e-3, v_max, true);
  return r.value;
}

struct InclusionViolation {
  int grid_index{-1};
  std::string chain_link;  // which inclusion broke
};

struct InclusionReport {
  int n_mane{0}, n_aubry{0}, n_strongly_static{0}, n_mather{0};
  std::vector<InclusionViolation> violations;
  std::vector<int> self_transit_checked;  // grid indices
  std::vector<std::uint8_t> self_transit_ok;
  bool ok() const { return violations.empty(); }
};

/// Independent re-assertion of the flag chain
/// mather => strongly_static => aubry => mane, non-emptiness of the Mather
/// candidates, and optional self-transit evidence for strongly static points.
inline InclusionReport inclusion_report(const HamiltonianModel& model, const SetReport& rep,
                                        bool with_self_transit = false, double dt = 0.01,
                                        double eps = 0.05) {
  InclusionReport out;
  const int n = rep.domain.n_points;
  out.n_mane = rep.count(rep.mane);
  out.n_aubry = rep.count(rep.aubry);
  out.n_strongly_static = rep.count(rep.strongly_static);
  out.n_mather = rep.count(rep.mather_candidate);
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (rep.mather_candidate[k] && !rep.strongly_static[k])
      out.violations.push_back({i, "mather_not_strongly_static"});
    if (rep.strongly_static[k] && !rep.aubry[k])
      out.violations.push_back({i, "strongly_static_not_aubry"});
    if (rep.aubry[k] && !rep.mane[k]) out.violations.push_back({i, "aubry_not_mane"});
  }
  if (out.n_mather == 0) out.violations.push_back({-1, "mather_candidates_empty"});
  if (with_self_transit) {
    for (int i = 0; i < n; ++i) {
      if (!rep.strongly_static[static_cast<std::size_t>(i)]) continue;
      const PhaseState X{rep.domain.x(i), rep.u_ref.slope_centered(i), rep.u_ref[i]};
      const TransitOrbitResult r =
          build_transitive_orbit(model, rep.domain, X, X, {2.0, 5.0}, dt, eps);
      out.self_transit_checked.push_back(i);
      out.self_transit_ok.push_back(r.found ? 1 : 0);
      if (!r.found) out.violations.push_back({i, "strongly_static_self_transit_missing"});
    }
  }
  return out;
}

}  // namespace wkam

#endif
