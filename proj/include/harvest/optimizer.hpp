#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "harvest/link_budget.hpp"
#include "harvest/orientation_stats.hpp"
#include "harvest/scenario.hpp"
#include "harvest/vlc_channel.hpp"

namespace harvest {

/// Channel-dependent coefficients of the optimization problem, fixed for one
/// solve: alpha scales the VLC SNR, beta_lin = eta H P_led, zeta the RF SNR
/// per watt, z the harvest prefactor.
struct SolveContext {
    double h = 0.0;         // H_VLC seen by the relay
    double alpha = 0.0;     // (e/2pi)(eta P H)^2 / sigma^2
    double beta_lin = 0.0;  // eta H P
    double zeta = 0.0;      // |h_RF|^2 / (G_RF N0)
    double z = 0.0;         // 0.75 eta H P V_t
    SystemParams params;

    double rate_vlc(double t_vlc, double a_peak) const {
        return t_vlc * params.b_vlc * std::log2(1.0 + alpha * a_peak * a_peak);
    }
    double energy1(double t_vlc, double i_b) const {
        if (beta_lin <= 0.0) return 0.0;
        return z * t_vlc * i_b * std::log1p(beta_lin * i_b / params.i_dark);
    }
    /// Phase-2 harvest for a block whose RF phase lasts t_rf (LED at i_max).
    double energy2(double t_rf) const {
        if (beta_lin <= 0.0) return 0.0;
        return z * t_rf * params.i_max * std::log1p(beta_lin * params.i_max / params.i_dark);
    }
    double rate_rf(double t_rf, double e_h) const {
        if (e_h <= 0.0) return 0.0;
        return t_rf * params.b_rf * std::log2(1.0 + zeta * e_h / t_rf);
    }
    double bias_lo() const { return (params.i_min + params.i_max) / 2.0; }
    double bias_hi() const { return params.i_max; }
};

/// Deterministic-orientation context: the PD faces upward, so the incidence
/// angle (and the FoV indicator) follow from the geometry.
inline SolveContext make_context(const Geometry& g, const SystemParams& p,
                                 const RfFading& fading = {}) {
    validate(g);
    SolveContext c;
    c.params = p;
    const double m = lambertian_order(g.theta_hpbw);
    c.h = vlc_gain(g, m, upward_incidence_angle(g)).h_vlc;
    const double sig = p.eta * p.p_led * c.h;
    c.alpha = kEulerE / (2.0 * kPi) * sig * sig / shot_noise_power(p);
    c.beta_lin = p.eta * c.h * p.p_led;
    c.zeta = fading.h_rf_sq / (rf_path_gain(g.d_u, p) * rf_noise_power(p));
    c.z = 0.75 * p.eta * c.h * p.p_led * p.v_t;
    return c;
}

/// MM iteration state (sub-problem 1 inner loop).
struct OptimizerState {
    double phi = 0.0;
    double i_b_iter = 0.0;
    int iteration = 0;
    std::vector<std::pair<double, double>> history;  // (phi_sub1, phi_sub2)
    bool converged = false;
};

struct MmSurrogate {
    double g0 = 0.0;     // energy at the expansion point (tangency)
    double slope = 0.0;  // d/dI of the harvest at the expansion point

    double operator()(double i_b, double i_b_t) const {
        return std::max(g0 + slope * (i_b - i_b_t), 0.0);
    }
};

/// First-order surrogate of the harvest constraint around i_b_t. The exact
/// ln(1+x) energy is expanded (value and slope), so tangency holds exactly;
/// the tangent of the convex harvest under-approximates it, keeping the
/// surrogate feasible set inside the true one.
inline MmSurrogate mm_linearize(double i_b_t, double t_vlc, double e2_prev,
                                const SolveContext& c) {
    const double arg = c.beta_lin * i_b_t / c.params.i_dark;
    if (!(arg > 0.0)) throw ValidationError("mm_linearize: nonpositive log argument");
    MmSurrogate s;
    s.g0 = c.energy1(t_vlc, i_b_t) + e2_prev;
    s.slope = c.z * t_vlc * (std::log1p(arg) + arg / (1.0 + arg));
    return s;
}

struct Sub1Result {
    double i_b = 0.0;
    double a_peak = 0.0;
    double e_h = 0.0;
    double phi = 0.0;
    bool feasible = false;
    bool converged = false;
    int iterations = 0;
};

namespace detail {

/// Crossing of a strictly decreasing f and nondecreasing g on [lo, hi].
/// Assumes f(lo) > g(lo) and f(hi) <= g(hi).
template <typename F, typename G>
double bisect_crossing(F&& f, G&& g, double lo, double hi, double tol = 1e-12) {
    for (int i = 0; i < 200 && hi - lo > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > g(mid)) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Sub-problem 1: time split fixed, maximize min(R_VLC, R_RF) over the
/// restricted bias interval with A = i_max - i_b binding and the harvest
/// replaced by its MM surrogate; the expansion point is refreshed until it
/// settles. c_3 feasibility is decided on the exact (not surrogate) rate.
inline Sub1Result solve_subproblem1(double t_vlc, double e2_prev, const SolveContext& c,
                                    std::optional<double> i_b_init = std::nullopt) {
    if (!(t_vlc > 0.0 && t_vlc < 1.0)) {
        throw ValidationError("solve_subproblem1: t_vlc in (0,1) violated");
    }
    const double lo = c.bias_lo();
    const double hi = c.bias_hi();
    const double t_rf = 1.0 - t_vlc;

    Sub1Result res;
    OptimizerState st;
    st.i_b_iter = i_b_init.value_or((c.params.i_min + 3.0 * c.params.i_max) / 4.0);

    if (c.h <= 0.0) {  // relay outside the FoV: no light, nothing to optimize
        res.i_b = lo;
        res.a_peak = hi - lo;
        res.e_h = e2_prev;
        res.phi = 0.0;
        res.feasible = c.rate_rf(t_rf, res.e_h) >= c.params.r_th;
        res.converged = true;
        return res;
    }

    for (st.iteration = 1; st.iteration <= 50; ++st.iteration) {
        const MmSurrogate sur = mm_linearize(st.i_b_iter, t_vlc, e2_prev, c);
        auto f = [&](double i) { return c.rate_vlc(t_vlc, hi - i); };
        auto g = [&](double i) { return c.rate_rf(t_rf, sur(i, st.i_b_iter)); };
        const double i_new =
            f(lo) <= g(lo) ? lo : detail::bisect_crossing(f, g, lo, hi);
        const bool settled = std::abs(i_new - st.i_b_iter) < 1e-6;
        st.i_b_iter = i_new;
        if (settled) {
            st.converged = true;
            break;
        }
    }

    double i_b = st.i_b_iter;
    auto exact_rf = [&](double i) { return c.rate_rf(t_rf, c.energy1(t_vlc, i) + e2_prev); };
    bool feasible = exact_rf(i_b) >= c.params.r_th;
    if (!feasible && exact_rf(hi) >= c.params.r_th) {
        // R_RF is increasing in i_b: move up to the exact c_3 boundary.
        double a = i_b, b = hi;
        for (int i = 0; i < 200 && b - a > 1e-12; ++i) {
            const double mid = 0.5 * (a + b);
            if (exact_rf(mid) < c.params.r_th) a = mid;
            else b = mid;
        }
        i_b = b;
        feasible = true;
    }

    res.i_b = i_b;
    res.a_peak = hi - i_b;
    res.e_h = c.energy1(t_vlc, i_b) + e2_prev;
    res.phi = std::min(c.rate_vlc(t_vlc, res.a_peak), c.rate_rf(t_rf, res.e_h));
    res.feasible = feasible;
    res.converged = st.converged;
    res.iterations = st.iteration;
    return res;
}

struct Sub2Result {
    double t_vlc = 0.0;
    double t_rf = 0.0;
    double e_h = 0.0;
    double phi = 0.0;
    bool feasible = false;
};

/// Sub-problem 2: bias fixed, maximize min(R_VLC, R_RF) over the time split
/// with the carryover energy held at e2_prev. R_VLC is strictly increasing in
/// t_vlc; a bracketing scan locates the global bracket and golden-section
/// refines it. Infeasible when no split satisfies c_3.
inline Sub2Result solve_subproblem2(double i_b, double a_peak, double e2_prev,
                                    const SolveContext& c) {
    auto rf_of = [&](double t) { return c.rate_rf(1.0 - t, c.energy1(t, i_b) + e2_prev); };
    auto phi_of = [&](double t) {
        const double rr = rf_of(t);
        if (rr < c.params.r_th) return -1.0;
        return std::min(c.rate_vlc(t, a_peak), rr);
    };

    constexpr int kScan = 999;
    double best_phi = -1.0, best_t = 0.5;
    double best_rr = -1.0, best_rr_t = 0.5;
    int best_k = -1;
    for (int k = 1; k <= kScan; ++k) {
        const double t = static_cast<double>(k) / (kScan + 1);
        const double phi = phi_of(t);
        if (phi > best_phi) {
            best_phi = phi;
            best_t = t;
            best_k = k;
        }
        if (const double rr = rf_of(t); rr > best_rr) {
            best_rr = rr;
            best_rr_t = t;
        }
    }

    Sub2Result res;
    if (best_phi < 0.0) {  // max_t R_RF < r_th
        res.t_vlc = best_rr_t;
        res.t_rf = 1.0 - best_rr_t;
        res.e_h = c.energy1(best_rr_t, i_b) + e2_prev;
        res.phi = std::min(c.rate_vlc(best_rr_t, a_peak), best_rr);
        res.feasible = false;
        return res;
    }

    double a = static_cast<double>(best_k - 1) / (kScan + 1);
    double b = static_cast<double>(best_k + 1) / (kScan + 1);
    a = std::max(a, 1e-9);
    b = std::min(b, 1.0 - 1e-9);
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1v = phi_of(x1), f2v = phi_of(x2);
    for (int i = 0; i < 200 && b - a > 1e-10; ++i) {
        if (f1v > f2v) {
            b = x2; x2 = x1; f2v = f1v;
            x1 = b - kInvPhi * (b - a);
            f1v = phi_of(x1);
        } else {
            a = x1; x1 = x2; f1v = f2v;
            x2 = a + kInvPhi * (b - a);
            f2v = phi_of(x2);
        }
    }
    double t = 0.5 * (a + b);
    if (phi_of(t) < best_phi) t = best_t;  // refinement never loses the scan max
    res.t_vlc = t;
    res.t_rf = 1.0 - t;
    res.e_h = c.energy1(t, i_b) + e2_prev;
    res.phi = phi_of(t);
    res.feasible = true;
    return res;
}

// ---------------------------------------------------------------------------
// Full solvers

enum class SolverKind { cyclic, grid, fixed_time };

inline std::string to_string(SolverKind s) {
    switch (s) {
        case SolverKind::cyclic: return "cyclic";
        case SolverKind::grid: return "grid";
        case SolverKind::fixed_time: return "fixed_time";
    }
    return "?";
}

struct OptimizationResult {
    double i_b_opt = 0.0;
    double t_vlc_opt = 0.5;
    double rate_opt = 0.0;
    double r_vlc = 0.0;
    double r_rf = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;  // phase-2 harvest at the optimum (next block's carryover)
    double e_h = 0.0;
    PolicyCase case_id = PolicyCase::jo_with_e2;
    int iterations = 0;
    bool feasible = false;
    bool converged = false;
    bool high_snr_ok = false;  // alpha A^2 > 10 at the optimum (validity guard)
    SolverKind solver = SolverKind::cyclic;
    std::vector<std::pair<double, double>> history;  // (phi_sub1, phi_sub2)
};

namespace detail {

/// Carryover energy model for a candidate split: fixed value when the caller
/// pinned e2_prev, otherwise the steady-state value of the same allocation
/// (every block identical), or zero for the *_noE2 policies.
struct CarryModel {
    bool carry = false;
    std::optional<double> fixed;
    const SolveContext* ctx = nullptr;

    double operator()(double t_vlc) const {
        if (!carry) return 0.0;
        if (fixed) return *fixed;
        return ctx->energy2(1.0 - t_vlc);
    }
};

inline void finalize_result(OptimizationResult& r, double i_b, double t_vlc,
                            const SolveContext& c, const CarryModel& e2_of) {
    const double a_peak = c.params.i_max - i_b;
    const double e2p = e2_of(t_vlc);
    r.i_b_opt = i_b;
    r.t_vlc_opt = t_vlc;
    r.e1 = c.energy1(t_vlc, i_b);
    r.e2 = e2_of.carry ? c.energy2(1.0 - t_vlc) : 0.0;
    r.e_h = r.e1 + e2p;
    r.r_vlc = c.rate_vlc(t_vlc, a_peak);
    r.r_rf = c.rate_rf(1.0 - t_vlc, r.e_h);
    r.rate_opt = std::min(r.r_vlc, r.r_rf);
    r.feasible = r.r_rf >= c.params.r_th;
    r.high_snr_ok = c.alpha * a_peak * a_peak > 10.0;
}

}  // namespace detail

/// Joint optimization of (i_b, t_vlc). Runs the cyclic alternation of the two
/// sub-problems from t_vlc = 0.5 (the per-iteration pair (phi_sub1, phi_sub2)
/// is recorded), then sweeps the sub-problem-1 value over the time split and
/// golden-refines; the alternation alone stalls at the slice optimum of its
/// starting split, so the sweep is what reaches the joint optimum. Returns
/// the best feasible candidate.
inline OptimizationResult solve_cyclic(const PolicySpec& policy, const Geometry& g,
                                       const SystemParams& p,
                                       std::optional<double> e2_prev = std::nullopt,
                                       const RfFading& fading = {}) {
    if (fixed_time(policy.case_id)) {
        throw ValidationError("solve_cyclic: JO_* policy case required");
    }
    const SolveContext c = make_context(g, p, fading);
    const detail::CarryModel e2_of{uses_carryover(policy.case_id), e2_prev, &c};

    OptimizationResult res;
    res.case_id = policy.case_id;
    res.solver = SolverKind::cyclic;

    double best_phi = -1.0, best_i = c.bias_lo(), best_t = 0.5;
    bool any_feasible = false;
    auto consider = [&](double phi, double i_b, double t, bool feasible) {
        if (feasible && !any_feasible) {
            any_feasible = true;
            best_phi = phi; best_i = i_b; best_t = t;
            return;
        }
        if (feasible == any_feasible && phi > best_phi) {
            best_phi = phi; best_i = i_b; best_t = t;
        }
    };

    // Cyclic alternation.
    double t = 0.5;
    for (int outer = 0; outer < 30; ++outer) {
        const double e2p = e2_of(t);
        const Sub1Result s1 = solve_subproblem1(t, e2p, c);
        consider(s1.phi, s1.i_b, t, s1.feasible);
        const Sub2Result s2 = solve_subproblem2(s1.i_b, s1.a_peak, e2p, c);
        consider(s2.phi, s1.i_b, s2.t_vlc, s2.feasible && s1.feasible);
        res.history.emplace_back(s1.phi, s2.phi);
        t = s2.t_vlc;
        if (!s2.feasible) break;
        if (std::abs(s1.phi - s2.phi) <= 1e-4 * std::abs(s2.phi)) {
            res.converged = true;
            break;
        }
    }

    // Envelope sweep over the time split.
    auto value_at = [&](double tv) {
        const Sub1Result s = solve_subproblem1(tv, e2_of(tv), c);
        consider(s.phi, s.i_b, tv, s.feasible);
        return s.feasible ? s.phi : -1.0;
    };
    constexpr int kScan = 255;
    double scan_best = -1.0;
    int scan_k = -1;
    for (int k = 1; k <= kScan; ++k) {
        const double tv = static_cast<double>(k) / (kScan + 1);
        const double v = value_at(tv);
        if (v > scan_best) {
            scan_best = v;
            scan_k = k;
        }
    }
    if (scan_best >= 0.0) {
        double a = std::max(static_cast<double>(scan_k - 1) / (kScan + 1), 1e-9);
        double b = std::min(static_cast<double>(scan_k + 1) / (kScan + 1), 1.0 - 1e-9);
        constexpr double kInvPhi = 0.6180339887498949;
        double x1 = b - kInvPhi * (b - a);
        double x2 = a + kInvPhi * (b - a);
        double v1 = value_at(x1), v2 = value_at(x2);
        for (int i = 0; i < 200 && b - a > 1e-9; ++i) {
            if (v1 > v2) {
                b = x2; x2 = x1; v2 = v1;
                x1 = b - kInvPhi * (b - a);
                v1 = value_at(x1);
            } else {
                a = x1; x1 = x2; v1 = v2;
                x2 = a + kInvPhi * (b - a);
                v2 = value_at(x2);
            }
        }
        value_at(0.5 * (a + b));
    }

    detail::finalize_result(res, best_i, best_t, c, e2_of);
    res.iterations = static_cast<int>(res.history.size());
    if (!any_feasible) res.feasible = false;
    return res;
}

/// Fixed time allocation: one sub-problem-1 solve at the policy's time split.
inline OptimizationResult solve_fixed_time(const PolicySpec& policy, const Geometry& g,
                                           const SystemParams& p,
                                           std::optional<double> e2_prev = std::nullopt,
                                           const RfFading& fading = {}) {
    if (!fixed_time(policy.case_id)) {
        throw ValidationError("solve_fixed_time: FTA_* policy case required");
    }
    const SolveContext c = make_context(g, p, fading);
    const detail::CarryModel e2_of{uses_carryover(policy.case_id), e2_prev, &c};
    const double t = policy.fixed_t_vlc;
    const Sub1Result s1 = solve_subproblem1(t, e2_of(t), c);

    OptimizationResult res;
    res.case_id = policy.case_id;
    res.solver = SolverKind::fixed_time;
    res.converged = s1.converged;
    res.iterations = s1.iterations;
    res.history.emplace_back(s1.phi, s1.phi);
    detail::finalize_result(res, s1.i_b, t, c, e2_of);
    res.feasible = s1.feasible && res.feasible;
    return res;
}

// ---------------------------------------------------------------------------
// Exhaustive grids

struct GridBounds {
    double i_lo = 0.0, i_hi = 0.0;
    double t_lo = 0.0, t_hi = 0.0;
};

struct GridResult {
    double i_b = 0.0;
    double t_vlc = 0.0;
    double value = 0.0;
    std::size_t evaluations = 0;
};

/// Deterministic full-grid scan of objective(i_b, t_vlc); ties break toward
/// smaller i_b, then smaller t_vlc.
inline GridResult grid_oracle(const std::function<double(double, double)>& objective,
                              const GridBounds& b, double step_i, double step_t) {
    if (!(step_i > 0.0 && step_t > 0.0)) {
        throw ValidationError("grid_oracle: positive steps violated");
    }
    GridResult best;
    bool first = true;
    for (double i = b.i_lo; i <= b.i_hi + 1e-12; i += step_i) {
        const double i_b = std::min(i, b.i_hi);
        for (double t = b.t_lo; t <= b.t_hi + 1e-12; t += step_t) {
            const double tv = std::min(t, b.t_hi);
            const double v = objective(i_b, tv);
            ++best.evaluations;
            if (first || v > best.value) {
                best = {i_b, tv, v, best.evaluations};
                first = false;
            }
        }
    }
    return best;
}

/// The deterministic joint objective used for oracle comparisons: exact rates,
/// steady-state carryover, -1 where c_3 fails.
inline std::function<double(double, double)> make_joint_objective(
    const SolveContext& c, bool carry) {
    return [&c, carry](double i_b, double t_vlc) {
        const double e2p = carry ? c.energy2(1.0 - t_vlc) : 0.0;
        const double rr = c.rate_rf(1.0 - t_vlc, c.energy1(t_vlc, i_b) + e2p);
        if (rr < c.params.r_th) return -1.0;
        return std::min(c.rate_vlc(t_vlc, c.params.i_max - i_b), rr);
    };
}

/// Random-orientation optimization: exhaustive grid over (i_b, t_vlc) with the
/// closed-form averaged objective min(avg R_VLC bound, avg R_RF bound); FTA
/// policies pin the time split, *_noE2 policies drop the carryover term.
/// Infeasible grids report the best infeasible point, flagged.
inline OptimizationResult solve_random_orientation(
    const PolicySpec& policy, const OrientationModel& model, const Geometry& g,
    const SystemParams& p, double step_i = 5e-3, double step_t = 5e-3,
    const RfFading& fading = {}) {
    validate(model);
    validate(g);
    if (model.theta2 > g.phi_fov + 1e-12) {
        throw ValidationError(
            "solve_random_orientation: theta2 <= phi_fov violated (wide-FoV assumption)");
    }
    if (model.theta2 >= kPi / 2 - 1e-12) {
        throw ValidationError("solve_random_orientation: cos(theta2) > 0 violated");
    }
    if (!(step_i > 0.0 && step_t > 0.0)) {
        throw ValidationError("solve_random_orientation: positive grid steps violated");
    }

    const double m = lambertian_order(g.theta_hpbw);
    const double h_c = deterministic_gain(g, m);
    const bool carry = uses_carryover(policy.case_id);
    const bool fta = fixed_time(policy.case_id);

    // Orientation-dependent pieces shared by every grid point.
    const double c_theta = normalization_constant(model);
    const double dtheta = model.theta2 - model.theta1;
    const double thi = std::cos(model.theta1) * std::cos(model.theta1);
    const double tlo = std::cos(model.theta2) * std::cos(model.theta2);
    const double xhi = h_c * std::cos(model.theta1);
    const double xlo = h_c * std::cos(model.theta2);
    const double d3 = f3(xhi, h_c) - f3(xlo, h_c);
    const double d4 = f4(xhi, h_c) - f4(xlo, h_c);
    const double sig1 = p.eta * p.p_led * h_c;
    const double l2_per_a2 = kEulerE / (2.0 * kPi) * sig1 * sig1 / shot_noise_power(p);
    const double log_m4 = std::log(p.eta * p.p_led * p.i_max / p.i_dark);
    const double rf_denom = rf_path_gain(g.d_u, p) * rf_noise_power(p);

    struct Point {
        double i_b = 0.0, t = 0.5, phi = -1.0, rv = 0.0, rr = 0.0, eh = 0.0;
        bool valid = false;
    };
    Point best_feas, best_infeas;

    auto evaluate = [&](double i_b, double t) {
        const double a_peak = p.i_max - i_b;
        const double l2 = l2_per_a2 * a_peak * a_peak;
        double rv = 0.0;
        if (l2 > 0.0) {
            const double l1 = c_theta * t * p.b_vlc / dtheta;
            rv = l1 * (f1(thi, l2) + f2(thi, l2) - f1(tlo, l2) - f2(tlo, l2)) /
                 std::numbers::ln2;
        }
        const double m1 = 0.75 * t * p.eta * p.p_led * i_b * p.v_t;
        const double log_m2 = std::log(p.eta * p.p_led * i_b / p.i_dark);
        double eh = m1 * (log_m2 * d3 + d4);
        if (carry) {
            const double m3 = 0.75 * (1.0 - t) * p.eta * p.p_led * p.i_max * p.v_t;
            eh += m3 * (log_m4 * d3 + d4);
        }
        eh /= h_c * dtheta;
        const double t_rf = 1.0 - t;
        const double rr =
            eh > 0.0 ? t_rf * p.b_rf * std::log2(1.0 + eh / t_rf * fading.h_rf_sq / rf_denom)
                     : 0.0;
        const double phi = std::min(rv, rr);
        Point& slot = rr >= p.r_th ? best_feas : best_infeas;
        if (!slot.valid || phi > slot.phi) {
            slot = {i_b, t, phi, rv, rr, eh, true};
        }
    };

    std::size_t evals = 0;
    for (double i = (p.i_min + p.i_max) / 2.0; i <= p.i_max + 1e-12; i += step_i) {
        const double i_b = std::min(i, p.i_max);
        if (fta) {
            evaluate(i_b, policy.fixed_t_vlc);
            ++evals;
        } else {
            for (double t = step_t; t < 1.0 - 1e-12; t += step_t) {
                evaluate(i_b, t);
                ++evals;
            }
        }
    }

    const Point& pick = best_feas.valid ? best_feas : best_infeas;
    OptimizationResult res;
    res.case_id = policy.case_id;
    res.solver = SolverKind::grid;
    res.converged = true;
    res.iterations = static_cast<int>(evals);
    res.i_b_opt = pick.i_b;
    res.t_vlc_opt = pick.t;
    res.r_vlc = pick.rv;
    res.r_rf = pick.rr;
    res.rate_opt = pick.phi;
    res.e_h = pick.eh;
    res.feasible = best_feas.valid;
    const double a_peak = p.i_max - pick.i_b;
    res.high_snr_ok = l2_per_a2 * a_peak * a_peak > 10.0;
    // split of the averaged harvest for reporting
    BlockAllocation alloc{pick.i_b, a_peak, pick.t, 1.0 - pick.t};
    res.e1 = avg_harvest_closed_form(alloc, model, h_c, p, E2Mode::no_carryover);
    res.e2 = carry ? pick.eh - res.e1 : 0.0;
    return res;
}

}  // namespace harvest
