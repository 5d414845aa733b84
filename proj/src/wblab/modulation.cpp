#include "wblab/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "wblab/errors.hpp"
#include "wblab/nonlinearity.hpp"

namespace wblab {

double modulation_functional(const StateField& state, double s, double d,
                             std::shared_ptr<const PhiProfile> profile,
                             const WeightedGrid& grid, const Params& params) {
    auto pack = build_spectral_pack(d, grid, params, /*w0_only=*/true);
    TiltedProfile tp(std::move(profile), d);
    StateField dev = state - tp.state(grid, s);
    return inner_upsilon(dev, pack.W0, grid);
}

double solve_modulation(const StateField& state, double s,
                        std::shared_ptr<const PhiProfile> profile, double d_init,
                        const WeightedGrid& grid, const Params& params,
                        const ModulationOptions& opts, ModulationDiag* diag) {
    if (!(std::abs(d_init) < 1.0))
        throw std::invalid_argument("solve_modulation: |d_init| < 1 required");
    if (std::abs(d_init) >= 0.9999)
        throw parameter_saturation_error("solve_modulation: d_init saturated the open interval");
    {
        TiltedProfile tp(profile, d_init);
        StateField dev = state - tp.state(grid, s);
        if (norm_H(dev, grid) > opts.eps_gate)
            throw modulation_error("solve_modulation: state outside the configured neighborhood gate");
    }

    auto phi_of_theta = [&](double theta) {
        double dd = std::tanh(theta);
        if (std::abs(dd) >= 0.99999)
            throw parameter_saturation_error("solve_modulation: |d| saturated during the solve");
        return modulation_functional(state, s, dd, profile, grid, params);
    };

    double theta = std::atanh(d_init);
    int iters = 0;
    bool bisected = false;

    // bracket by geometric expansion around the warm start
    double f0 = phi_of_theta(theta);
    if (std::abs(f0) <= opts.tol) {
        if (diag) {
            diag->iterations = 0;
            double h = 1e-6 * std::max(1.0, std::abs(theta));
            diag->dphi_dtheta = (phi_of_theta(theta + h) - phi_of_theta(theta - h)) / (2.0 * h);
        }
        return std::tanh(theta);
    }
    double lo = theta, hi = theta, flo = f0, fhi = f0;
    double step = 0.02;
    while (flo * fhi > 0.0) {
        if (++iters > opts.max_iter)
            throw modulation_error("solve_modulation: no sign change within iteration budget");
        lo -= step;
        hi += step;
        step *= 2.0;
        if (std::abs(lo) > opts.theta_cap || std::abs(hi) > opts.theta_cap) {
            if (std::abs(f0) < opts.tol) return std::tanh(theta); // already at the root
            throw modulation_error("solve_modulation: no sign change in the expanded bracket");
        }
        flo = phi_of_theta(lo);
        fhi = phi_of_theta(hi);
        if (flo * f0 < 0.0) {
            hi = theta;
            fhi = f0;
            break;
        }
        if (fhi * f0 < 0.0) {
            lo = theta;
            flo = f0;
            break;
        }
    }
    if (flo > fhi) {
        std::swap(lo, hi);
        std::swap(flo, fhi);
    }

    double f = phi_of_theta(theta);
    double slope = 0.0;
    while (std::abs(f) > opts.tol) {
        if (++iters > opts.max_iter)
            throw modulation_error("solve_modulation: iteration budget exceeded");
        double h = 1e-6 * std::max(1.0, std::abs(theta));
        slope = (phi_of_theta(theta + h) - phi_of_theta(theta - h)) / (2.0 * h);
        double next = (slope != 0.0) ? theta - f / slope : theta;
        bool inside = (slope != 0.0) && next > std::min(lo, hi) && next < std::max(lo, hi);
        if (!inside) {
            next = 0.5 * (lo + hi);
            bisected = true;
        }
        theta = next;
        f = phi_of_theta(theta);
        if ((f < 0.0) == (flo < 0.0)) {
            lo = theta;
            flo = f;
        } else {
            hi = theta;
            fhi = f;
        }
    }

    if (diag) {
        diag->iterations = iters;
        diag->bisection_fallback = bisected;
        double h = 1e-6 * std::max(1.0, std::abs(theta));
        diag->dphi_dtheta = (phi_of_theta(theta + h) - phi_of_theta(theta - h)) / (2.0 * h);
    }
    return std::tanh(theta);
}

ModulationPoint decompose_point(const StateField& state, double s, double d,
                                std::shared_ptr<const PhiProfile> profile,
                                const WeightedGrid& grid, const Params& params,
                                double eta1) {
    TiltedProfile tp(std::move(profile), d);
    StateField q = state - tp.state(grid, s);

    auto pack = build_spectral_pack(d, grid, params);
    auto dec = project(q, pack, grid);

    Nonlinearity nl(params);
    auto terms = eval_perturbation_terms(q.w1, tp, s, grid, params, nl);
    double r_minus = -grid.integrate(terms.H) - grid.integrate(terms.F_hat);

    ModulationPoint pt;
    pt.s = s;
    pt.d = d;
    pt.theta = std::atanh(d);
    pt.alpha1 = dec.alpha1;
    pt.alpha0 = dec.alpha0;
    pt.alpha_minus = dec.alpha_minus;
    pt.A = dec.alpha1 * dec.alpha1;
    pt.R_minus = r_minus;
    pt.B = dec.alpha_minus * dec.alpha_minus + 2.0 * r_minus;
    pt.f0 = pt.B + eta1 * grid.integrate(q.w1.cwiseProduct(q.w2));
    pt.q_norm_H = norm_H(q, grid);
    return pt;
}

std::vector<ModulationPoint> track_modulation(const Trajectory& traj,
                                              std::shared_ptr<const PhiProfile> profile,
                                              double d_init, const WeightedGrid& grid,
                                              const Params& params, double eta1,
                                              const ModulationOptions& opts) {
    std::vector<ModulationPoint> out;
    double d_prev = d_init;
    for (std::size_t k = 0; k < traj.s.size(); ++k) {
        ModulationDiag diag;
        double d = solve_modulation(traj.states[k], traj.s[k], profile, d_prev, grid,
                                    params, opts, &diag);
        ModulationPoint pt =
            decompose_point(traj.states[k], traj.s[k], d, profile, grid, params, eta1);
        pt.newton_iters = diag.iterations;
        out.push_back(pt);
        d_prev = d;
    }
    return out;
}

namespace {

// centered differences on a possibly nonuniform sample grid
std::vector<double> centered_derivative(const std::vector<double>& s,
                                        const std::vector<double>& v) {
    std::vector<double> out(s.size(), 0.0);
    for (std::size_t k = 1; k + 1 < s.size(); ++k)
        out[k] = (v[k + 1] - v[k - 1]) / (s[k + 1] - s[k - 1]);
    return out;
}

InequalityCheck fit_validate(const std::vector<double>& lhs,
                             const std::vector<double>& env, std::size_t lo,
                             std::size_t hi) {
    InequalityCheck chk;
    std::size_t mid = lo + (hi - lo) / 2;
    for (std::size_t k = lo; k < mid; ++k)
        if (env[k] > 1e-300) chk.fitted_C = std::max(chk.fitted_C, lhs[k] / env[k]);
    if (chk.fitted_C <= 0.0) chk.fitted_C = 1e-300;
    for (std::size_t k = mid; k < hi; ++k)
        if (env[k] > 1e-300)
            chk.worst_ratio = std::max(chk.worst_ratio, lhs[k] / (chk.fitted_C * env[k]));
    chk.pass = chk.worst_ratio <= 2.0;
    return chk;
}

} // namespace

AuditReport audit_inequalities(const std::vector<ModulationPoint>& trace,
                               const Params& params, double s_tail) {
    if (trace.size() < 20)
        throw std::invalid_argument("audit_inequalities: need at least 20 points");
    const std::size_t n = trace.size();
    std::vector<double> s(n), d(n), a1(n), am(n);
    for (std::size_t k = 0; k < n; ++k) {
        s[k] = trace[k].s;
        d[k] = trace[k].d;
        a1[k] = trace[k].alpha1;
        am[k] = trace[k].alpha_minus;
    }
    auto dprime = centered_derivative(s, d);
    auto a1prime = centered_derivative(s, a1);

    std::vector<double> lhs_d(n, 0.0), lhs_a(n, 0.0), lhs_b(n, 0.0);
    std::vector<double> env(n, 0.0), env_b(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double a2 = a1[k] * a1[k] + am[k] * am[k];
        env[k] = a2 + std::sqrt(a2) / std::pow(s[k], params.a);
        env_b[k] = am[k] * am[k] + std::pow(s[k], -0.5 * (params.a + 1.0));
        lhs_d[k] = std::abs(dprime[k]) / (1.0 - d[k] * d[k]);
        lhs_a[k] = std::abs(a1prime[k] - a1[k]);
        lhs_b[k] = a1[k] * a1[k];
    }

    AuditReport rep;
    rep.dprime = fit_validate(lhs_d, env, 1, n - 1);
    rep.alpha1_ode = fit_validate(lhs_a, env, 1, n - 1);
    rep.barrier = fit_validate(lhs_b, env_b, 1, n - 1);

    rep.tail_start = s_tail;
    rep.tail_quarter = true;
    rep.tail_f0_bracket = true;
    for (std::size_t k = 0; k < n; ++k) {
        if (s[k] < s_tail) continue;
        ++rep.tail_points;
        const auto& pt = trace[k];
        double slack = 1e-15 * (1.0 + std::abs(pt.B));
        if (pt.A > 0.25 * pt.B + slack) rep.tail_quarter = false;
        if (pt.B < 0.5 * pt.f0 - slack || pt.B > 2.0 * pt.f0 + slack)
            rep.tail_f0_bracket = false;
    }
    return rep;
}

RateFit fit_decay(const std::vector<ModulationPoint>& trace, RateKind kind,
                  const Params& params, double window_lo, double window_hi) {
    std::vector<double> xs, ys, ss;
    for (const auto& pt : trace) {
        if (pt.s < window_lo || pt.s > window_hi) continue;
        if (pt.q_norm_H <= 0.0) continue;
        ss.push_back(pt.s);
        xs.push_back(pt.s);
        ys.push_back(std::log(pt.q_norm_H));
    }
    if (xs.size() < 5) throw fit_error("fit_decay: window holds fewer than 5 usable points");

    RateFit fit;
    fit.kind = kind;
    fit.window_lo = ss.front();
    fit.window_hi = ss.back();

    if (kind == RateKind::exponential) {
        double n = static_cast<double>(xs.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            sx += xs[k];
            sy += ys[k];
            sxx += xs[k] * xs[k];
            sxy += xs[k] * ys[k];
        }
        double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        double intercept = (sy - slope * sx) / n;
        if (!(slope < 0.0)) throw fit_error("fit_decay: tail is not decaying");
        fit.exponent = -slope;
        fit.prefactor = std::exp(intercept);
        double ssq = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            double r = ys[k] - (intercept + slope * xs[k]);
            ssq += r * r;
        }
        double drop = std::abs(ys.front() - ys.back());
        fit.residual = std::sqrt(ssq / n) / std::max(drop, 1e-300);
        return fit;
    }

    // polynomial bound: sup of s^{(a+1)/4} |q| with a split-half envelope check
    double expo = 0.25 * (params.a + 1.0);
    fit.exponent = expo;
    double sup_first = 0.0, sup_second = 0.0;
    std::size_t mid = xs.size() / 2;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        double v = std::pow(ss[k], expo) * std::exp(ys[k]);
        fit.sup_scaled = std::max(fit.sup_scaled, v);
        if (k < mid)
            sup_first = std::max(sup_first, v);
        else
            sup_second = std::max(sup_second, v);
    }
    fit.envelope_noninc = sup_second <= sup_first * (1.0 + 1e-9);
    if (!std::isfinite(fit.sup_scaled)) throw fit_error("fit_decay: unbounded scaled tail");
    return fit;
}

ThetaConvergence theta_convergence(const std::vector<ModulationPoint>& trace,
                                   const Params& params,
                                   std::optional<double> mu_hat) {
    if (trace.size() < 4) throw std::invalid_argument("theta_convergence: need >= 4 points");
    const std::size_t n = trace.size();
    double t0 = trace[n - 3].theta, t1 = trace[n - 2].theta, t2 = trace[n - 1].theta;

    // oscillation guard on the closing differences
    double d01 = std::abs(t1 - t0), d12 = std::abs(t2 - t1);
    if (d12 > 3.0 * d01 + 1e-14)
        throw fit_error("theta_convergence: theta tail oscillates, no limit extracted");

    double denom = (t2 - t1) - (t1 - t0);
    double theta_inf = (std::abs(denom) > 1e-300)
                           ? t2 - (t2 - t1) * (t2 - t1) / denom
                           : t2;
    // squared-difference acceleration can overshoot on noisy flat tails
    if (!std::isfinite(theta_inf) || std::abs(theta_inf - t2) > 10.0 * (d12 + 1e-300))
        theta_inf = t2;

    ThetaConvergence out;
    out.theta_inf = theta_inf;
    out.d_inf = std::tanh(theta_inf);
    double s_end = trace.back().s;
    for (const auto& pt : trace) {
        double gap = std::abs(pt.theta - theta_inf);
        double scale = mu_hat ? std::exp(0.5 * (*mu_hat) * (pt.s - s_end))
                              : std::pow(pt.s, 0.5 * (params.a + 1.0));
        out.tail_sup_scaled = std::max(out.tail_sup_scaled, gap * scale);
    }
    return out;
}

} // namespace wblab
