#include "wblab/profile.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wblab/errors.hpp"
#include "wblab/ode_rk45.hpp"
#include "wblab/soliton.hpp"

namespace wblab {

namespace {

// locate the cell containing x in an ascending vector, clamped to valid cells
std::size_t locate(const std::vector<double>& xs, double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t k = static_cast<std::size_t>(it - xs.begin());
    if (k == 0) return 0;
    if (k >= xs.size()) return xs.size() - 2;
    return k - 1;
}

double hermite(const std::vector<double>& xs, const std::vector<double>& f,
               const std::vector<double>& df, const std::vector<double>& ddf, double x) {
    std::size_t k = locate(xs, x);
    return QuinticHermite::eval(x, xs[k], xs[k + 1], f[k], df[k], ddf[k], f[k + 1],
                                df[k + 1], ddf[k + 1]);
}

double hermite_derivative(const std::vector<double>& xs, const std::vector<double>& f,
                          const std::vector<double>& df, const std::vector<double>& ddf,
                          double x) {
    std::size_t k = locate(xs, x);
    return QuinticHermite::eval_derivative(x, xs[k], xs[k + 1], f[k], df[k], ddf[k],
                                           f[k + 1], df[k + 1], ddf[k + 1]);
}

} // namespace

double OdeTrajectory::phi0(double tq) const { return hermite(t, phi, dphi, ddphi, tq); }
double OdeTrajectory::dphi0(double tq) const {
    return hermite_derivative(t, phi, dphi, ddphi, tq);
}

void default_initial_data(const Params& params, bool f_enabled, double* A, double* B) {
    double a_floor = 0.0;
    if (f_enabled) {
        // |f(xi)| <= xi^p/2 iff log^a(2+xi^2) >= 2
        double thr = std::exp(std::pow(2.0, 1.0 / params.a)) - 2.0;
        a_floor = thr > 0.0 ? std::sqrt(thr) : 0.0;
    }
    *A = std::max(10.0 * params.kappa0, a_floor);
    double FA = f_enabled ? Nonlinearity(params).F(*A) : 0.0;
    *B = std::sqrt(2.0 * std::pow(*A, params.p + 1.0) / (params.p + 1.0) + 2.0 * FA);
}

OdeTrajectory solve_ode(double A, double B, const Params& params, bool f_enabled,
                        double tol) {
    if (!(A > 0.0) || !(B > 0.0))
        throw std::invalid_argument("solve_ode: A > 0 and B > 0 required");
    if (B * B - std::pow(A, params.p + 1.0) / (params.p + 1.0) < 0.0)
        throw std::invalid_argument("solve_ode: admissibility B^2 - A^{p+1}/(p+1) >= 0 violated");
    Nonlinearity nl(params);
    if (f_enabled && std::abs(nl.f(A)) > 0.5 * std::pow(A, params.p))
        throw std::invalid_argument("solve_ode: A too small, |f(A)| > A^p/2");

    const double phi_stop = 1e8;
    auto rhs = [&](double, const std::array<double, 2>& y) -> std::array<double, 2> {
        double fv = f_enabled ? nl.f(y[0]) : 0.0;
        return {y[1], std::pow(y[0], params.p) + fv};
    };
    auto stop = [&](double, const std::array<double, 2>& y) { return y[0] >= phi_stop; };

    Rk45<2> solver;
    solver.rtol = tol;
    solver.atol = tol * 1e-2;
    solver.h_init = 1e-6;
    // generous horizon; blow-up fires the stop long before
    auto res = solver.integrate(rhs, 0.0, 1e6, {A, B}, stop);
    if (!res.stopped)
        throw no_blowup_error("solve_ode: threshold not reached before step underflow");

    OdeTrajectory traj;
    traj.params = params;
    traj.f_enabled = f_enabled;
    traj.A = A;
    traj.B = B;
    traj.M0 = B * B - 2.0 * std::pow(A, params.p + 1.0) / (params.p + 1.0) -
              (f_enabled ? 2.0 * nl.F(A) : 0.0);
    traj.t.reserve(res.samples.size());
    for (const auto& smp : res.samples) {
        if (!(smp.y[0] > 0.0) || !(smp.y[1] > 0.0))
            throw numeric_error("solve_ode: monotonicity lost along the trajectory");
        traj.t.push_back(smp.x);
        traj.phi.push_back(smp.y[0]);
        traj.dphi.push_back(smp.y[1]);
        traj.ddphi.push_back(smp.dy[1]);
    }

    // quadratic extrapolation of z = phi^{-(p-1)/2}, which hits zero at T
    double gamma = 0.5 * (params.p - 1.0);
    double ph = traj.phi.back(), dph = traj.dphi.back(), ddph = traj.ddphi.back();
    double z = std::pow(ph, -gamma);
    double zd = -gamma * std::pow(ph, -gamma - 1.0) * dph;
    double zdd = gamma * (gamma + 1.0) * std::pow(ph, -gamma - 2.0) * dph * dph -
                 gamma * std::pow(ph, -gamma - 1.0) * ddph;
    double disc = zd * zd - 2.0 * z * zdd;
    double tau = (disc > 0.0) ? 2.0 * z / (-zd + std::sqrt(disc)) : -z / zd;
    traj.T_blowup = traj.t.back() + tau;
    return traj;
}

PhiProfile::PhiProfile(const Params& params, bool f_enabled)
    : params_(params), f_enabled_(f_enabled),
      nl_(std::make_shared<Nonlinearity>(params)) {}

double PhiProfile::similarity_rhs(double value, double s) const {
    double p = params_.p;
    double arg = 2.0 * std::pow(value, p + 1.0) / (p + 1.0);
    if (f_enabled_) arg += 2.0 * nl_->G_scaled(value, s);
    double es = -2.0 * (p + 1.0) * s / (p - 1.0);
    if (es > -700.0) arg += std::exp(es) * M0_;
    if (arg < 0.0) {
        if (arg < -1e-12) throw numeric_error("similarity_rhs: negative first-integral argument");
        arg = 0.0;
    }
    return -2.0 * value / (p - 1.0) + std::sqrt(arg);
}

double PhiProfile::ddphi(double s) const {
    double ph = phi(s), dph = dphi(s);
    double p = params_.p;
    double out = std::pow(ph, p) - 2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0)) * ph -
                 (p + 3.0) / (p - 1.0) * dph;
    if (f_enabled_) out += nl_->fterm_scaled(ph, s);
    return out;
}

PhiProfile PhiProfile::build(const OdeTrajectory& traj, double s_max) {
    PhiProfile prof(traj.params, traj.f_enabled);
    prof.T_ = traj.T_blowup;
    prof.M0_ = traj.M0;
    prof.tt_ = traj.t;
    prof.tphi_ = traj.phi;
    prof.tdphi_ = traj.dphi;
    prof.tddphi_ = traj.ddphi;

    prof.s_min_ = -std::log(prof.T_ - traj.t_first());
    double s_resolved = -std::log(std::max(prof.T_ - traj.t_last(), 1e-300));
    prof.s_join_ = std::min(s_resolved - 2.0, 12.0);
    if (prof.s_join_ < prof.s_min_) prof.s_join_ = prof.s_min_;
    prof.s_max_ = s_max;

    if (s_max <= prof.s_join_) {
        prof.s_max_ = s_max;
        prof.s_join_ = s_max;
        return prof;
    }

    // Backward integration of the first-order similarity equation from
    // asymptotic data; the pad contracts the asymptotic truncation error.
    const double pad = 30.0;
    double s_start = prof.s_max_ + pad;
    double phi_start = prof.params_.kappa0;
    if (prof.f_enabled_) {
        double cpa = prof.params_.kappa0 *
                     std::pow(prof.params_.p - 1.0, prof.params_.a - 1.0) /
                     std::pow(4.0, prof.params_.a);
        phi_start -= cpa / std::pow(s_start, prof.params_.a);
    }

    auto rhs = [&](double sigma, const std::array<double, 1>& y) -> std::array<double, 1> {
        return {-prof.similarity_rhs(y[0], s_start - sigma)};
    };
    Rk45<1> solver;
    solver.rtol = 1e-12;
    solver.atol = 1e-15;
    solver.h_init = 1e-3;
    solver.h_max = 2.0;
    auto res = solver.integrate(rhs, 0.0, s_start - prof.s_join_, {phi_start});

    prof.ss_.reserve(res.samples.size());
    for (auto it = res.samples.rbegin(); it != res.samples.rend(); ++it) {
        double s = s_start - it->x;
        double ph = it->y[0];
        double dph = prof.similarity_rhs(ph, s);
        prof.ss_.push_back(s);
        prof.sphi_.push_back(ph);
        prof.sdphi_.push_back(dph);
        // second derivative from the second-order equation
        double p = prof.params_.p;
        double dd = std::pow(ph, p) - 2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0)) * ph -
                    (p + 3.0) / (p - 1.0) * dph;
        if (prof.f_enabled_) dd += prof.nl_->fterm_scaled(ph, s);
        prof.sddphi_.push_back(dd);
    }
    prof.join_mismatch_ = std::abs(prof.phi_tbranch(prof.s_join_) - prof.sphi_.front());
    return prof;
}

PhiProfile phi_profile(const OdeTrajectory& traj, double s_max) {
    return PhiProfile::build(traj, s_max);
}

void PhiProfile::check_domain(double s) const {
    if (!(s >= s_min_ - 1e-12) || !(s <= s_max_ + 1e-12))
        throw std::domain_error("PhiProfile: s outside [s_min, s_max]");
}

double PhiProfile::phi_tbranch(double s) const {
    double tq = T_ - std::exp(-s);
    tq = std::min(std::max(tq, tt_.front()), tt_.back());
    double ph0 = hermite(tt_, tphi_, tdphi_, tddphi_, tq);
    return std::exp(-2.0 * s / (params_.p - 1.0)) * ph0;
}

double PhiProfile::phi(double s) const {
    check_domain(s);
    if (s <= s_join_ || ss_.empty()) return phi_tbranch(s);
    return hermite(ss_, sphi_, sdphi_, sddphi_, s);
}

double PhiProfile::dphi(double s) const { return similarity_rhs(phi(s), s); }

double PhiProfile::dphi_interpolant(double s) const {
    check_domain(s);
    if (s <= s_join_ || ss_.empty()) {
        double tq = T_ - std::exp(-s);
        tq = std::min(std::max(tq, tt_.front()), tt_.back());
        double ph0 = hermite(tt_, tphi_, tdphi_, tddphi_, tq);
        double dph0 = hermite_derivative(tt_, tphi_, tdphi_, tddphi_, tq);
        double p = params_.p;
        return -2.0 / (p - 1.0) * std::exp(-2.0 * s / (p - 1.0)) * ph0 +
               std::exp(-(1.0 + 2.0 / (p - 1.0)) * s) * dph0;
    }
    return hermite_derivative(ss_, sphi_, sdphi_, sddphi_, s);
}

nlohmann::json PhiProfile::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["p"] = params_.p;
    j["a"] = params_.a;
    j["f_enabled"] = f_enabled_;
    j["T_blowup"] = T_;
    j["M0"] = M0_;
    j["s_min"] = s_min_;
    j["s_join"] = s_join_;
    j["s_max"] = s_max_;
    j["t_branch"] = {{"t", tt_}, {"phi", tphi_}, {"dphi", tdphi_}, {"ddphi", tddphi_}};
    j["s_branch"] = {{"s", ss_}, {"phi", sphi_}, {"dphi", sdphi_}, {"ddphi", sddphi_}};
    return j;
}

PhiProfile PhiProfile::from_json(const nlohmann::json& j) {
    if (j.at("version").get<int>() != 1)
        throw std::invalid_argument("PhiProfile::from_json: unsupported version");
    Params params(j.at("p").get<double>(), j.at("a").get<double>());
    PhiProfile prof(params, j.at("f_enabled").get<bool>());
    prof.T_ = j.at("T_blowup").get<double>();
    prof.M0_ = j.at("M0").get<double>();
    prof.s_min_ = j.at("s_min").get<double>();
    prof.s_join_ = j.at("s_join").get<double>();
    prof.s_max_ = j.at("s_max").get<double>();
    const auto& tb = j.at("t_branch");
    prof.tt_ = tb.at("t").get<std::vector<double>>();
    prof.tphi_ = tb.at("phi").get<std::vector<double>>();
    prof.tdphi_ = tb.at("dphi").get<std::vector<double>>();
    prof.tddphi_ = tb.at("ddphi").get<std::vector<double>>();
    const auto& sb = j.at("s_branch");
    prof.ss_ = sb.at("s").get<std::vector<double>>();
    prof.sphi_ = sb.at("phi").get<std::vector<double>>();
    prof.sdphi_ = sb.at("dphi").get<std::vector<double>>();
    prof.sddphi_ = sb.at("ddphi").get<std::vector<double>>();
    return prof;
}

AsymptoticFit asymptotic_fit(const PhiProfile& profile, double s_lo, double s_hi) {
    if (!profile.f_enabled())
        throw not_applicable_error("asymptotic_fit: kappa0 - phi vanishes when f is off");
    if (!(s_hi > s_lo) || !(s_lo >= 10.0))
        throw std::invalid_argument("asymptotic_fit: require s_hi > s_lo >= 10");

    const int K = 200;
    const Params& pr = profile.params();
    double sum_x = 0, sum_y = 0, sum_xx = 0, sum_xy = 0;
    double dphi_bound = 0.0;
    std::vector<double> xs(K), ys(K);
    for (int i = 0; i < K; ++i) {
        double s = s_lo * std::pow(s_hi / s_lo, double(i) / (K - 1));
        double g = pr.kappa0 - profile.phi(s);
        if (!(g > 0.0))
            throw fit_error("asymptotic_fit: kappa0 - phi changed sign in the window");
        xs[i] = std::log(s);
        ys[i] = std::log(g);
        sum_x += xs[i];
        sum_y += ys[i];
        sum_xx += xs[i] * xs[i];
        sum_xy += xs[i] * ys[i];
        dphi_bound = std::max(dphi_bound, std::abs(profile.dphi(s)) * std::pow(s, pr.a));
    }
    double slope = (K * sum_xy - sum_x * sum_y) / (K * sum_xx - sum_x * sum_x);
    double intercept = (sum_y - slope * sum_x) / K;

    AsymptoticFit fit;
    fit.slope = slope;
    fit.prefactor = std::exp(intercept);
    fit.c_paper = pr.kappa0 * std::pow(pr.p - 1.0, pr.a - 1.0) / std::pow(4.0, pr.a);
    fit.dphi_bound = dphi_bound;
    double ss = 0.0;
    for (int i = 0; i < K; ++i) {
        double r = ys[i] - (intercept + slope * xs[i]);
        ss += r * r;
    }
    fit.fit_residual = std::sqrt(ss / K);
    return fit;
}

TiltedProfile::TiltedProfile(std::shared_ptr<const PhiProfile> profile, double d)
    : prof_(std::move(profile)), d_(d) {
    if (!(std::abs(d) < 1.0)) throw std::invalid_argument("TiltedProfile: |d| < 1 required");
}

TiltedProfile tilted_profile(std::shared_ptr<const PhiProfile> profile, double d) {
    return TiltedProfile(std::move(profile), d);
}

double TiltedProfile::shift(double y) const {
    return std::log(1.0 + d_ * y) - 0.5 * std::log(1.0 - d_ * d_);
}

double TiltedProfile::w1(double y, double s) const {
    const Params& pr = prof_->params();
    return kappa_scalar(d_, y, pr) * prof_->phi(s - shift(y)) / pr.kappa0;
}

double TiltedProfile::w2(double y, double s) const {
    const Params& pr = prof_->params();
    return kappa_scalar(d_, y, pr) * prof_->dphi(s - shift(y)) / pr.kappa0;
}

double TiltedProfile::ds_w2(double y, double s) const {
    const Params& pr = prof_->params();
    return kappa_scalar(d_, y, pr) * prof_->ddphi(s - shift(y)) / pr.kappa0;
}

double TiltedProfile::dd_w1(double y, double s) const {
    const Params& pr = prof_->params();
    double arg = s - shift(y);
    double dl = (y + d_) / ((1.0 + d_ * y) * (1.0 - d_ * d_)); // d(shift)/dd
    return dkappa_dd_scalar(d_, y, pr) * prof_->phi(arg) / pr.kappa0 -
           kappa_scalar(d_, y, pr) * dl * prof_->dphi(arg) / pr.kappa0;
}

double TiltedProfile::dd_w2(double y, double s) const {
    const Params& pr = prof_->params();
    double arg = s - shift(y);
    double dl = (y + d_) / ((1.0 + d_ * y) * (1.0 - d_ * d_));
    return dkappa_dd_scalar(d_, y, pr) * prof_->dphi(arg) / pr.kappa0 -
           kappa_scalar(d_, y, pr) * dl * prof_->ddphi(arg) / pr.kappa0;
}

double TiltedProfile::phitilde(double y, double s) const {
    return prof_->phi(s - shift(y)) / prof_->params().kappa0;
}

Field TiltedProfile::w1_field(const WeightedGrid& grid, double s) const {
    Field out(grid.size());
    for (int j = 0; j < grid.size(); ++j) out[j] = w1(grid.nodes()[j], s);
    return out;
}

StateField TiltedProfile::state(const WeightedGrid& grid, double s) const {
    StateField q;
    q.w1.resize(grid.size());
    q.w2.resize(grid.size());
    for (int j = 0; j < grid.size(); ++j) {
        q.w1[j] = w1(grid.nodes()[j], s);
        q.w2[j] = w2(grid.nodes()[j], s);
    }
    return q;
}

StateField TiltedProfile::dd_state(const WeightedGrid& grid, double s) const {
    StateField q;
    q.w1.resize(grid.size());
    q.w2.resize(grid.size());
    for (int j = 0; j < grid.size(); ++j) {
        q.w1[j] = dd_w1(grid.nodes()[j], s);
        q.w2[j] = dd_w2(grid.nodes()[j], s);
    }
    return q;
}

DerivativeBoundReport derivative_bound_audit(const TiltedProfile& tp,
                                             const WeightedGrid& grid,
                                             const std::vector<double>& s_list) {
    DerivativeBoundReport rep;
    const Params& pr = tp.profile().params();
    double d = tp.d();
    std::vector<double> sharp;
    for (double s : s_list) {
        double r1 = 0.0, r2 = 0.0;
        for (int j = 0; j < grid.size(); ++j) {
            double y = grid.nodes()[j];
            double k = kappa_scalar(d, y, pr);
            r1 = std::max(r1, std::abs(tp.ds_w1(y, s)) * std::pow(s, pr.a) / k);
            r2 = std::max(r2, (1.0 - d * d) * std::abs(tp.dd_w1(y, s)));
        }
        rep.s.push_back(s);
        rep.ds_ratio.push_back(r1);
        sharp.push_back(r1 * s);
        rep.dd_scaled.push_back(r2);
    }
    double lo = *std::min_element(rep.ds_ratio.begin(), rep.ds_ratio.end());
    double hi = *std::max_element(rep.ds_ratio.begin(), rep.ds_ratio.end());
    rep.ds_ratio_spread = (hi > 0.0) ? hi / std::max(lo, 1e-300) : 0.0;
    double slo = *std::min_element(sharp.begin(), sharp.end());
    double shi = *std::max_element(sharp.begin(), sharp.end());
    rep.ds_sharp_spread = (shi > 0.0) ? shi / std::max(slo, 1e-300) : 0.0;
    rep.bounded = std::isfinite(hi);
    rep.decreasing = true;
    for (std::size_t i = 1; i < rep.ds_ratio.size(); ++i)
        if (rep.ds_ratio[i] > 1.1 * rep.ds_ratio[i - 1]) rep.decreasing = false;
    return rep;
}

} // namespace wblab
