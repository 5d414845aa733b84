#include "doctest.h"

#include <cmath>
#include <memory>
#include <random>

#include "wblab/errors.hpp"
#include "wblab/evolve.hpp"
#include "wblab/grid.hpp"
#include "wblab/nonlinearity.hpp"
#include "wblab/profile.hpp"
#include "wblab/soliton.hpp"
#include "wblab/spectral.hpp"

using namespace wblab;

namespace {
const Params P32(3.0, 2.0);

std::shared_ptr<const PhiProfile> profile_cache(bool f_on) {
    static auto build = [](bool on) {
        double A, B;
        default_initial_data(P32, on, &A, &B);
        auto traj = solve_ode(A, B, P32, on, 1e-12);
        return std::make_shared<const PhiProfile>(PhiProfile::build(traj, 200.0));
    };
    static auto on = build(true);
    static auto off = build(false);
    return f_on ? on : off;
}

Field random_field(const WeightedGrid& grid, std::mt19937_64& rng, double amp,
                   int modes = 8) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(grid.size());
    for (int k = 0; k < modes; ++k) c[k] = amp * unif(rng) / (1.0 + k);
    return grid.from_coeffs(c);
}
} // namespace

TEST_CASE("rhs: solitons are stationary with f off, zero maps to zero") {
    WeightedGrid grid(64, P32);
    Nonlinearity nl(P32);
    for (double d : {0.0, 0.5, -0.5}) {
        StateField q{kappa_d(d, grid, P32), Field::Zero(grid.size())};
        StateField r = evolve_rhs(q, 10.0, grid, P32, false, nl);
        CHECK(norm_H(r, grid) <= 1e-6);
    }
    StateField z = StateField::zero(grid.size());
    StateField rz_on = evolve_rhs(z, 5.0, grid, P32, true, nl);
    CHECK(norm_H(rz_on, grid) == 0.0);
}

TEST_CASE("rhs matches the time derivative of the exact boosted solution") {
    WeightedGrid grid(64, P32);
    Nonlinearity nl(P32);
    auto prof = profile_cache(true);
    TiltedProfile tp(prof, 0.4);
    double s = 30.0;
    StateField w = tp.state(grid, s);
    StateField rhs = evolve_rhs(w, s, grid, P32, true, nl);

    auto fd_err = [&](double h) {
        StateField wp = tp.state(grid, s + h);
        StateField wm = tp.state(grid, s - h);
        StateField fd = (1.0 / (2.0 * h)) * (wp - wm);
        return norm_H(fd - rhs, grid);
    };
    double e1 = fd_err(1e-3);
    CHECK(e1 <= 1e-5);
    // centered difference converges at second order until the exactness floor
    double e2 = fd_err(2e-3);
    CHECK(e1 <= e2 / 2.5 + 1e-9);
}

TEST_CASE("constant soliton state is preserved over a span") {
    WeightedGrid grid(48, P32);
    StateField init{Field::Constant(grid.size(), P32.kappa0), Field::Zero(grid.size())};
    EvolveConfig cfg;
    cfg.s0 = 10.0;
    cfg.s_end = 15.0;
    cfg.f_enabled = false;
    auto traj = evolve(init, cfg, grid, P32);
    StateField dev = traj.states.back() - init;
    CHECK(norm_H(dev, grid) <= 1e-8);
}

TEST_CASE("manufactured solution tracking and temporal order") {
    auto prof = profile_cache(true);
    TiltedProfile tp(prof, 0.4);
    WeightedGrid grid(48, P32);
    double s0 = 30.0, span = 5.0;
    StateField init = tp.state(grid, s0);

    auto run = [&](double ds) {
        EvolveConfig cfg;
        cfg.s0 = s0;
        cfg.s_end = s0 + span;
        cfg.ds = ds;
        cfg.f_enabled = true;
        cfg.sample_stride = 64;
        auto traj = evolve(init, cfg, grid, P32);
        double sup = 0.0;
        for (std::size_t k = 0; k < traj.s.size(); ++k) {
            StateField dev = traj.states[k] - tp.state(grid, traj.s[k]);
            sup = std::max(sup, norm_H(dev, grid));
        }
        return sup;
    };

    double ds0 = stable_ds(grid.size());
    CHECK(run(ds0) <= 1e-4);
    CHECK(run(ds0 / 2.0) <= 1e-4);

    // The exact-solution trajectory varies too slowly to expose the temporal
    // order (its tracking error sits on the profile-exactness floor), so the
    // order is measured by self-convergence on a perturbed run at a coarse
    // step where truncation dominates.
    std::mt19937_64 rng(77);
    StateField pinit = init;
    pinit.w1 += random_field(grid, rng, 1e-2);
    pinit.w2 += random_field(grid, rng, 1e-2);
    auto final_state = [&](double ds) {
        EvolveConfig cfg;
        cfg.s0 = s0;
        cfg.s_end = s0 + 2.0;
        cfg.ds = ds;
        cfg.f_enabled = true;
        cfg.sample_stride = 1 << 20;
        return evolve(pinit, cfg, grid, P32).states.back();
    };
    double dsr = 0.8 / grid.size();
    StateField a = final_state(dsr);
    StateField b = final_state(dsr / 2.0);
    StateField c = final_state(dsr / 4.0);
    double order = std::log2(norm_H(a - b, grid) / norm_H(b - c, grid));
    CHECK(order >= 3.5);
}

TEST_CASE("divergence and NaN produce typed errors") {
    WeightedGrid grid(32, P32);
    EvolveConfig cfg;
    cfg.s0 = 1.0;
    cfg.s_end = 6.0;
    cfg.f_enabled = false;
    cfg.divergence_threshold = 100.0;
    // far above the soliton, the focusing nonlinearity ramps up the norm
    StateField init{Field::Constant(grid.size(), 10.0 * P32.kappa0),
                    Field::Constant(grid.size(), 10.0)};
    CHECK_THROWS_AS(evolve(init, cfg, grid, P32), numeric_error);
}

TEST_CASE("perturbation terms: zeros, f-off degeneracy") {
    WeightedGrid grid(48, P32);
    Nonlinearity nl(P32);
    double s = 40.0;

    auto prof_on = profile_cache(true);
    TiltedProfile tp(prof_on, 0.3);
    Field zero = Field::Zero(grid.size());
    auto terms0 = eval_perturbation_terms(zero, tp, s, grid, P32, nl);
    CHECK(terms0.h.cwiseAbs().maxCoeff() == 0.0);
    CHECK(terms0.H.cwiseAbs().maxCoeff() == 0.0);
    CHECK(terms0.f_hat.cwiseAbs().maxCoeff() == 0.0);
    CHECK(terms0.F_hat.cwiseAbs().maxCoeff() == 0.0);

    auto prof_off = profile_cache(false);
    TiltedProfile tp_off(prof_off, 0.3);
    std::mt19937_64 rng(5);
    Field q1 = random_field(grid, rng, 1e-2);
    auto terms_off = eval_perturbation_terms(q1, tp_off, s, grid, P32, nl);
    CHECK(terms_off.f_hat.cwiseAbs().maxCoeff() == 0.0);
    CHECK(terms_off.V_bar.cwiseAbs().maxCoeff() <= 1e-5);
}

TEST_CASE("mean-value bounds for the nonlinear remainders") {
    WeightedGrid grid(48, P32);
    Nonlinearity nl(P32);
    auto prof = profile_cache(true);
    TiltedProfile tp(prof, 0.3);
    double s = 40.0;
    std::mt19937_64 rng(11);

    double c_prev_h = 0.0, c_prev_f = 0.0;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        Field q1 = random_field(grid, rng, eps);
        auto terms = eval_perturbation_terms(q1, tp, s, grid, P32, nl);
        double ch = 0.0, cf = 0.0;
        for (int j = 0; j < grid.size(); ++j) {
            double k = kappa_scalar(0.3, grid.nodes()[j], P32);
            double envelope = std::pow(k, P32.p - 2.0) * q1[j] * q1[j] +
                              std::pow(std::abs(q1[j]), P32.p);
            if (envelope > 1e-300) {
                ch = std::max(ch, std::abs(terms.h[j]) / envelope);
                cf = std::max(cf, std::abs(terms.f_hat[j]) / envelope);
            }
        }
        if (c_prev_h > 0.0) {
            CHECK(ch <= 4.0 * c_prev_h + 1e-10);
            CHECK(cf <= 4.0 * c_prev_f + 1e-10);
        }
        c_prev_h = ch;
        c_prev_f = cf;
    }
}

TEST_CASE("H and F_hat are the antiderivatives of h and f_hat") {
    WeightedGrid grid(48, P32);
    Nonlinearity nl(P32);
    auto prof = profile_cache(true);
    TiltedProfile tp(prof, 0.3);
    double s = 40.0;
    std::mt19937_64 rng(23);
    Field q1 = random_field(grid, rng, 1e-1);

    double h = 1e-5;
    auto tp_terms = [&](const Field& q) {
        return eval_perturbation_terms(q, tp, s, grid, P32, nl);
    };
    auto base = tp_terms(q1);
    Field q1p = q1.array() + h;
    Field q1m = q1.array() - h;
    auto up = tp_terms(q1p);
    auto um = tp_terms(q1m);
    for (int j = 0; j < grid.size(); j += std::max(1, grid.size() / 20)) {
        double fd_h = (up.H[j] - um.H[j]) / (2.0 * h);
        CHECK(std::abs(fd_h - base.h[j]) <= 1e-7 + 1e-4 * std::abs(base.h[j]));
        double fd_f = (up.F_hat[j] - um.F_hat[j]) / (2.0 * h);
        CHECK(std::abs(fd_f - base.f_hat[j]) <= 1e-7 + 1e-4 * std::abs(base.f_hat[j]));
    }
}

TEST_CASE("deviation equation residual: exact, perturbed, ablated") {
    auto prof = profile_cache(true);
    WeightedGrid grid(48, P32);
    // moderate s0: the two parts of the effective potential cancel to leading
    // order in 1/s^a, so the ablation signal is strongest early
    double d_star = 0.3, s0 = 5.0;
    TiltedProfile tp(prof, d_star);

    // exact trajectory sampled analytically: residual at round-off scale
    Trajectory exact;
    for (int k = 0; k <= 8; ++k) {
        double s = s0 + 0.05 * k;
        exact.s.push_back(s);
        exact.states.push_back(tp.state(grid, s));
    }
    std::vector<double> dconst(exact.s.size(), d_star);
    auto res0 = q_equation_residual(exact, dconst, prof, grid, P32);
    for (double r : res0) CHECK(r <= 1e-8);

    // perturbed run: small residual that shrinks under sampling refinement;
    // low-frequency data keeps the differencing error under the term sizes
    std::mt19937_64 rng(31);
    StateField init = tp.state(grid, s0);
    init.w1 += random_field(grid, rng, 1e-2, 4);
    init.w2 += random_field(grid, rng, 1e-2, 4);

    auto run_residual = [&](double ds_div, bool drop) {
        EvolveConfig cfg;
        cfg.s0 = s0;
        cfg.s_end = s0 + 0.5;
        cfg.ds = stable_ds(grid.size()) / ds_div;
        cfg.f_enabled = true;
        cfg.sample_stride = 1;
        auto traj = evolve(init, cfg, grid, P32);
        std::vector<double> dt(traj.s.size(), d_star);
        auto res = q_equation_residual(traj, dt, prof, grid, P32, drop);
        double worst = 0.0;
        for (double r : res) worst = std::max(worst, r);
        return worst;
    };

    double coarse = run_residual(4.0, false);
    double fine = run_residual(8.0, false);
    CHECK(coarse <= 1e-3);
    CHECK(fine <= coarse / 2.0);

    // without the potential correction the residual saturates at its size
    double ablated_fine = run_residual(8.0, true);
    double ablated_finer = run_residual(16.0, true);
    CHECK(ablated_fine >= 2.0 * fine);
    CHECK(ablated_finer >= 0.5 * ablated_fine);
}

TEST_CASE("q_equation_residual input validation") {
    auto prof = profile_cache(true);
    WeightedGrid grid(32, P32);
    Trajectory tiny;
    tiny.s = {30.0, 30.1};
    tiny.states = {StateField::zero(grid.size()), StateField::zero(grid.size())};
    std::vector<double> dt = {0.3, 0.3};
    CHECK_THROWS_AS(q_equation_residual(tiny, dt, prof, grid, P32),
                    std::invalid_argument);
}
