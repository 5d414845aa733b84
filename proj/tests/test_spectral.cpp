#include "doctest.h"

#include <cmath>
#include <random>

#include "wblab/errors.hpp"
#include "wblab/grid.hpp"
#include "wblab/soliton.hpp"
#include "wblab/spectral.hpp"

using namespace wblab;

namespace {
const Params P32(3.0, 2.0);

StateField random_smooth(const WeightedGrid& grid, std::mt19937_64& rng, int modes = 10) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(grid.size());
    Eigen::VectorXd c2 = Eigen::VectorXd::Zero(grid.size());
    for (int k = 0; k < modes; ++k) {
        c1[k] = unif(rng) / (1.0 + k);
        c2[k] = unif(rng) / (1.0 + k);
    }
    return {grid.from_coeffs(c1), grid.from_coeffs(c2)};
}
} // namespace

TEST_CASE("kappa field: constants, algebraic identity, stationarity") {
    WeightedGrid grid(64, P32);
    CHECK_THROWS_AS(kappa_d(1.0, grid, P32), std::invalid_argument);

    Field k0 = kappa_d(0.0, grid, P32);
    for (int j = 0; j < grid.size(); ++j)
        CHECK(k0[j] == doctest::Approx(P32.kappa0).epsilon(1e-15));

    for (double d : {0.3, -0.7, 0.9}) {
        Field k = kappa_d(d, grid, P32);
        double want = P32.kappa0 * std::pow(1.0 - d * d, 1.0 / (P32.p - 1.0));
        for (int j = 0; j < grid.size(); ++j) {
            double y = grid.nodes()[j];
            double lhs = k[j] * std::pow(1.0 + d * y, 2.0 / (P32.p - 1.0));
            CHECK(lhs == doctest::Approx(want).epsilon(1e-13));
        }
    }

    // L kappa - 2(p+1)/(p-1)^2 kappa + kappa^p = 0
    for (double d : {0.0, 0.5, -0.5, 0.9, -0.9}) {
        Field k = kappa_d(d, grid, P32);
        Field res = grid.apply_L(k, P32);
        double c = 2.0 * (P32.p + 1.0) / ((P32.p - 1.0) * (P32.p - 1.0));
        for (int j = 0; j < grid.size(); ++j)
            res[j] += -c * k[j] + std::pow(k[j], P32.p);
        CHECK(norm_L2rho(res, grid) <= 1e-6);
    }
}

TEST_CASE("eigenfields of L_d") {
    WeightedGrid grid(64, P32);
    for (double d : {0.0, 0.5, -0.5, 0.9, -0.9}) {
        auto pack = build_spectral_pack(d, grid, P32);
        StateField r1 = apply_Ld(pack.F1, pack, grid, P32) - pack.F1;
        CHECK(norm_H(r1, grid) <= 1e-6);
        StateField r0 = apply_Ld(pack.F0, pack, grid, P32);
        CHECK(norm_H(r0, grid) <= 1e-6);
    }
    StateField z = StateField::zero(grid.size());
    StateField lz = apply_Ld(z, 0.3, grid, P32);
    CHECK(norm_H(lz, grid) == 0.0);
}

TEST_CASE("eigen-residuals decay spectrally with n") {
    // d = 0.9 keeps the pole of F1 near the interval so the decay is visible
    // before the round-off floor
    double res_prev = 0.0;
    for (int n : {24, 48}) {
        WeightedGrid grid(n, P32);
        auto pack = build_spectral_pack(0.9, grid, P32);
        StateField r1 = apply_Ld(pack.F1, pack, grid, P32) - pack.F1;
        double res = norm_H(r1, grid);
        if (res_prev > 0.0) CHECK(res <= std::max(res_prev * 1e-2, 5e-13));
        res_prev = res;
    }
}

TEST_CASE("inner product properties") {
    WeightedGrid grid(48, P32);
    std::mt19937_64 rng(7);
    StateField q = random_smooth(grid, rng);
    StateField r = random_smooth(grid, rng);

    double nq = norm_H(q, grid);
    CHECK(inner_upsilon(q, q, grid) == doctest::Approx(nq * nq).epsilon(1e-12));
    CHECK(inner_upsilon(q, r, grid) == doctest::Approx(inner_upsilon(r, q, grid)).epsilon(1e-14));
    // operator-form cross-check path
    double a = inner_upsilon(q, r, grid);
    double b = inner_upsilon_operator_form(q, r, grid, P32);
    CHECK(std::abs(a - b) <= 1e-8 * (1.0 + std::abs(a)));
    StateField z = StateField::zero(grid.size());
    CHECK(inner_upsilon(z, r, grid) == 0.0);
}

TEST_CASE("frozen adjoint oracle at d=0, p=3") {
    // With r2 = 1-y^2 the lambda=1 problem has the polynomial solution
    // r1 = 34/11 + 6 y^2/11 and the normalization constant is 3/16:
    // Upsilon(W1~, F1) = 34/11*4/3 + 6/11*4/15 + 16/15 = 16/3.
    WeightedGrid grid(32, P32);
    auto pack = build_spectral_pack(0.0, grid, P32);
    CHECK(pack.c1 == doctest::Approx(3.0 / 16.0).epsilon(1e-10));
    for (int j = 0; j < grid.size(); ++j) {
        double y = grid.nodes()[j];
        double want1 = (34.0 / 11.0 + 6.0 * y * y / 11.0) * (3.0 / 16.0);
        double want2 = (1.0 - y * y) * (3.0 / 16.0);
        CHECK(std::abs(pack.W1.w1[j] - want1) <= 1e-8);
        CHECK(std::abs(pack.W1.w2[j] - want2) <= 1e-12);
    }
}

TEST_CASE("biorthogonality matrix is the identity") {
    WeightedGrid grid(64, P32);
    for (double d : {0.0, 0.5, -0.5, 0.9, -0.9}) {
        auto pack = build_spectral_pack(d, grid, P32);
        CHECK(std::abs(inner_upsilon(pack.W1, pack.F1, grid) - 1.0) <= 1e-8);
        CHECK(std::abs(inner_upsilon(pack.W0, pack.F0, grid) - 1.0) <= 1e-8);
        CHECK(std::abs(inner_upsilon(pack.W1, pack.F0, grid)) <= 1e-8);
        CHECK(std::abs(inner_upsilon(pack.W0, pack.F1, grid)) <= 1e-8);
    }
}

TEST_CASE("adjoint norms bounded over the d sweep") {
    WeightedGrid grid(64, P32);
    double worst = 0.0;
    for (double d : {0.0, 0.5, -0.5, 0.9, -0.9}) {
        auto pack = build_spectral_pack(d, grid, P32);
        worst = std::max({worst, norm_H(pack.W1, grid), norm_H(pack.W0, grid)});
    }
    CHECK(std::isfinite(worst));
    CHECK(worst < 50.0);
}

TEST_CASE("adjoint eigen-relation against random grid states") {
    // Upsilon(W0, L q) = 0 and Upsilon(W1, (L-1) q) = 0; for grid states the
    // truncated adjoints pair exactly, so this holds to round-off at any n
    for (int n : {32, 64}) {
        WeightedGrid grid(n, P32);
        auto pack = build_spectral_pack(0.5, grid, P32);
        std::mt19937_64 local(99);
        double worst = 0.0;
        for (int rep = 0; rep < 10; ++rep) {
            StateField q = random_smooth(grid, local);
            double nq = norm_H(q, grid);
            StateField Lq = apply_Ld(q, pack, grid, P32);
            worst = std::max(worst, std::abs(inner_upsilon(pack.W0, Lq, grid)) / nq);
            double v = inner_upsilon(pack.W1, Lq, grid) - inner_upsilon(pack.W1, q, grid);
            worst = std::max(worst, std::abs(v) / nq);
        }
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("projection and reassembly") {
    WeightedGrid grid(64, P32);
    auto pack = build_spectral_pack(0.3, grid, P32);

    auto dec1 = project(pack.F1, pack, grid);
    CHECK(std::abs(dec1.alpha1 - 1.0) <= 1e-8);
    CHECK(std::abs(dec1.alpha0) <= 1e-8);
    CHECK(norm_H(dec1.q_minus, grid) <= 1e-7);

    auto dec0 = project(StateField::zero(grid.size()), pack, grid);
    CHECK(dec0.alpha1 == 0.0);
    CHECK(dec0.alpha0 == 0.0);
    CHECK(dec0.alpha_minus == 0.0);

    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 50; ++rep) {
        StateField q = random_smooth(grid, rng);
        auto dec = project(q, pack, grid);
        StateField back = dec.alpha1 * pack.F1 + dec.alpha0 * pack.F0 + dec.q_minus;
        CHECK(norm_H(back - q, grid) <= 1e-10);
        // projected remainder has no growing modes
        CHECK(std::abs(inner_upsilon(pack.W1, dec.q_minus, grid)) <= 1e-9);
        CHECK(std::abs(inner_upsilon(pack.W0, dec.q_minus, grid)) <= 1e-9);
        // coercivity of the form on the remainder
        CHECK(bilinear_phi(dec.q_minus, dec.q_minus, pack, grid) >=
              -1e-8 * std::pow(norm_H(dec.q_minus, grid), 2));
    }
}

TEST_CASE("alpha_minus clamp semantics") {
    CHECK(clamped_alpha_minus(-1e-12, 1.0) == 0.0);
    CHECK(clamped_alpha_minus(4.0, 1.0) == 2.0);
    CHECK_THROWS_AS(clamped_alpha_minus(-1e-6, 1.0), coercivity_error);
}

TEST_CASE("bilinear form: two routes, operator identity, continuity") {
    WeightedGrid grid(64, P32);
    auto pack = build_spectral_pack(0.4, grid, P32);
    std::mt19937_64 rng(17);

    double cont = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        StateField q = random_smooth(grid, rng);
        StateField r = random_smooth(grid, rng);
        double a = bilinear_phi(q, r, pack, grid);
        double b = bilinear_phi_operator_form(q, r, pack, grid, P32);
        CHECK(std::abs(a - b) <= 1e-8 * (1.0 + std::abs(a)));
        cont = std::max(cont, std::abs(a) / (norm_H(q, grid) * norm_H(r, grid)));
    }
    CHECK(std::isfinite(cont));
    CHECK(cont < 50.0);

    // phi_d(q-, L_d q-) = -(4/(p-1)) integral of q-,2^2 rho/(1-y^2)
    for (int rep = 0; rep < 20; ++rep) {
        StateField q = random_smooth(grid, rng);
        auto dec = project(q, pack, grid);
        const StateField& qm = dec.q_minus;
        double lhs = bilinear_phi(qm, apply_Ld(qm, pack, grid, P32), pack, grid);
        double rhs = -4.0 / (P32.p - 1.0) *
                     grid.integrate_singular(qm.w2.cwiseProduct(qm.w2));
        CHECK(std::abs(lhs - rhs) <= 1e-6 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("norm equivalence audit") {
    WeightedGrid grid(48, P32);
    auto pack = build_spectral_pack(0.0, grid, P32);
    CHECK_THROWS_AS(norm_equivalence_audit(pack, grid, P32, 5), std::invalid_argument);

    auto rep = norm_equivalence_audit(pack, grid, P32, 100);
    CHECK(rep.used == 100);
    CHECK(rep.raw_low > 0.0);
    CHECK(std::isfinite(rep.raw_high));
    CHECK(rep.raw1_low > 0.0);
    CHECK(std::isfinite(rep.raw1_high));

    // F1 pairs to alpha_1 = 1 exactly, so the raw1 ratio is its H norm
    auto dec = project(pack.F1, pack, grid);
    double ratio = norm_H(pack.F1, grid) / (std::abs(dec.alpha1) + dec.alpha_minus);
    CHECK(std::isfinite(ratio));
    CHECK(ratio == doctest::Approx(norm_H(pack.F1, grid)).epsilon(1e-6));
}
