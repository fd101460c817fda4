#include <catch_amalgamated.hpp>

#include <cmath>

#include "rpq/kernels.hpp"
#include "rpq/quadrature.hpp"
#include "rpq/rng.hpp"

using namespace rpq;

TEST_CASE("heat kernel values and normalization") {
    CHECK(heat_kernel_1d(1.0, 0.0) ==
          Catch::Approx(1.0 / std::sqrt(4.0 * M_PI)).epsilon(1e-14));
    CHECK(heat_kernel_1d(1.0, 2.0) ==
          Catch::Approx(std::exp(-1.0) / std::sqrt(4.0 * M_PI)).epsilon(1e-14));
    for (double tau : {0.3, 1.0, 2.5}) {
        const auto r = quad::integrate_line(
            [tau](double x) { return heat_kernel_1d(tau, x); }, {0.0, 2.0 * std::sqrt(tau)});
        CHECK(std::abs(r.value - 1.0) <= 1e-12);
    }
    CHECK_THROWS_AS(heat_kernel_1d(0.0, 1.0), std::domain_error);
}

TEST_CASE("heat kernel against its Fourier representation") {
    // (4 pi tau)^{-1/2} e^{-x^2/4tau} = (1/2pi) int dp e^{-tau p^2} cos(p x)
    const double tau = 1.0, x = 2.0;
    const auto r = quad::integrate_line(
        [&](double p) { return std::exp(-tau * p * p) * std::cos(p * x) / (2.0 * M_PI); },
        {0.0, 1.0 / std::sqrt(tau)});
    CHECK(heat_kernel_1d(tau, x) == Catch::Approx(r.value).epsilon(1e-11));
}

TEST_CASE("equilibrium covariance") {
    CHECK(equilibrium_cov_1d(1.0, 0.0) == 0.5);
    CHECK(equilibrium_cov_1d(1.0, -3.0) == equilibrium_cov_1d(1.0, 3.0));
    CHECK(equilibrium_cov_1d(2.0, 1.0) == Catch::Approx(std::exp(-2.0) / 4.0).epsilon(1e-14));
    CHECK_THROWS_AS(equilibrium_cov_1d(-1.0, 0.0), std::domain_error);
}

TEST_CASE("equilibrium covariance against the Fourier-side oracle") {
    // e^{-m|t|}/2m = (1/2pi) int dp cos(pt)/(p^2+m^2); the integrand decays
    // only polynomially, so integrate the residue-free split exp form instead:
    // use the heat-flow identity 1/(p^2+m^2) = int_0^inf ds e^{-s(p^2+m^2)}.
    const double m = 2.0, t = 1.0;
    const auto r = quad::integrate_halfline(
        [&](double s) {
            // int dp e^{-s p^2} cos(pt) = sqrt(pi/s) e^{-t^2/4s}
            return std::exp(-s * m * m) * std::sqrt(M_PI / s) *
                   std::exp(-t * t / (4.0 * s)) / (2.0 * M_PI);
        },
        m * m);
    CHECK(equilibrium_cov_1d(m, t) == Catch::Approx(r.value).epsilon(1e-9));
}

TEST_CASE("dlambda multiplier") {
    const ModelParams p{1.0, 1.0, 1};
    CHECK(dlambda_multiplier(p, 1.0) == Catch::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
    // oracle: direct quadrature of int_0^lambda e^{-(lambda-alpha) omega} dalpha
    for (double omega : {0.5, 1.0, 3.7}) {
        const auto r = quad::integrate_interval(
            [&](double a) { return std::exp(-(p.lambda - a) * omega); }, 0.0, p.lambda);
        CHECK(dlambda_multiplier(p, omega) == Catch::Approx(r.value).epsilon(1e-12));
    }
    const ModelParams tiny{1e-12, 1.0, 1};
    CHECK(dlambda_multiplier(tiny, 1.0) == Catch::Approx(0.0).margin(1e-11));
    const ModelParams huge{1e6, 1.0, 1};
    CHECK(std::abs(dlambda_multiplier(huge, 1.0) - 1.0) <= 1e-12);
    CHECK_THROWS_AS(dlambda_multiplier(p, -1.0), std::domain_error);
}

TEST_CASE("dlambda multiplier monotone in lambda, bounded by 1/omega") {
    for (double omega : {0.25, 1.0, 4.0, 16.0}) {
        double prev = 0.0;
        for (double lam = 0.25; lam <= 8.0; lam *= 2.0) {
            const double v = dlambda_multiplier({lam, 1.0, 1}, omega);
            CHECK(v >= prev);  // equality once 1 - e^{-lambda omega} saturates
            CHECK(v > 0.0);
            CHECK(v <= 1.0 / omega);
            prev = v;
        }
    }
}

TEST_CASE("w kernel: value, evenness, positivity") {
    const ModelParams p{1.0, 1.0, 1};
    const auto w0 = w_kernel(p, 0.0);
    CHECK(w0.value == Catch::Approx(1.5157443122826242).epsilon(1e-11));
    CHECK(w_kernel(p, 2.0).value == w_kernel(p, -2.0).value);
    for (double t : {0.0, 0.7, 3.0, 10.0}) CHECK(w_kernel(p, t).value > 0.0);
}

TEST_CASE("w kernel scaling law") {
    const auto w_a = w_kernel({4.0, 0.5, 1}, 1.0);
    const auto w_b = w_kernel({1.0, 1.0, 1}, 0.5);
    CHECK(std::abs(w_a.value - 2.0 * w_b.value) <=
          w_a.error_estimate + 2.0 * w_b.error_estimate + 1e-12);
}

TEST_CASE("closed-form W validated against the quadrature oracle") {
    const ModelParams p1{1.0, 1.0, 1};
    CHECK(w_kernel_closed(p1, 0.0) == Catch::Approx(1.5157443122826242).epsilon(1e-12));
    for (double lam : {0.3, 1.0, 2.7})
        for (double m : {0.4, 1.0, 3.0})
            for (double t : {0.0, 0.9, 4.2}) {
                const ModelParams p{lam, m, 1};
                const auto oracle = w_kernel(p, t);
                const double closed = w_kernel_closed(p, t);
                CHECK(std::abs(closed - oracle.value) <=
                      1e-10 * std::abs(oracle.value) + oracle.error_estimate);
            }
}

TEST_CASE("closed-form W: large-mass asymptotics via the scaling law") {
    // W_{1,m}(0) = (1/m) W_{m^2,1}(0) -> 2/m as m grows
    const double m = 10.0;
    const auto oracle = w_kernel({1.0, m, 1}, 0.0);
    CHECK(w_kernel_closed({1.0, m, 1}, 0.0) ==
          Catch::Approx(oracle.value).epsilon(1e-10));
    CHECK(oracle.value == Catch::Approx(2.0 / m).epsilon(0.01));
}

TEST_CASE("closed-form W stays finite deep in the scaled regime") {
    // lambda m^2 = 400: the naive e^{lambda m^2} prefactor would overflow
    const double v = w_kernel_closed({4.0, 10.0, 1}, 1.0);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
}

TEST_CASE("D_lambda in position space") {
    const ModelParams p{1.0, 1.0, 1};
    const auto d0 = d_lambda_position_1d(p, 0.0, WMethod::Quadrature);
    CHECK(d0.value == Catch::Approx(0.4213503964748574).epsilon(1e-10));
    CHECK(d0.value >= 0.0);
    CHECK(d0.value <= equilibrium_cov_1d(1.0, 0.0));
    // lambda -> 0+: vanishing initial data
    const auto small = d_lambda_position_1d({1e-8, 1.0, 1}, 0.0, WMethod::Quadrature);
    CHECK(std::abs(small.value) < 1e-3);
    // lambda large: D_lambda -> C within an e^{-lambda m^2}-sized bound
    const auto large = d_lambda_position_1d({30.0, 1.0, 1}, 0.7);
    CHECK(std::abs(large.value - equilibrium_cov_1d(1.0, 0.7)) < 1e-12);
}

TEST_CASE("D_lambda agrees with its Fourier-side oracle on a grid") {
    // D(t) = C(t) - (1/2pi) int dp e^{-lambda(p^2+m^2)} cos(pt)/(p^2+m^2)
    for (double lam : {0.5, 1.0, 2.0})
        for (double m : {0.7, 1.0})
            for (double t : {0.0, 0.5, 1.5}) {
                const ModelParams p{lam, m, 1};
                const auto fourier = quad::integrate_line(
                    [&](double q) {
                        return std::exp(-lam * (q * q + m * m)) * std::cos(q * t) /
                               ((q * q + m * m) * 2.0 * M_PI);
                    },
                    {0.0, 1.0 / std::sqrt(lam)});
                const double oracle = equilibrium_cov_1d(m, t) - fourier.value;
                CHECK(std::abs(d_lambda_position_1d(p, t).value - oracle) <= 1e-8);
            }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(w_kernel({-1.0, 1.0, 1}, 0.0), std::domain_error);
    CHECK_THROWS_AS(w_kernel({1.0, 0.0, 1}, 0.0), std::domain_error);
    CHECK_THROWS_AS(d_lambda_position_1d({1.0, 1.0, 2}, 0.0), std::domain_error);
}
