#include <catch_amalgamated.hpp>

#include <cmath>

#include "rpq/rng.hpp"
#include "rpq/rp_d1.hpp"
#include "rpq/rp_ddim.hpp"

using namespace rpq;

TEST_CASE("mu of p") {
    CHECK(mu_of_p(1.0, 0.0) == 1.0);
    CHECK(mu_of_p(3.0, 4.0) == 5.0);
    CHECK(mu_of_p(0.5, 1.0) == Catch::Approx(std::sqrt(1.25)).epsilon(1e-15));
    CHECK_THROWS_AS(mu_of_p(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(mu_of_p(1.0, -1.0), std::domain_error);
}

TEST_CASE("band profile shape") {
    const auto h = band_profile(1, 1.0, 2.0, 0.25);
    CHECK(h(1.5) == 1.0);
    CHECK(h(0.9) == 0.0);
    CHECK(h(2.1) == 0.0);
    CHECK(h(1.0) == 0.0);
    CHECK(h(1.125) == Catch::Approx(0.5).epsilon(1e-14));
    CHECK(h(1.875) == Catch::Approx(0.5).epsilon(1e-14));
    CHECK(h.samples.size() == std::size_t(kProfileSamples));
    // support outside the ball of radius (2 lambda)^{-1/2} for lambda = 1
    CHECK(h.p_min > 1.0 / std::sqrt(2.0));
    CHECK_THROWS_AS(band_profile(1, 2.0, 1.0, 0.1), std::domain_error);
    CHECK_THROWS_AS(band_profile(1, 1.0, 2.0, 0.6), std::domain_error);
}

TEST_CASE("g profile applies the heat factor and the e^{t mu} boost") {
    const auto h = band_profile(1, 1.0, 2.0, 0.25);
    const ModelParams params{1.0, 0.5, 2};
    const auto g0 = g_profile(h, params, 0.0);
    CHECK(g0(1.5) == Catch::Approx(std::exp(-0.5 * 1.5 * 1.5)).epsilon(1e-14));
    const auto g = g_profile(h, params, 0.5);
    const double expected = std::exp(-0.5 * 1.5 * 1.5 + 0.5 * mu_of_p(0.5, 1.5));
    CHECK(g(1.5) == Catch::Approx(expected).epsilon(1e-14));
    CHECK(g(0.9) == 0.0);
}

TEST_CASE("sobolev -1/2 inner product") {
    const auto h = band_profile(1, 1.0, 2.0, 0.25);
    const ModelParams params{1.0, 1.0, 2};
    const auto self = sobolev_half_inner(h, h, 1.0);
    CHECK(self.value > 0.0);

    const auto other = band_profile(1, 3.0, 4.0, 0.25);
    CHECK(sobolev_half_inner(h, other, 1.0).value == 0.0);

    // untapered indicator of [1,2], d = 2, m = 1: analytic arcsinh value
    SpatialProfile box = h;
    box.taper = 0.0;
    box.radial = [](double p) { return (p > 1.0 && p < 2.0) ? 1.0 : 0.0; };
    const auto r = sobolev_half_inner(box, box, 1.0);
    CHECK(r.value == Catch::Approx(0.5622618881592673).epsilon(1e-10));
}

TEST_CASE("null identity over randomized d = 2 specs") {
    CounterRng rng(99, 0);
    for (int i = 0; i < 20; ++i) {
        const double lam = 0.4 + 1.6 * rng.next_uniform();
        const double m = 0.3 + rng.next_uniform();
        const double pmin = 0.5 + rng.next_uniform();
        const double pmax = pmin + 0.5 + rng.next_uniform();
        const double taper = 0.2 * (pmax - pmin);
        const double T = 0.05 + 0.6 * rng.next_uniform();
        const DdimTestSpec spec{band_profile(1, pmin, pmax, taper), 0.0, T,
                                {lam, m, 2}};
        const auto r = null_check_ddim(spec);
        CHECK(std::abs(r.value) <= 1e-10);
    }
}

TEST_CASE("degenerate S = T is rejected") {
    const auto h = band_profile(1, 1.0, 2.0, 0.25);
    const DdimTestSpec spec{h, 0.5, 0.5, {1.0, 0.5, 2}};
    CHECK_THROWS_AS(null_check_ddim(spec), std::domain_error);
}

TEST_CASE("F(t1,t2): symmetry, reality, positivity on the diagonal") {
    const auto h = band_profile(1, 1.0, 2.0, 0.25);
    const ModelParams params{1.0, 0.5, 2};
    const auto a = f_two_times(h, params, 0.2, 0.7);
    const auto b = f_two_times(h, params, 0.7, 0.2);
    CHECK(std::abs(a.value - b.value) <= a.error_estimate + b.error_estimate + 1e-14);
    const auto diag = f_two_times(h, params, 0.0, 0.0);
    CHECK(diag.value > 0.0);
    CHECK(std::isfinite(diag.value));
}

TEST_CASE("F(T) vanishes to second order at T = 0") {
    const auto h = band_profile(1, 1.0, 2.0, 0.25);
    const ModelParams params{1.0, 0.5, 2};
    CHECK(f_of_T_ddim(h, params, 0.0).value == 0.0);
    // F'(0) = 0: eliminate the quadratic term from F(h), F(2h); what is
    // left of the linear coefficient must be tiny against the F'' scale
    const double h1 = 5e-4;
    const double f1 = f_of_T_ddim(h, params, h1).value;
    const double f2 = f_of_T_ddim(h, params, 2.0 * h1).value;
    const double linear = (4.0 * f1 - f2) / (2.0 * h1);
    const double scale = fpp0_ddim(h, params).value;
    CHECK(std::abs(linear) <= 1e-6 * scale + 1e-9);
}

TEST_CASE("F(T) against precomputed references") {
    const auto h = band_profile(1, 1.0, 2.0, 0.25);
    const ModelParams params{1.0, 0.5, 2};
    CHECK(f_of_T_ddim(h, params, 0.01).value ==
          Catch::Approx(6.212071557811432e-06).epsilon(1e-7));
    CHECK(f_of_T_ddim(h, params, 0.02).value ==
          Catch::Approx(2.501894169619303e-05).epsilon(1e-7));
}

TEST_CASE("F''(0): positivity and the series-scan agreement") {
    const auto h = band_profile(1, 1.0, 2.0, 0.25);
    const ModelParams params{1.0, 0.5, 2};
    const auto fpp = fpp0_ddim(h, params);
    CHECK(fpp.value == Catch::Approx(0.12338394520953599).epsilon(1e-6));
    CHECK(fpp.value > 0.0);
    CHECK(support_condition_holds(h, params));

    // Richardson limit of 2 F(T)/T^2 over T in {0.02, 0.01, 0.005}
    const double r1 = 2.0 * f_of_T_ddim(h, params, 0.02).value / (0.02 * 0.02);
    const double r2 = 2.0 * f_of_T_ddim(h, params, 0.01).value / (0.01 * 0.01);
    const double r3 = 2.0 * f_of_T_ddim(h, params, 0.005).value / (0.005 * 0.005);
    const double extrap = 2.0 * r3 - r2;
    CHECK(extrap == Catch::Approx(fpp.value).epsilon(0.01));
    CHECK(std::abs(r1 - fpp.value) > std::abs(r3 - fpp.value));  // converging
}

TEST_CASE("fpp0 positive whenever 2 mu^2 >= 1/lambda holds via the mass alone") {
    const auto h = band_profile(1, 0.2, 1.0, 0.15);  // band near the origin
    const ModelParams params{1.0, 1.0, 2};           // 2 mu^2 >= 2 > 1 = 1/lambda
    CHECK(support_condition_holds(h, params));
    CHECK(fpp0_ddim(h, params).value > 0.0);
}

TEST_CASE("pointwise operator positivity on the band under the support condition") {
    const auto h = band_profile(1, 1.0, 2.0, 0.25);
    const ModelParams params{1.0, 0.1, 2};  // tiny mass, support carries it
    CHECK(support_condition_holds(h, params));
    for (double p = 1.0; p <= 2.0; p += 0.05)
        for (double u = 0.0; u <= 10.0; u += 0.5) {
            const double mu = mu_of_p(params.mass, p);
            CHECK(2.0 * mu * mu - 1.0 / params.lambda +
                      u * u / (2.0 * params.lambda * params.lambda) >=
                  0.0);
        }
    CHECK(fpp0_ddim(h, params).value > 0.0);
}

TEST_CASE("sign chain: fpp0 > 0 implies F(T) > 0 and a negative RP form") {
    const auto h = band_profile(1, 1.0, 2.0, 0.25);
    const ModelParams params{1.0, 0.5, 2};
    REQUIRE(fpp0_ddim(h, params).value > 0.0);
    const auto FT = f_of_T_ddim(h, params, 0.02);
    CHECK(FT.value > kToleranceFactor * FT.error_estimate);
    const auto form = rp_form_ddim(h, params, 0.02);
    CHECK(form.value < -kToleranceFactor * form.error_estimate);
}
