#pragma once

// Kernels of the linear stochastic-quantization flow in one dimension:
// heat semigroup, equilibrium covariance C = (-d^2/dt^2 + m^2)^-1, the
// finite-stochastic-time covariance D_lambda, and the Gaussian-smeared
// kernel W_{lambda,m}(t) = int du exp(-(t-u)^2/(4 lambda) - m|u|).

#include <cmath>
#include <stdexcept>

#include "rpq/quadrature.hpp"

namespace rpq {

struct ModelParams {
    double lambda = 1.0;  // stochastic time
    double mass = 1.0;
    int dim = 1;  // space-time dimension

    void validate() const {
        if (!(lambda > 0.0) || !std::isfinite(lambda))
            throw std::domain_error("ModelParams: lambda must be finite and > 0");
        if (!(mass > 0.0) || !std::isfinite(mass))
            throw std::domain_error("ModelParams: mass must be finite and > 0");
        if (dim < 1) throw std::domain_error("ModelParams: dim must be >= 1");
    }
};

struct KernelValue {
    double value = 0.0;
    double error_estimate = 0.0;
};

// How W-dependent quantities are evaluated: the erfc closed form is the
// fast path for scans, quadrature is the oracle path.
enum class WMethod { Closed, Quadrature };

inline double heat_kernel_1d(double tau, double x) {
    if (!(tau > 0.0)) throw std::domain_error("heat_kernel_1d: tau must be > 0");
    return std::exp(-x * x / (4.0 * tau)) / std::sqrt(4.0 * M_PI * tau);
}

inline double equilibrium_cov_1d(double m, double t) {
    if (!(m > 0.0)) throw std::domain_error("equilibrium_cov_1d: m must be > 0");
    return std::exp(-m * std::abs(t)) / (2.0 * m);
}

// Spectral multiplier of D_lambda: (1 - exp(-lambda omega))/omega for a
// Fourier mode with omega = p^2 + m^2.
inline double dlambda_multiplier(const ModelParams &params, double omega) {
    params.validate();
    if (!(omega > 0.0)) throw std::domain_error("dlambda_multiplier: omega must be > 0");
    return -std::expm1(-params.lambda * omega) / omega;
}

// W by direct quadrature; even extension in t.
inline KernelValue w_kernel(const ModelParams &params, double t,
                            const quad::QuadratureOptions &opts = {}) {
    params.validate();
    const double tc = std::abs(t);
    const double lam = params.lambda, m = params.mass;
    auto f = [&](double u) {
        const double d = tc - u;
        return std::exp(-d * d / (4.0 * lam) - m * std::abs(u));
    };
    const auto r = quad::integrate_line(f, {tc, 2.0 * std::sqrt(lam)}, opts);
    return {r.value, r.error_estimate};
}

namespace detail {

// Scaled complementary error function exp(x^2) erfc(x).
inline double erfcx(double x) {
    if (x < 26.0) return std::exp(x * x) * std::erfc(x);
    // asymptotic series, excellent for x >= 26
    const double z = 1.0 / (2.0 * x * x);
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 12; ++k) {
        term *= -(2 * k - 1) * z;
        sum += term;
    }
    return sum / (x * std::sqrt(M_PI));
}

}  // namespace detail

// Closed form of W in terms of erfc, evaluated in overflow-safe scaled
// form: W = sqrt(pi lambda) exp(-t^2/4lambda) [erfcx(z-) + erfcx(z+)]
// with z+- = (2 lambda m -+ t)/(2 sqrt(lambda)).  For z- < 0 the term is
// rewritten as erfc(z-) exp(lambda m^2 - m t), which stays bounded.
inline double w_kernel_closed(const ModelParams &params, double t) {
    params.validate();
    const double tc = std::abs(t);
    const double lam = params.lambda, m = params.mass;
    const double sq = std::sqrt(lam);
    const double zm = (2.0 * lam * m - tc) / (2.0 * sq);
    const double zp = (2.0 * lam * m + tc) / (2.0 * sq);
    const double gauss = std::exp(-tc * tc / (4.0 * lam));
    double term_m;
    if (zm >= 0.0) {
        term_m = detail::erfcx(zm) * gauss;
    } else {
        term_m = std::erfc(zm) * std::exp(lam * m * m - m * tc);
    }
    const double term_p = detail::erfcx(zp) * gauss;
    return std::sqrt(M_PI * lam) * (term_m + term_p);
}

// D_lambda in position space (d = 1):
//   D_lambda(t) = C(t) - exp(-lambda m^2) (4 pi lambda)^{-1/2} W(t)/(2m).
inline KernelValue d_lambda_position_1d(const ModelParams &params, double t,
                                        WMethod method = WMethod::Closed,
                                        const quad::QuadratureOptions &opts = {}) {
    params.validate();
    if (params.dim != 1) throw std::domain_error("d_lambda_position_1d: dim must be 1");
    const double lam = params.lambda, m = params.mass;
    KernelValue w;
    if (method == WMethod::Quadrature) {
        w = w_kernel(params, t, opts);
    } else {
        w.value = w_kernel_closed(params, t);
        w.error_estimate = 1e-13 * std::abs(w.value);  // rounding model
    }
    const double pref = std::exp(-lam * m * m) / (std::sqrt(4.0 * M_PI * lam) * 2.0 * m);
    return {equilibrium_cov_1d(m, t) - pref * w.value, pref * w.error_estimate};
}

}  // namespace rpq
