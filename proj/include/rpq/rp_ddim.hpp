#pragma once

// Fourier-side RP construction for space-time dimension d > 1: compactly
// supported radial spectral profiles, the h_T/g_t families, the null
// identity, F(t1,t2), F(T), and the F''(0) positivity integral.  All
// integrals reduce to iterated (radial p) x (u) 1-D quadrature.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rpq/kernels.hpp"
#include "rpq/quadrature.hpp"

namespace rpq {

inline double mu_of_p(double m, double p) {
    if (!(m > 0.0)) throw std::domain_error("mu_of_p: m must be > 0");
    if (!(p >= 0.0)) throw std::domain_error("mu_of_p: p must be >= 0");
    return std::hypot(p, m);
}

// Compactly supported radial profile h~(p), zero outside [p_min, p_max].
struct SpatialProfile {
    int dim_space = 1;  // d - 1
    double p_min = 0.0;
    double p_max = 0.0;
    double taper = 0.0;
    std::function<double(double)> radial;       // exact evaluator
    std::vector<std::pair<double, double>> samples;  // (p, h~(p)) record grid

    double operator()(double p) const { return radial(p); }

    bool same_grid(const SpatialProfile &o) const {
        return dim_space == o.dim_space && p_min == o.p_min && p_max == o.p_max;
    }
};

inline constexpr int kProfileSamples = 512;

// Surface area of the unit sphere S^{n-1} in n dimensions (S_0 = 2).
inline double sphere_surface(int n) {
    if (n < 1) throw std::domain_error("sphere_surface: n must be >= 1");
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

namespace detail {

inline void fill_samples(SpatialProfile &prof) {
    prof.samples.resize(kProfileSamples);
    for (int i = 0; i < kProfileSamples; ++i) {
        const double p =
            prof.p_min + (prof.p_max - prof.p_min) * i / double(kProfileSamples - 1);
        prof.samples[i] = {p, prof.radial(p)};
    }
}

}  // namespace detail

// Raised-cosine tapered indicator of the band [p_min, p_max]: one on the
// interior plateau, smoothly zero at both edges.
inline SpatialProfile band_profile(int dim_space, double p_min, double p_max,
                                   double taper_width) {
    if (dim_space < 1) throw std::domain_error("band_profile: dim_space must be >= 1");
    if (!(0.0 <= p_min && p_min < p_max))
        throw std::domain_error("band_profile: need 0 <= p_min < p_max");
    if (!(taper_width > 0.0 && taper_width < 0.5 * (p_max - p_min)))
        throw std::domain_error("band_profile: taper must be in (0, (p_max-p_min)/2)");
    SpatialProfile prof;
    prof.dim_space = dim_space;
    prof.p_min = p_min;
    prof.p_max = p_max;
    prof.taper = taper_width;
    prof.radial = [p_min, p_max, taper_width](double p) {
        if (p <= p_min || p >= p_max) return 0.0;
        if (p < p_min + taper_width)
            return 0.5 * (1.0 - std::cos(M_PI * (p - p_min) / taper_width));
        if (p > p_max - taper_width)
            return 0.5 * (1.0 - std::cos(M_PI * (p_max - p) / taper_width));
        return 1.0;
    };
    detail::fill_samples(prof);
    return prof;
}

// g_t = e^{(lambda/2) laplacian} h_t, i.e. g~_t(p) = e^{-lambda p^2/2 + t mu(p)} h~(p).
inline SpatialProfile g_profile(const SpatialProfile &profile, const ModelParams &params,
                                double t) {
    params.validate();
    if (!(t >= 0.0)) throw std::domain_error("g_profile: t must be >= 0");
    SpatialProfile out = profile;
    const double lam = params.lambda, m = params.mass;
    auto base = profile.radial;
    out.radial = [base, lam, m, t](double p) {
        return std::exp(-0.5 * lam * p * p + t * mu_of_p(m, p)) * base(p);
    };
    detail::fill_samples(out);
    return out;
}

namespace detail {

// Radial integral S_{d-2} int p^{d-2} a(p) b(p) extra(p) / (2 mu) dp over
// the shared band, split at the taper breakpoints.
inline quad::QuadratureResult radial_inner(const SpatialProfile &a, const SpatialProfile &b,
                                           double m,
                                           const std::function<double(double)> &extra,
                                           const quad::QuadratureOptions &opts) {
    if (!a.same_grid(b))
        throw std::domain_error("sobolev_half_inner: profiles on different grids");
    const double S = sphere_surface(a.dim_space);
    const int k = a.dim_space - 1;
    auto f = [&](double p) {
        return S * std::pow(p, k) * a(p) * b(p) * extra(p) / (2.0 * mu_of_p(m, p));
    };
    std::vector<double> cuts{a.p_min};
    if (a.taper > 0.0) {
        cuts.push_back(a.p_min + a.taper);
        cuts.push_back(a.p_max - a.taper);
    }
    cuts.push_back(a.p_max);
    quad::QuadratureResult total;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const auto piece = quad::integrate_interval(f, cuts[i], cuts[i + 1], opts);
        total.value += piece.value;
        total.error_estimate += piece.error_estimate;
        total.evaluations += piece.evaluations;
    }
    return total;
}

}  // namespace detail

// Sobolev -1/2 inner product <a, b>_{-1/2} = <a, (2 mu)^{-1} b> on R^{d-1}.
inline quad::QuadratureResult sobolev_half_inner(const SpatialProfile &a,
                                                 const SpatialProfile &b, double m,
                                                 const quad::QuadratureOptions &opts = {}) {
    if (!a.same_grid(b)) {
        // disjoint radial bands integrate to zero exactly
        if (a.dim_space == b.dim_space && (a.p_max <= b.p_min || b.p_max <= a.p_min))
            return {0.0, 0.0, 1};
        throw std::domain_error("sobolev_half_inner: profiles on different grids");
    }
    return detail::radial_inner(a, b, m, [](double) { return 1.0; }, opts);
}

struct DdimTestSpec {
    SpatialProfile profile;
    double S = 0.0;
    double T = 0.0;
    ModelParams params;

    void validate() const {
        params.validate();
        if (!(0.0 <= S && S < T)) throw std::domain_error("DdimTestSpec: need 0 <= S < T");
        if (profile.dim_space + 1 != params.dim)
            throw std::domain_error("DdimTestSpec: profile dimension mismatch");
    }
};

// <f, theta f>_{-1} for f = h_S x delta_S - h_T x delta_T, expanded into
// its four terms <h_a, e^{-(a+b) mu} h_b>_{-1/2}.  The exponents of the
// e^{t mu} factors in h_a, h_b and the decay weight are combined into a
// single exponential per term.
inline quad::QuadratureResult null_check_ddim(const DdimTestSpec &spec,
                                              const quad::QuadratureOptions &opts = {}) {
    spec.validate();
    const double m = spec.params.mass;
    auto term = [&](double ta, double tb, double sign) {
        const double coeff = ta + tb - (ta + tb);  // cancels up to rounding
        auto extra = [&](double p) { return sign * std::exp(coeff * mu_of_p(m, p)); };
        return detail::radial_inner(spec.profile, spec.profile, m, extra, opts);
    };
    const auto t1 = term(spec.S, spec.S, 1.0);
    const auto t2 = term(spec.T, spec.T, 1.0);
    const auto t3 = term(spec.S, spec.T, -1.0);
    const auto t4 = term(spec.T, spec.S, -1.0);
    quad::QuadratureResult out;
    out.value = t1.value + t2.value + t3.value + t4.value;
    out.error_estimate = t1.error_estimate + t2.error_estimate + t3.error_estimate +
                         t4.error_estimate;
    out.evaluations = t1.evaluations + t2.evaluations + t3.evaluations + t4.evaluations;
    return out;
}

namespace detail {

// Unprefactored F(t1,t2):
//   int du e^{-(t1+t2-u)^2/4 lambda} < e^{-|u| mu} g_t1, op e^{-|u| mu} g_t2 >_{-1/2}
// with g_t(p) = e^{-lambda p^2 + (t1+t2 - 2|u|) mu} h~(p)^2 folded into one
// exponent inside the radial integrand.
inline quad::QuadratureResult f_two_times_raw(
    const SpatialProfile &profile, const ModelParams &params, double t1, double t2,
    const std::function<double(double, double)> &op,  // (p, u) -> multiplier
    const quad::QuadratureOptions &opts) {
    params.validate();
    const double lam = params.lambda, m = params.mass;
    const double S = sphere_surface(profile.dim_space);
    const int k = profile.dim_space - 1;
    const double tsum = t1 + t2;
    std::vector<double> cuts{profile.p_min};
    if (profile.taper > 0.0) {
        cuts.push_back(profile.p_min + profile.taper);
        cuts.push_back(profile.p_max - profile.taper);
    }
    cuts.push_back(profile.p_max);
    quad::QuadratureOptions inner_opts = opts;
    double max_inner_rel = 0.0;
    auto inner = [&](double u) {
        auto f = [&](double p) {
            const double mu = mu_of_p(m, p);
            const double h = profile(p);
            return S * std::pow(p, k) * h * h *
                   std::exp(-lam * p * p + (tsum - 2.0 * std::abs(u)) * mu) * op(p, u) /
                   (2.0 * mu);
        };
        double val = 0.0, err = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const auto piece = quad::integrate_interval(f, cuts[i], cuts[i + 1], inner_opts);
            val += piece.value;
            err += piece.error_estimate;
        }
        if (val != 0.0) max_inner_rel = std::max(max_inner_rel, err / std::abs(val));
        return val;
    };
    auto outer = [&](double u) {
        const double d = tsum - u;
        return std::exp(-d * d / (4.0 * lam)) * inner(u);
    };
    auto res = quad::integrate_line(outer, {tsum, 2.0 * std::sqrt(lam)}, opts);
    res.error_estimate += max_inner_rel * std::abs(res.value);
    return res;
}

}  // namespace detail

// F(t1,t2) with the (4 pi lambda)^{-1/2} e^{-lambda m^2} prefactor.
inline quad::QuadratureResult f_two_times(const SpatialProfile &profile,
                                          const ModelParams &params, double t1, double t2,
                                          const quad::QuadratureOptions &opts = {}) {
    if (!(t1 >= 0.0 && t2 >= 0.0))
        throw std::domain_error("f_two_times: times must be >= 0");
    auto res = detail::f_two_times_raw(profile, params, t1, t2,
                                       [](double, double) { return 1.0; }, opts);
    const double pref = std::exp(-params.lambda * params.mass * params.mass) /
                        std::sqrt(4.0 * M_PI * params.lambda);
    res.value *= pref;
    res.error_estimate *= pref;
    return res;
}

// F(T) = sqrt(4 pi lambda) e^{lambda m^2} (F(0,0) + F(T,T) - 2 F(0,T));
// the prefactors cancel, so the raw integrals are combined directly.
inline quad::QuadratureResult f_of_T_ddim(const SpatialProfile &profile,
                                          const ModelParams &params, double T,
                                          const quad::QuadratureOptions &opts = {}) {
    if (!(T >= 0.0)) throw std::domain_error("f_of_T_ddim: T must be >= 0");
    auto one = [](double, double) { return 1.0; };
    const auto g00 = detail::f_two_times_raw(profile, params, 0.0, 0.0, one, opts);
    const auto gTT = detail::f_two_times_raw(profile, params, T, T, one, opts);
    const auto g0T = detail::f_two_times_raw(profile, params, 0.0, T, one, opts);
    quad::QuadratureResult out;
    out.value = g00.value + gTT.value - 2.0 * g0T.value;
    out.error_estimate =
        g00.error_estimate + gTT.error_estimate + 2.0 * g0T.error_estimate;
    out.evaluations = g00.evaluations + gTT.evaluations + g0T.evaluations;
    return out;
}

// F''(0) = int du e^{-u^2/4 lambda} < e^{-|u| mu} g_0,
//          (2 mu^2 - 1/lambda + u^2/2 lambda^2) e^{-|u| mu} g_0 >_{-1/2}.
// Pointwise non-negative when p_min^2 + m^2 >= 1/(2 lambda).
inline quad::QuadratureResult fpp0_ddim(const SpatialProfile &profile,
                                        const ModelParams &params,
                                        const quad::QuadratureOptions &opts = {}) {
    const double lam = params.lambda, m = params.mass;
    auto op = [lam, m](double p, double u) {
        const double mu = mu_of_p(m, p);
        return 2.0 * mu * mu - 1.0 / lam + u * u / (2.0 * lam * lam);
    };
    return detail::f_two_times_raw(profile, params, 0.0, 0.0, op, opts);
}

// Whether the support condition making the F''(0) integrand pointwise
// non-negative holds for this (band, lambda, m).
inline bool support_condition_holds(const SpatialProfile &profile, const ModelParams &params) {
    return profile.p_min * profile.p_min + params.mass * params.mass >=
           1.0 / (2.0 * params.lambda);
}

// <f, f>_H for f = h_0 x delta_0 - h_T x delta_T via the relation
// <f,f>_H = -(4 pi lambda)^{-1/2} e^{-lambda m^2} F(T).
inline quad::QuadratureResult rp_form_ddim(const SpatialProfile &profile,
                                           const ModelParams &params, double T,
                                           const quad::QuadratureOptions &opts = {}) {
    auto res = f_of_T_ddim(profile, params, T, opts);
    const double pref = -std::exp(-params.lambda * params.mass * params.mass) /
                        std::sqrt(4.0 * M_PI * params.lambda);
    res.value *= pref;
    res.error_estimate *= std::abs(pref);
    return res;
}

}  // namespace rpq
