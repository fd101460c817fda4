#pragma once

// Reflection-positivity machinery for d = 1: delta-comb test functions,
// the RP forms under C and D_lambda, the diagnostic F(t), its power
// series at t = 0, scans, and Gram-matrix spectra.

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rpq/kernels.hpp"
#include "rpq/quadrature.hpp"

namespace rpq {

// Finite linear combination of Dirac times at non-negative times.
struct DeltaComb {
    struct Atom {
        double time;
        double weight;
    };
    std::vector<Atom> atoms;

    void validate() const {
        if (atoms.empty()) throw std::domain_error("DeltaComb: needs at least one atom");
        double prev = -1.0;
        bool any_nonzero = false;
        for (const auto &a : atoms) {
            if (!(a.time >= 0.0)) throw std::domain_error("DeltaComb: times must be >= 0");
            if (!(a.time > prev))
                throw std::domain_error("DeltaComb: times must be strictly increasing");
            prev = a.time;
            if (a.weight != 0.0) any_nonzero = true;
        }
        if (!any_nonzero) throw std::domain_error("DeltaComb: weights all zero");
    }
};

struct SeriesCoefficients {
    double w0;       // W_lambda(0)
    double c_lambda;
    double wpp0;     // W''_lambda(0) = c_lambda - W_lambda(0)/(2 lambda)
    double leading;  // coefficient of t^2/2 in F: c_lambda + (1 - 1/(2 lambda)) W_lambda(0)
    double error_estimate;
};

enum class Verdict { NO_VIOLATION_FOUND, RP_VIOLATED };

inline const char *to_string(Verdict v) {
    return v == Verdict::RP_VIOLATED ? "RP_VIOLATED" : "NO_VIOLATION_FOUND";
}

struct RPReport {
    double form_value = 0.0;
    std::vector<double> gram_spectrum;  // ascending, empty for scalar checks
    Verdict verdict = Verdict::NO_VIOLATION_FOUND;
    std::optional<DeltaComb> witness_comb;
    std::optional<double> witness_t;
    double tolerance_used = 0.0;
};

// The C-null test function f = e^{ms} delta_s - e^{mt} delta_t.
inline DeltaComb null_comb(double m, double s, double t) {
    if (!(m > 0.0)) throw std::domain_error("null_comb: m must be > 0");
    if (!(0.0 <= s && s < t)) throw std::domain_error("null_comb: need 0 <= s < t");
    return {{{s, std::exp(m * s)}, {t, -std::exp(m * t)}}};
}

// <f, theta C f> with kernel e^{-m|.|}/(2m); the reflection sends t_i to
// -t_i, so the kernel argument is t_i + t_j and the sum is a perfect
// square (1/2m)(sum_i w_i e^{-m t_i})^2.
inline double rp_form_equilibrium(const DeltaComb &f, double m) {
    f.validate();
    if (!(m > 0.0)) throw std::domain_error("rp_form_equilibrium: m must be > 0");
    double s = 0.0;
    for (const auto &ai : f.atoms)
        for (const auto &aj : f.atoms)
            s += ai.weight * aj.weight * std::exp(-m * (ai.time + aj.time));
    return s / (2.0 * m);
}

// <f, theta D_lambda f> = sum_ij w_i w_j D_lambda(t_i + t_j).
inline KernelValue rp_form_dlambda(const DeltaComb &f, const ModelParams &params,
                                   WMethod method = WMethod::Closed,
                                   const quad::QuadratureOptions &opts = {}) {
    f.validate();
    params.validate();
    KernelValue out;
    for (const auto &ai : f.atoms)
        for (const auto &aj : f.atoms) {
            const auto d = d_lambda_position_1d(params, ai.time + aj.time, method, opts);
            out.value += ai.weight * aj.weight * d.value;
            out.error_estimate += std::abs(ai.weight * aj.weight) * d.error_estimate;
        }
    return out;
}

// F_{lambda,m}(t) = (W(0) + e^{2mt} W(2t))/2 - e^{mt} W(t).  A positive
// value at any t > 0 witnesses RP violation of D_lambda.
inline KernelValue f_of_t(const ModelParams &params, double t,
                          WMethod method = WMethod::Quadrature,
                          const quad::QuadratureOptions &opts = {}) {
    params.validate();
    if (!(t >= 0.0)) throw std::domain_error("f_of_t: t must be >= 0");
    const double m = params.mass;
    auto eval = [&](double tt) -> KernelValue {
        if (method == WMethod::Quadrature) return w_kernel(params, tt, opts);
        const double v = w_kernel_closed(params, tt);
        return {v, 1e-13 * std::abs(v)};
    };
    const auto w0 = eval(0.0);
    const auto w1 = eval(t);
    const auto w2 = eval(2.0 * t);
    const double e1 = std::exp(m * t), e2 = std::exp(2.0 * m * t);
    KernelValue out;
    out.value = 0.5 * (w0.value + e2 * w2.value) - e1 * w1.value;
    out.error_estimate =
        0.5 * (w0.error_estimate + e2 * w2.error_estimate) + e1 * w1.error_estimate;
    return out;
}

// Power-series data of F at t = 0, at the m = 1 normalization
// (lambda_eff = lambda m^2 via the scaling law).
inline SeriesCoefficients series_coeffs(double lambda_eff,
                                        const quad::QuadratureOptions &opts = {}) {
    if (!(lambda_eff > 0.0)) throw std::domain_error("series_coeffs: lambda_eff must be > 0");
    const double lam = lambda_eff;
    const ModelParams p{lam, 1.0, 1};
    const auto w0 = w_kernel(p, 0.0, opts);
    auto cf = [&](double u) {
        return u * u * std::exp(-u * u / (4.0 * lam) - std::abs(u));
    };
    const auto ci = quad::integrate_line(cf, {0.0, 2.0 * std::sqrt(lam)}, opts);
    SeriesCoefficients sc;
    sc.w0 = w0.value;
    sc.c_lambda = ci.value / (4.0 * lam * lam);
    sc.wpp0 = sc.c_lambda - sc.w0 / (2.0 * lam);
    sc.leading = sc.c_lambda + (1.0 - 1.0 / (2.0 * lam)) * sc.w0;
    sc.error_estimate = ci.error_estimate / (4.0 * lam * lam) +
                        (1.0 + std::abs(1.0 - 1.0 / (2.0 * lam))) * w0.error_estimate;
    return sc;
}

struct ScanPoint {
    double t;
    double f;
    double error;
};

struct ScanResult {
    std::vector<ScanPoint> curve;
    RPReport report;
};

// A violation verdict requires the signed quantity to clear zero by ten
// times the propagated error estimate.
inline constexpr double kToleranceFactor = 10.0;

inline ScanResult scan_f(const ModelParams &params, const std::vector<double> &t_grid,
                         WMethod method = WMethod::Quadrature,
                         const quad::QuadratureOptions &opts = {}) {
    params.validate();
    ScanResult out;
    out.curve.reserve(t_grid.size());
    for (double t : t_grid) {
        if (!(t >= 0.0)) throw std::domain_error("scan_f: grid values must be >= 0");
        const auto fv = f_of_t(params, t, method, opts);
        out.curve.push_back({t, fv.value, fv.error_estimate});
    }
    double best = 0.0;
    for (const auto &p : out.curve) {
        const double tol = kToleranceFactor * p.error;
        if (p.f > tol && p.f - tol > best) {
            best = p.f - tol;
            out.report.verdict = Verdict::RP_VIOLATED;
            out.report.witness_t = p.t;
            out.report.form_value = p.f;
            out.report.tolerance_used = tol;
        }
    }
    return out;
}

namespace detail {

inline RPReport spectrum_report(Eigen::MatrixXd M, double tolerance) {
    Eigen::MatrixXd S = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("gram_matrix: eigensolver failed to converge");
    RPReport rep;
    rep.gram_spectrum.assign(es.eigenvalues().data(),
                             es.eigenvalues().data() + es.eigenvalues().size());
    rep.tolerance_used = tolerance;
    rep.form_value = rep.gram_spectrum.front();
    if (rep.gram_spectrum.front() < -tolerance) rep.verdict = Verdict::RP_VIOLATED;
    return rep;
}

}  // namespace detail

// Gram matrix M_ij = <theta f_i, D_lambda f_j> over a comb family; the
// full ascending spectrum of the symmetrized matrix decides the verdict.
inline RPReport gram_matrix(const std::vector<DeltaComb> &family, const ModelParams &params,
                            WMethod method = WMethod::Closed,
                            const quad::QuadratureOptions &opts = {}) {
    if (family.empty()) throw std::domain_error("gram_matrix: empty family");
    params.validate();
    const int n = int(family.size());
    Eigen::MatrixXd M(n, n);
    double max_err = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            KernelValue v;
            for (const auto &ai : family[i].atoms)
                for (const auto &aj : family[j].atoms) {
                    const auto d =
                        d_lambda_position_1d(params, ai.time + aj.time, method, opts);
                    v.value += ai.weight * aj.weight * d.value;
                    v.error_estimate += std::abs(ai.weight * aj.weight) * d.error_estimate;
                }
            M(i, j) = v.value;
            max_err = std::max(max_err, v.error_estimate);
        }
    auto rep = detail::spectrum_report(M, kToleranceFactor * max_err);
    if (rep.verdict == Verdict::RP_VIOLATED) {
        // witness: the family member with the most negative diagonal
        int best = 0;
        for (int i = 1; i < n; ++i)
            if (M(i, i) < M(best, best)) best = i;
        rep.witness_comb = family[best];
    }
    return rep;
}

// Same Gram construction under the equilibrium covariance C; rank one
// and positive semidefinite by the perfect-square structure.
inline RPReport gram_matrix_equilibrium(const std::vector<DeltaComb> &family, double m) {
    if (family.empty()) throw std::domain_error("gram_matrix_equilibrium: empty family");
    const int n = int(family.size());
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (const auto &ai : family[i].atoms)
                for (const auto &aj : family[j].atoms)
                    s += ai.weight * aj.weight * std::exp(-m * (ai.time + aj.time));
            M(i, j) = s / (2.0 * m);
        }
    return detail::spectrum_report(M, 1e-12);
}

}  // namespace rpq
