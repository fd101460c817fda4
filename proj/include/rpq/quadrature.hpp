#pragma once

// Deterministic 1-D quadrature over finite, half-infinite and infinite
// intervals with error estimates taken from successive refinement levels.
// Two independent rules are provided: composite Gauss-Legendre with panel
// doubling, and a tanh-sinh (doubly exponential) rule for cross-checks.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rpq::quad {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;  // absolute
    std::int64_t evaluations = 0;
};

struct GaussianDecayHint {
    double center = 0.0;
    double width = 1.0;  // |f(u)| <= A exp(-(u-center)^2/width^2) eventually
};

struct QuadratureOptions {
    double abs_tol = 1e-15;
    double rel_tol = 1e-13;
    std::int64_t max_evaluations = 1'000'000;
};

// Thrown when the node budget is exhausted before the refinement levels
// agree; carries the best estimate obtained so far.
class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(std::string what, QuadratureResult best)
        : std::runtime_error(std::move(what)), best_estimate(best) {}
    QuadratureResult best_estimate;
};

using Integrand = std::function<double(double)>;

namespace detail {

// Nodes and weights of the N-point Gauss-Legendre rule on [-1,1],
// computed once by Newton iteration on P_N.
template <int N>
const std::vector<std::pair<double, double>> &gauss_legendre_rule() {
    static const std::vector<std::pair<double, double>> rule = [] {
        std::vector<std::pair<double, double>> r(N);
        for (int i = 0; i < N; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (N + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= N; ++k) {
                    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            r[i] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
        }
        return r;
    }();
    return rule;
}

inline double gl_panel(const Integrand &f, double a, double b) {
    const auto &rule = gauss_legendre_rule<16>();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (const auto &[x, w] : rule) s += w * f(mid + half * x);
    return s * half;
}

}  // namespace detail

// Composite 16-point Gauss-Legendre on [a,b], doubling the panel count
// until two refinement levels agree; error_estimate is their difference.
inline QuadratureResult integrate_interval(const Integrand &f, double a, double b,
                                           const QuadratureOptions &opts = {}) {
    if (!(a < b)) return {0.0, 0.0, 1};
    QuadratureResult res;
    double prev = 0.0;
    bool have_prev = false;
    for (int panels = 1;; panels *= 2) {
        double sum = 0.0;
        const double h = (b - a) / panels;
        for (int i = 0; i < panels; ++i)
            sum += detail::gl_panel(f, a + i * h, a + (i + 1) * h);
        res.evaluations += std::int64_t(panels) * 16;
        if (have_prev) {
            res.value = sum;
            res.error_estimate = std::abs(sum - prev);
            if (res.error_estimate <=
                std::max(opts.abs_tol, opts.rel_tol * std::abs(sum)))
                return res;
        }
        prev = sum;
        have_prev = true;
        if (res.evaluations * 2 > opts.max_evaluations)
            throw QuadratureError("quadrature: node budget exhausted on interval", res);
    }
}

// Independent rule: tanh-sinh substitution on [a,b] with step halving.
inline QuadratureResult integrate_interval_tanhsinh(const Integrand &f, double a, double b,
                                                    const QuadratureOptions &opts = {}) {
    if (!(a < b)) return {0.0, 0.0, 1};
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const double tmax = 3.8;  // tanh((pi/2) sinh 3.8) = 1 - O(1e-30)
    auto g = [&](double t) {
        const double s = std::sinh(t);
        const double x = std::tanh(0.5 * M_PI * s);
        const double w = 0.5 * M_PI * std::cosh(t) / std::pow(std::cosh(0.5 * M_PI * s), 2);
        return w * f(mid + half * x);
    };
    QuadratureResult res;
    double h = 0.5;
    double sum = g(0.0);
    res.evaluations = 1;
    for (double t = h; t <= tmax; t += h) {
        sum += g(t) + g(-t);
        res.evaluations += 2;
    }
    double prev = sum * h * half;
    for (;;) {
        h *= 0.5;
        double add = 0.0;
        for (double t = h; t <= tmax; t += 2 * h) {
            add += g(t) + g(-t);
            res.evaluations += 2;
        }
        sum += add;
        const double cur = sum * h * half;
        res.value = cur;
        res.error_estimate = std::abs(cur - prev);
        if (res.error_estimate <= std::max(opts.abs_tol, opts.rel_tol * std::abs(cur)))
            return res;
        prev = cur;
        if (res.evaluations * 2 > opts.max_evaluations)
            throw QuadratureError("quadrature: node budget exhausted (tanh-sinh)", res);
    }
}

namespace detail {

// Truncation radius: the Gaussian tail bound exp(-K^2) is < 1e-15 of any
// plausible running estimate already at K = 6; K = 9 leaves no doubt.
constexpr double kGaussianCut = 9.0;

inline QuadratureResult sum_pieces(const Integrand &f, const std::vector<double> &cuts,
                                   const QuadratureOptions &opts, bool tanhsinh) {
    QuadratureResult total;
    total.evaluations = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        QuadratureResult piece;
        try {
            piece = tanhsinh ? integrate_interval_tanhsinh(f, cuts[i], cuts[i + 1], opts)
                             : integrate_interval(f, cuts[i], cuts[i + 1], opts);
        } catch (QuadratureError &e) {
            e.best_estimate.value += total.value;
            e.best_estimate.error_estimate += total.error_estimate;
            e.best_estimate.evaluations += total.evaluations;
            throw;
        }
        total.value += piece.value;
        total.error_estimate += piece.error_estimate;
        total.evaluations += piece.evaluations;
    }
    return total;
}

}  // namespace detail

// Integral over the whole line of an integrand with Gaussian decay.
// The domain is truncated at center +- K*width and split at u = 0 (the
// kernels carry an exp(-m|u|) kink there).
inline QuadratureResult integrate_line(const Integrand &f, const GaussianDecayHint &decay,
                                       const QuadratureOptions &opts = {},
                                       bool tanhsinh = false) {
    if (!(decay.width > 0.0)) throw std::domain_error("integrate_line: width must be > 0");
    const double lo = decay.center - detail::kGaussianCut * decay.width;
    const double hi = decay.center + detail::kGaussianCut * decay.width;
    std::vector<double> cuts{lo};
    if (lo < 0.0 && 0.0 < hi) cuts.push_back(0.0);
    cuts.push_back(hi);
    return detail::sum_pieces(f, cuts, opts, tanhsinh);
}

// Integral over [0, inf) of an integrand with eventual exponential decay.
inline QuadratureResult integrate_halfline(const Integrand &f, double exp_rate,
                                           const QuadratureOptions &opts = {},
                                           bool tanhsinh = false) {
    if (!(exp_rate > 0.0))
        throw std::domain_error("integrate_halfline: exp_rate must be > 0");
    const double hi = 50.0 / exp_rate;  // exp(-50) ~ 2e-22
    return detail::sum_pieces(f, {0.0, hi}, opts, tanhsinh);
}

}  // namespace rpq::quad
