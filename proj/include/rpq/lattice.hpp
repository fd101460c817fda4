#pragma once

// Periodic torus lattice with spectral mode data for the linear SPDE.
// Wave numbers are the continuum torus momenta p_k = 2 pi k / L with
// k in {-n/2+1, ..., n/2} per dimension; omega_k = |p_k|^2 + m^2.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace rpq {

struct TorusLattice {
    int dim = 1;
    int sites_per_dim = 0;  // n, even
    double length = 0.0;    // physical circumference L
    double spacing = 0.0;   // a = L/n
    double mass = 0.0;
    std::vector<double> omega;  // flattened over n^dim modes, row-major

    std::size_t site_count() const {
        std::size_t c = 1;
        for (int d = 0; d < dim; ++d) c *= std::size_t(sites_per_dim);
        return c;
    }

    // signed integer wave index for a 0-based mode index along one axis
    int signed_index(int k) const { return k <= sites_per_dim / 2 ? k : k - sites_per_dim; }

    double wavenumber(int k) const { return 2.0 * M_PI * signed_index(k) / length; }
};

inline TorusLattice build_lattice(int dim, int n, double L, double m) {
    if (dim < 1) throw std::domain_error("build_lattice: dim must be >= 1");
    if (n < 8 || n % 2 != 0) throw std::domain_error("build_lattice: n must be even and >= 8");
    if (!(L > 0.0)) throw std::domain_error("build_lattice: L must be > 0");
    if (!(m > 0.0)) throw std::domain_error("build_lattice: m must be > 0");
    TorusLattice lat;
    lat.dim = dim;
    lat.sites_per_dim = n;
    lat.length = L;
    lat.spacing = L / n;
    lat.mass = m;
    lat.omega.resize(lat.site_count());
    std::vector<int> idx(dim, 0);
    for (std::size_t flat = 0; flat < lat.omega.size(); ++flat) {
        double p2 = 0.0;
        for (int d = 0; d < dim; ++d) {
            const double p = lat.wavenumber(idx[d]);
            p2 += p * p;
        }
        lat.omega[flat] = p2 + m * m;
        for (int d = dim - 1; d >= 0; --d) {
            if (++idx[d] < n) break;
            idx[d] = 0;
        }
    }
    return lat;
}

// Exact torus covariance of the stochastic-quantization measure between
// two lattice sites, by mode sum:
//   (1/L^dim) sum_k e^{i p_k (x1-x2)} (1 - e^{-lambda omega_k}) / omega_k.
// Real by Hermitian symmetry of the summand.
inline double lattice_dlambda_pair(const TorusLattice &lat, double lambda,
                                   const std::vector<int> &site1,
                                   const std::vector<int> &site2) {
    if (int(site1.size()) != lat.dim || int(site2.size()) != lat.dim)
        throw std::domain_error("lattice_dlambda_pair: site rank mismatch");
    if (!(lambda >= 0.0)) throw std::domain_error("lattice_dlambda_pair: lambda must be >= 0");
    const int n = lat.sites_per_dim;
    for (int d = 0; d < lat.dim; ++d)
        if (site1[d] < 0 || site1[d] >= n || site2[d] < 0 || site2[d] >= n)
            throw std::domain_error("lattice_dlambda_pair: site out of range");
    double vol = 1.0;
    for (int d = 0; d < lat.dim; ++d) vol *= lat.length;
    std::vector<int> idx(lat.dim, 0);
    double sum = 0.0;
    for (std::size_t flat = 0; flat < lat.omega.size(); ++flat) {
        double phase = 0.0;
        for (int d = 0; d < lat.dim; ++d)
            phase += lat.wavenumber(idx[d]) * lat.spacing * (site1[d] - site2[d]);
        const double w = lat.omega[flat];
        sum += std::cos(phase) * (-std::expm1(-lambda * w)) / w;
        for (int d = lat.dim - 1; d >= 0; --d) {
            if (++idx[d] < n) break;
            idx[d] = 0;
        }
    }
    return sum / vol;
}

// dim = 1 convenience overload
inline double lattice_dlambda_pair(const TorusLattice &lat, double lambda, int t1, int t2) {
    return lattice_dlambda_pair(lat, lambda, std::vector<int>{t1}, std::vector<int>{t2});
}

}  // namespace rpq
