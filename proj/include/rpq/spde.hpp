#pragma once

// Torus-lattice simulator of the linear SPDE
//   dPhi = -1/2 (-Delta + m^2) Phi dlambda + dW,
// zero initial data.  Exact sampling draws each Fourier mode as an
// independent Gaussian with variance (1 - e^{-lambda omega_k})/omega_k;
// Euler-Maruyama integrates the same equation with a spectral Laplacian.

#include <fftw3.h>

#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "rpq/kernels.hpp"
#include "rpq/lattice.hpp"
#include "rpq/parallel.hpp"
#include "rpq/rng.hpp"
#include "rpq/rp_d1.hpp"

namespace rpq {

struct FieldSample {
    std::vector<double> values;  // site-ordered, row-major
    double lambda_time = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
};

class EmStabilityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::mutex &fftw_mutex() {
    static std::mutex m;
    return m;
}

// c2c transform pair on one lattice; not shareable between threads.
class SpectralTransform {
  public:
    explicit SpectralTransform(const TorusLattice &lat)
        : n_total_(lat.site_count()), buf_(lat.site_count()) {
        std::vector<int> dims(lat.dim, lat.sites_per_dim);
        auto *p = reinterpret_cast<fftw_complex *>(buf_.data());
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fwd_ = fftw_plan_dft(lat.dim, dims.data(), p, p, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft(lat.dim, dims.data(), p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~SpectralTransform() {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }
    SpectralTransform(const SpectralTransform &) = delete;
    SpectralTransform &operator=(const SpectralTransform &) = delete;

    std::vector<std::complex<double>> &buffer() { return buf_; }
    void forward() { fftw_execute(fwd_); }
    void backward() { fftw_execute(bwd_); }
    std::size_t size() const { return n_total_; }

  private:
    std::size_t n_total_;
    std::vector<std::complex<double>> buf_;
    fftw_plan fwd_ = nullptr, bwd_ = nullptr;
};

// flat index of the conjugate partner mode (-k mod n per dimension)
inline std::size_t conjugate_partner(const TorusLattice &lat, std::size_t flat) {
    const int n = lat.sites_per_dim;
    std::size_t out = 0;
    std::size_t rem = flat;
    std::vector<std::size_t> digits(lat.dim);
    for (int d = lat.dim - 1; d >= 0; --d) {
        digits[d] = rem % n;
        rem /= n;
    }
    for (int d = 0; d < lat.dim; ++d) {
        const std::size_t k = digits[d] == 0 ? 0 : n - digits[d];
        out = out * n + k;
    }
    return out;
}

}  // namespace detail

// Draws exact samples of Phi_lambda on the lattice.  Mode coefficients
// have Hermitian symmetry (real field) and per-mode variance
// (1 - e^{-lambda omega_k})/omega_k in the continuum torus normalization
//   Phi(x) = vol^{-1/2} sum_k c_k e^{i p_k x}.
class FieldSynthesizer {
  public:
    FieldSynthesizer(const TorusLattice &lat, const ModelParams &params)
        : lat_(lat), xf_(lat) {
        params.validate();
        lambda_ = params.lambda;
        variance_.resize(lat.omega.size());
        for (std::size_t k = 0; k < lat.omega.size(); ++k)
            variance_[k] = -std::expm1(-lambda_ * lat.omega[k]) / lat.omega[k];
        partner_.resize(lat.omega.size());
        for (std::size_t k = 0; k < lat.omega.size(); ++k)
            partner_[k] = detail::conjugate_partner(lat, k);
        vol_ = 1.0;
        for (int d = 0; d < lat.dim; ++d) vol_ *= lat.length;
    }

    FieldSample generate(std::uint64_t seed, std::uint64_t index) {
        CounterRng rng(seed, index);
        auto &buf = xf_.buffer();
        for (std::size_t k = 0; k < buf.size(); ++k) {
            const std::size_t pk = partner_[k];
            if (k == pk) {
                buf[k] = rng.next_normal() * std::sqrt(variance_[k]);
            } else if (k < pk) {
                const double s = std::sqrt(0.5 * variance_[k]);
                buf[k] = {rng.next_normal() * s, rng.next_normal() * s};
                buf[pk] = std::conj(buf[k]);
            }
        }
        xf_.backward();
        FieldSample out;
        out.values.resize(buf.size());
        const double scale = 1.0 / std::sqrt(vol_);
        for (std::size_t j = 0; j < buf.size(); ++j) out.values[j] = buf[j].real() * scale;
        out.lambda_time = lambda_;
        out.seed = seed;
        out.index = index;
        return out;
    }

    // c_k coefficients of a position-space sample (inverse of generate's
    // synthesis), for empirical per-mode variance checks.
    std::vector<std::complex<double>> mode_coefficients(const FieldSample &field) {
        auto &buf = xf_.buffer();
        if (field.values.size() != buf.size())
            throw std::domain_error("mode_coefficients: size mismatch");
        for (std::size_t j = 0; j < buf.size(); ++j) buf[j] = field.values[j];
        xf_.forward();
        const double scale = std::sqrt(vol_) / double(buf.size());
        std::vector<std::complex<double>> out(buf.size());
        for (std::size_t k = 0; k < buf.size(); ++k) out[k] = buf[k] * scale;
        return out;
    }

    const std::vector<double> &mode_variances() const { return variance_; }

  private:
    TorusLattice lat_;
    detail::SpectralTransform xf_;
    double lambda_ = 0.0;
    double vol_ = 1.0;
    std::vector<double> variance_;
    std::vector<std::size_t> partner_;
};

inline FieldSample sample_exact(const TorusLattice &lat, const ModelParams &params,
                                std::uint64_t seed, std::uint64_t index) {
    FieldSynthesizer synth(lat, params);
    return synth.generate(seed, index);
}

struct EmOptions {
    double dlambda = 0.01;
    std::int64_t steps = 1;
    bool noise = true;
};

// Euler-Maruyama step of the SPDE with spectral Laplacian:
//   Phi <- Phi - (dlambda/2)(-Delta + m^2) Phi + sqrt(dlambda) eta,
// eta discrete white noise with per-site variance 1/a^dim per unit
// stochastic time.  Rejects dlambda * max omega >= 2 (linear stability).
inline FieldSample evolve_em(const TorusLattice &lat, const FieldSample &field,
                             const EmOptions &opts, std::uint64_t seed) {
    if (!(opts.dlambda > 0.0)) throw std::domain_error("evolve_em: dlambda must be > 0");
    if (opts.steps < 1) throw std::domain_error("evolve_em: steps must be >= 1");
    if (field.values.size() != lat.site_count())
        throw std::domain_error("evolve_em: field not on this lattice");
    double max_omega = 0.0;
    for (double w : lat.omega) max_omega = std::max(max_omega, w);
    if (opts.dlambda * max_omega >= 2.0)
        throw EmStabilityError("evolve_em: dlambda * max omega >= 2, step rejected");

    detail::SpectralTransform xf(lat);
    auto &buf = xf.buffer();
    FieldSample out = field;
    const std::size_t n_total = lat.site_count();
    double a_dim = 1.0;
    for (int d = 0; d < lat.dim; ++d) a_dim *= lat.spacing;
    const double noise_sd = std::sqrt(opts.dlambda / a_dim);
    const double inv_n = 1.0 / double(n_total);
    for (std::int64_t s = 0; s < opts.steps; ++s) {
        for (std::size_t j = 0; j < n_total; ++j) buf[j] = out.values[j];
        xf.forward();
        for (std::size_t k = 0; k < n_total; ++k)
            buf[k] *= (1.0 - 0.5 * opts.dlambda * lat.omega[k]) * inv_n;
        xf.backward();
        if (opts.noise) {
            CounterRng rng(seed, std::uint64_t(s) + field.index * 0x100000000ULL);
            for (std::size_t j = 0; j < n_total; ++j)
                out.values[j] = buf[j].real() + noise_sd * rng.next_normal();
        } else {
            for (std::size_t j = 0; j < n_total; ++j) out.values[j] = buf[j].real();
        }
        out.lambda_time += opts.dlambda;
    }
    return out;
}

// A delta comb snapped to lattice sites along the time axis.  Combs are
// site indicators scaled by 1/a, so Phi(f) = sum_i w_i Phi(site_i).
struct LatticeComb {
    std::vector<int> sites;          // positive-time sites
    std::vector<int> reflected;      // -t mod n
    std::vector<double> weights;
};

inline LatticeComb map_comb_to_sites(const TorusLattice &lat, const DeltaComb &comb) {
    comb.validate();
    if (lat.dim != 1)
        throw std::domain_error("map_comb_to_sites: time-axis combs need dim = 1");
    LatticeComb out;
    const double a = lat.spacing;
    const int n = lat.sites_per_dim;
    for (const auto &atom : comb.atoms) {
        const long site = std::lround(atom.time / a);
        if (std::abs(atom.time - double(site) * a) > 0.5 * a + 1e-12)
            throw std::domain_error("map_comb_to_sites: comb time off-lattice");
        if (site < 0 || site >= n)
            throw std::domain_error("map_comb_to_sites: comb time outside the torus");
        out.sites.push_back(int(site));
        out.reflected.push_back(int((n - site) % n));
        out.weights.push_back(atom.weight);
    }
    return out;
}

// Exact torus value of <theta f, D_lambda f> by mode sum.
inline double lattice_rp_form_exact(const TorusLattice &lat, double lambda,
                                    const LatticeComb &comb) {
    double sum = 0.0;
    for (std::size_t i = 0; i < comb.sites.size(); ++i)
        for (std::size_t j = 0; j < comb.sites.size(); ++j)
            sum += comb.weights[i] * comb.weights[j] *
                   lattice_dlambda_pair(lat, lambda, comb.reflected[i], comb.sites[j]);
    return sum;
}

struct EnsembleStats {
    std::int64_t count = 0;
    double mean = 0.0;
    double std_error = 0.0;  // jackknife
};

namespace detail {

struct ChunkSums {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::int64_t count = 0;
};

inline EnsembleStats reduce_stats(const std::vector<ChunkSums> &chunks) {
    double s = 0.0, s2 = 0.0;
    std::int64_t n = 0;
    for (const auto &c : chunks) {  // fixed chunk order keeps sums bit-stable
        s += c.sum;
        s2 += c.sum_sq;
        n += c.count;
    }
    EnsembleStats st;
    st.count = n;
    st.mean = s / double(n);
    if (n > 1) {
        // jackknife over leave-one-out means, closed form
        const double ss = std::max(0.0, s2 - s * s / double(n));
        st.std_error = std::sqrt(ss / (double(n) * double(n - 1)));
    }
    return st;
}

}  // namespace detail

// Monte Carlo estimate of <theta f, D_lambda f> = E[Phi(theta f) Phi(f)]
// over exact samples, with jackknife standard error.
inline EnsembleStats estimate_rp_form(const TorusLattice &lat, const ModelParams &params,
                                      const LatticeComb &comb, std::int64_t count,
                                      std::uint64_t seed) {
    if (count < 2) throw std::domain_error("estimate_rp_form: count must be >= 2");
    constexpr std::size_t kChunk = 8192;
    const std::size_t n_chunks = (std::size_t(count) + kChunk - 1) / kChunk;
    std::vector<detail::ChunkSums> sums(n_chunks);
    parallel_chunks(std::size_t(count), kChunk, [&](std::size_t c, std::size_t lo,
                                                    std::size_t hi) {
        FieldSynthesizer synth(lat, params);
        auto &acc = sums[c];
        for (std::size_t i = lo; i < hi; ++i) {
            const auto field = synth.generate(seed, i);
            double left = 0.0, right = 0.0;
            for (std::size_t a = 0; a < comb.sites.size(); ++a) {
                left += comb.weights[a] * field.values[std::size_t(comb.reflected[a])];
                right += comb.weights[a] * field.values[std::size_t(comb.sites[a])];
            }
            const double y = left * right;
            acc.sum += y;
            acc.sum_sq += y * y;
            acc.count += 1;
        }
    });
    return detail::reduce_stats(sums);
}

struct ModeVariance {
    double empirical = 0.0;
    double expected = 0.0;
    double std_error = 0.0;
    bool self_conjugate = false;
};

// Empirical per-mode variances over `count` exact samples, round-tripped
// through the forward transform.
inline std::vector<ModeVariance> estimate_mode_variances(const TorusLattice &lat,
                                                         const ModelParams &params,
                                                         std::int64_t count,
                                                         std::uint64_t seed) {
    if (count < 2) throw std::domain_error("estimate_mode_variances: count must be >= 2");
    const std::size_t n_modes = lat.site_count();
    constexpr std::size_t kChunk = 8192;
    const std::size_t n_chunks = (std::size_t(count) + kChunk - 1) / kChunk;
    std::vector<std::vector<double>> power(n_chunks);
    parallel_chunks(std::size_t(count), kChunk,
                    [&](std::size_t c, std::size_t lo, std::size_t hi) {
                        FieldSynthesizer synth(lat, params);
                        power[c].assign(n_modes, 0.0);
                        for (std::size_t i = lo; i < hi; ++i) {
                            const auto field = synth.generate(seed, i);
                            const auto coeffs = synth.mode_coefficients(field);
                            for (std::size_t k = 0; k < n_modes; ++k)
                                power[c][k] += std::norm(coeffs[k]);
                        }
                    });
    FieldSynthesizer synth(lat, params);
    std::vector<ModeVariance> out(n_modes);
    for (std::size_t k = 0; k < n_modes; ++k) {
        double s = 0.0;
        for (const auto &chunk : power) s += chunk[k];
        const double v = s / double(count);
        ModeVariance mv;
        mv.empirical = v;
        mv.expected = synth.mode_variances()[k];
        mv.self_conjugate = detail::conjugate_partner(lat, k) == k;
        // |c|^2 is exponential for complex modes, chi^2_1-scaled for real
        mv.std_error = v * std::sqrt((mv.self_conjugate ? 2.0 : 1.0) / double(count));
        out[k] = mv;
    }
    return out;
}

// --- sample stream persistence -------------------------------------------

struct SampleFileHeader {
    char magic[4] = {'R', 'P', 'Q', 'S'};
    std::uint32_t version = 1;
    std::int32_t dim = 0;
    std::int32_t n = 0;
    double length = 0.0;
    double lambda = 0.0;
    double mass = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t count = 0;
};

inline void write_sample_stream(const std::string &path, const TorusLattice &lat,
                                const ModelParams &params, std::uint64_t seed,
                                std::uint64_t count) {
    std::FILE *fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("write_sample_stream: cannot open " + path);
    SampleFileHeader hdr;
    hdr.dim = lat.dim;
    hdr.n = lat.sites_per_dim;
    hdr.length = lat.length;
    hdr.lambda = params.lambda;
    hdr.mass = params.mass;
    hdr.seed = seed;
    hdr.count = count;
    std::fwrite(&hdr, sizeof(hdr), 1, fp);
    FieldSynthesizer synth(lat, params);
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto field = synth.generate(seed, i);
        std::fwrite(field.values.data(), sizeof(double), field.values.size(), fp);
    }
    std::fclose(fp);
}

inline std::pair<SampleFileHeader, std::vector<double>> read_sample_stream(
    const std::string &path) {
    std::FILE *fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw std::runtime_error("read_sample_stream: cannot open " + path);
    SampleFileHeader hdr;
    if (std::fread(&hdr, sizeof(hdr), 1, fp) != 1 ||
        std::memcmp(hdr.magic, "RPQS", 4) != 0) {
        std::fclose(fp);
        throw std::runtime_error("read_sample_stream: bad header in " + path);
    }
    std::size_t n_total = 1;
    for (int d = 0; d < hdr.dim; ++d) n_total *= std::size_t(hdr.n);
    std::vector<double> data(n_total * hdr.count);
    const std::size_t got = std::fread(data.data(), sizeof(double), data.size(), fp);
    std::fclose(fp);
    if (got != data.size())
        throw std::runtime_error("read_sample_stream: truncated file " + path);
    return {hdr, std::move(data)};
}

}  // namespace rpq
