// Command-line surface: RP scans, series coefficients, Gram spectra, the
// d>1 Fourier-side checks, and the torus SPDE simulator.  Verdicts are
// data, not exit codes.  Exit codes: 0 success, 2 usage, 3 numeric
// failure, 4 EM stability rejection.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rpq/kernels.hpp"
#include "rpq/lattice.hpp"
#include "rpq/rp_d1.hpp"
#include "rpq/rp_ddim.hpp"
#include "rpq/spde.hpp"
#include "rpq/version.hpp"

using nlohmann::json;

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void emit_report(const json &report, const std::string &path) {
    const std::string text = report.dump(2) + "\n";
    if (path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + path);
        out << text;
    }
}

json base_report(const std::string &command, const json &config) {
    return json{{"tool", "rpq"}, {"version", rpq::kVersion}, {"command", command},
                {"config", config}};
}

std::vector<double> make_grid(double t_max, double t_step) {
    std::vector<double> grid;
    if (!(t_step > 0.0)) throw std::domain_error("t-step must be > 0");
    for (double t = 0.0; t <= t_max + 0.5 * t_step; t += t_step)
        grid.push_back(std::min(t, t_max));
    if (grid.empty()) grid.push_back(0.0);
    if (grid.back() < t_max) grid.push_back(t_max);
    return grid;
}

// family spec "start:end:step" of null-comb upper times
std::vector<rpq::DeltaComb> parse_null_family(const std::string &spec, double m) {
    double s0 = 0.0, s1 = 0.0, st = 0.0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &s0, &s1, &st) != 3 || !(st > 0.0))
        throw std::domain_error("bad family spec, expected start:end:step");
    std::vector<rpq::DeltaComb> family;
    for (double t = s0; t <= s1 + 0.5 * st; t += st)
        family.push_back(rpq::null_comb(m, 0.0, t));
    if (family.empty()) throw std::domain_error("empty null-comb family");
    return family;
}

// comb spec "null:s:t" or "atoms:t1:w1,t2:w2,..."
rpq::DeltaComb parse_comb(const std::string &spec, double m) {
    if (spec.rfind("null:", 0) == 0) {
        double s = 0.0, t = 0.0;
        if (std::sscanf(spec.c_str(), "null:%lf:%lf", &s, &t) != 2)
            throw std::domain_error("bad comb spec, expected null:s:t");
        return rpq::null_comb(m, s, t);
    }
    if (spec.rfind("atoms:", 0) == 0) {
        rpq::DeltaComb comb;
        std::string body = spec.substr(6);
        std::size_t pos = 0;
        while (pos < body.size()) {
            double t = 0.0, w = 0.0;
            int used = 0;
            if (std::sscanf(body.c_str() + pos, "%lf:%lf%n", &t, &w, &used) != 2)
                throw std::domain_error("bad comb spec, expected atoms:t:w,...");
            comb.atoms.push_back({t, w});
            pos += std::size_t(used);
            if (pos < body.size() && body[pos] == ',') ++pos;
        }
        comb.validate();
        return comb;
    }
    throw std::domain_error("bad comb spec: " + spec);
}

json spectrum_json(const rpq::RPReport &rep) {
    json j;
    j["gram_spectrum"] = rep.gram_spectrum;
    j["min_eigenvalue"] = rep.gram_spectrum.empty() ? rep.form_value
                                                    : rep.gram_spectrum.front();
    j["verdict"] = rpq::to_string(rep.verdict);
    j["tolerance_used"] = rep.tolerance_used;
    return j;
}

int run(int argc, char **argv) {
    CLI::App app{"rpqlab: stochastic quantization of the free field and its "
                 "reflection-positivity diagnostics"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file, flags take precedence");

    // ---- scan-f -----------------------------------------------------------
    double lambda = 1.0, mass = 1.0, t_max = 3.0, t_step = 0.01;
    std::string out_csv, out_json;
    bool closed_form = false;
    auto *scan = app.add_subcommand("scan-f", "scan F(t) for d = 1 RP violation");
    scan->add_option("--lambda", lambda, "stochastic time")->required();
    scan->add_option("--mass", mass, "mass m")->required();
    scan->add_option("--t-max", t_max, "scan upper end")->required();
    scan->add_option("--t-step", t_step, "grid step");
    scan->add_option("--out", out_csv, "CSV output path (t, F, error)");
    scan->add_option("--json", out_json, "JSON report path (default stdout)");
    scan->add_flag("--closed-form", closed_form, "use the erfc fast path for W");

    // ---- coeffs -----------------------------------------------------------
    double lambda_eff = 1.0;
    auto *coeffs = app.add_subcommand("coeffs", "series coefficients of F at t = 0");
    coeffs->add_option("--lambda-eff", lambda_eff, "lambda m^2 (m = 1 normalization)")
        ->required();
    coeffs->add_option("--json", out_json, "JSON report path (default stdout)");

    // ---- gram -------------------------------------------------------------
    std::string family_spec = "0.2:1.4:0.2";
    bool equilibrium = false;
    auto *gram = app.add_subcommand("gram", "Gram-matrix spectrum over a comb family");
    gram->add_option("--null-family", family_spec, "null-comb times start:end:step");
    gram->add_option("--lambda", lambda, "stochastic time")->required();
    gram->add_option("--mass", mass, "mass m")->required();
    gram->add_flag("--equilibrium", equilibrium, "use the equilibrium covariance C");
    gram->add_option("--json", out_json, "JSON report path (default stdout)");

    // ---- ddim -------------------------------------------------------------
    int dim = 2;
    std::vector<double> band{1.0, 2.0};
    double taper = 0.25, S = 0.0, T = 0.5, ddim_t_max = 0.05, ddim_t_step = 0.005;
    auto *ddim = app.add_subcommand("ddim", "d > 1 Fourier-side RP checks");
    ddim->require_subcommand(1);
    ddim->add_option("--d", dim, "space-time dimension (>= 2)");
    ddim->add_option("--lambda", lambda, "stochastic time")->required();
    ddim->add_option("--mass", mass, "mass m")->required();
    ddim->add_option("--band", band, "radial band p_min,p_max")->expected(2)
        ->delimiter(',');
    ddim->add_option("--taper", taper, "raised-cosine taper width");
    ddim->add_option("--json", out_json, "JSON report path (default stdout)");
    auto *ddim_fpp0 = ddim->add_subcommand("fpp0", "F''(0) positivity integral");
    auto *ddim_scan = ddim->add_subcommand("scan", "small-T scan of F(T)");
    ddim_scan->add_option("--t-max", ddim_t_max, "scan upper end");
    ddim_scan->add_option("--t-step", ddim_t_step, "grid step");
    ddim_scan->add_option("--out", out_csv, "CSV output path (T, F, error)");
    auto *ddim_null = ddim->add_subcommand("nullcheck", "null identity of the C form");
    ddim_null->add_option("--S", S, "first time");
    ddim_null->add_option("--T", T, "second time");

    // ---- simulate ---------------------------------------------------------
    int lat_dim = 1, lat_n = 256;
    double lat_L = 64.0;
    std::int64_t samples = 100000;
    std::uint64_t seed = 1;
    std::string comb_spec = "null:0:0.5", save_samples;
    double em_dlambda = 0.0;
    auto *sim = app.add_subcommand("simulate", "torus SPDE Monte Carlo RP probe");
    sim->add_option("--dim", lat_dim, "lattice dimension");
    sim->add_option("--n", lat_n, "sites per dimension (even)")->required();
    sim->add_option("--L", lat_L, "physical circumference")->required();
    sim->add_option("--lambda", lambda, "stochastic time")->required();
    sim->add_option("--mass", mass, "mass m")->required();
    sim->add_option("--samples", samples, "Monte Carlo sample count")->required();
    sim->add_option("--seed", seed, "RNG seed");
    sim->add_option("--comb", comb_spec, "test comb, null:s:t or atoms:t:w,...");
    sim->add_option("--em-dlambda", em_dlambda,
                    "use Euler-Maruyama paths with this step instead of exact sampling");
    sim->add_option("--save-samples", save_samples, "persist exact samples to this file");
    sim->add_option("--json", out_json, "JSON report path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    if (scan->parsed()) {
        const rpq::ModelParams params{lambda, mass, 1};
        const auto grid = make_grid(t_max, t_step);
        const auto method = closed_form ? rpq::WMethod::Closed : rpq::WMethod::Quadrature;
        const auto res = rpq::scan_f(params, grid, method);
        if (!out_csv.empty()) {
            std::ofstream csv(out_csv, std::ios::binary);
            if (!csv) throw std::runtime_error("cannot open " + out_csv);
            csv << "t,F,error\n";
            for (const auto &p : res.curve)
                csv << fmt17(p.t) << ',' << fmt17(p.f) << ',' << fmt17(p.error) << '\n';
        }
        json cfg{{"lambda", lambda}, {"mass", mass}, {"t_max", t_max},
                 {"t_step", t_step}, {"method", closed_form ? "closed" : "quadrature"},
                 {"out", out_csv}};
        json rep = base_report("scan-f", cfg);
        rep["verdict"] = rpq::to_string(res.report.verdict);
        rep["tolerance_used"] = res.report.tolerance_used;
        if (res.report.witness_t) {
            rep["witness_t"] = *res.report.witness_t;
            rep["witness_F"] = res.report.form_value;
        }
        rep["points"] = res.curve.size();
        emit_report(rep, out_json);
        return 0;
    }

    if (coeffs->parsed()) {
        const auto sc = rpq::series_coeffs(lambda_eff);
        json cfg{{"lambda_eff", lambda_eff}};
        json rep = base_report("coeffs", cfg);
        rep["w0"] = sc.w0;
        rep["c_lambda"] = sc.c_lambda;
        rep["wpp0"] = sc.wpp0;
        rep["leading"] = sc.leading;
        rep["error_estimate"] = sc.error_estimate;
        rep["boundary_case"] = std::abs(lambda_eff - 0.5) < 1e-12;
        rep["rp_violated_small_t"] = sc.leading > rpq::kToleranceFactor * sc.error_estimate;
        emit_report(rep, out_json);
        return 0;
    }

    if (gram->parsed()) {
        const rpq::ModelParams params{lambda, mass, 1};
        const auto family = parse_null_family(family_spec, mass);
        const auto rep_data = equilibrium
                                  ? rpq::gram_matrix_equilibrium(family, mass)
                                  : rpq::gram_matrix(family, params);
        json cfg{{"lambda", lambda}, {"mass", mass}, {"null_family", family_spec},
                 {"equilibrium", equilibrium}};
        json rep = base_report("gram", cfg);
        rep.update(spectrum_json(rep_data));
        rep["family_size"] = family.size();
        emit_report(rep, out_json);
        return 0;
    }

    if (ddim->parsed()) {
        if (dim < 2) throw std::domain_error("ddim: --d must be >= 2");
        const rpq::ModelParams params{lambda, mass, dim};
        const auto profile = rpq::band_profile(dim - 1, band[0], band[1], taper);
        json cfg{{"d", dim}, {"lambda", lambda}, {"mass", mass},
                 {"band", band}, {"taper", taper}};
        json rep;
        if (ddim_fpp0->parsed()) {
            const auto r = rpq::fpp0_ddim(profile, params);
            rep = base_report("ddim fpp0", cfg);
            rep["fpp0"] = r.value;
            rep["error_estimate"] = r.error_estimate;
            rep["support_condition"] = rpq::support_condition_holds(profile, params);
        } else if (ddim_scan->parsed()) {
            cfg["t_max"] = ddim_t_max;
            cfg["t_step"] = ddim_t_step;
            rep = base_report("ddim scan", cfg);
            const auto grid = make_grid(ddim_t_max, ddim_t_step);
            std::ofstream csv;
            if (!out_csv.empty()) {
                csv.open(out_csv, std::ios::binary);
                if (!csv) throw std::runtime_error("cannot open " + out_csv);
                csv << "T,F,error\n";
            }
            rpq::Verdict verdict = rpq::Verdict::NO_VIOLATION_FOUND;
            double witness_T = 0.0, witness_F = 0.0, tol_used = 0.0;
            for (double t : grid) {
                const auto r = rpq::f_of_T_ddim(profile, params, t);
                if (csv.is_open())
                    csv << fmt17(t) << ',' << fmt17(r.value) << ','
                        << fmt17(r.error_estimate) << '\n';
                const double tol = rpq::kToleranceFactor * r.error_estimate;
                if (r.value > tol && r.value - tol > witness_F - tol_used) {
                    verdict = rpq::Verdict::RP_VIOLATED;
                    witness_T = t;
                    witness_F = r.value;
                    tol_used = tol;
                }
            }
            rep["verdict"] = rpq::to_string(verdict);
            if (verdict == rpq::Verdict::RP_VIOLATED) {
                rep["witness_T"] = witness_T;
                rep["witness_F"] = witness_F;
                rep["tolerance_used"] = tol_used;
                const auto form = rpq::rp_form_ddim(profile, params, witness_T);
                rep["form_value"] = form.value;
                rep["form_error"] = form.error_estimate;
            }
        } else {
            cfg["S"] = S;
            cfg["T"] = T;
            rep = base_report("ddim nullcheck", cfg);
            const rpq::DdimTestSpec spec{profile, S, T, params};
            const auto r = rpq::null_check_ddim(spec);
            rep["value"] = r.value;
            rep["error_estimate"] = r.error_estimate;
        }
        emit_report(rep, out_json);
        return 0;
    }

    if (sim->parsed()) {
        const rpq::ModelParams params{lambda, mass, lat_dim};
        const auto lat = rpq::build_lattice(lat_dim, lat_n, lat_L, mass);
        const auto comb = parse_comb(comb_spec, mass);
        const auto lcomb = rpq::map_comb_to_sites(lat, comb);
        json cfg{{"dim", lat_dim}, {"n", lat_n}, {"L", lat_L}, {"lambda", lambda},
                 {"mass", mass}, {"samples", samples}, {"seed", seed},
                 {"comb", comb_spec}, {"em_dlambda", em_dlambda}};
        json rep = base_report("simulate", cfg);
        rpq::EnsembleStats stats;
        if (em_dlambda > 0.0) {
            // EM paths from zero initial data; stability is checked up front
            rpq::FieldSample zero;
            zero.values.assign(lat.site_count(), 0.0);
            const auto steps = std::int64_t(std::llround(lambda / em_dlambda));
            std::vector<rpq::detail::ChunkSums> sums(1);
            for (std::int64_t i = 0; i < samples; ++i) {
                zero.index = std::uint64_t(i);
                const auto field =
                    rpq::evolve_em(lat, zero, {em_dlambda, steps, true}, seed);
                double left = 0.0, right = 0.0;
                for (std::size_t a = 0; a < lcomb.sites.size(); ++a) {
                    left += lcomb.weights[a] * field.values[std::size_t(lcomb.reflected[a])];
                    right += lcomb.weights[a] * field.values[std::size_t(lcomb.sites[a])];
                }
                const double y = left * right;
                sums[0].sum += y;
                sums[0].sum_sq += y * y;
                sums[0].count += 1;
            }
            stats = rpq::detail::reduce_stats(sums);
            rep["em_steps"] = steps;
        } else {
            stats = rpq::estimate_rp_form(lat, params, lcomb, samples, seed);
        }
        const double exact = rpq::lattice_rp_form_exact(lat, lambda, lcomb);
        rep["estimate"] = stats.mean;
        rep["std_error"] = stats.std_error;
        rep["count"] = stats.count;
        rep["lattice_exact"] = exact;
        rep["z_vs_exact"] = stats.std_error > 0.0
                                ? (stats.mean - exact) / stats.std_error
                                : 0.0;
        if (lat_dim == 1) {
            const auto cont = rpq::rp_form_dlambda(comb, params);
            rep["continuum_value"] = cont.value;
        }
        if (!save_samples.empty()) {
            rpq::write_sample_stream(save_samples, lat, params, seed,
                                     std::uint64_t(samples));
            rep["samples_file"] = save_samples;
        }
        emit_report(rep, out_json);
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    try {
        return run(argc, argv);
    } catch (const rpq::EmStabilityError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const rpq::quad::QuadratureError &e) {
        std::cerr << "error: " << e.what()
                  << " (best estimate " << e.best_estimate.value << ")\n";
        return 3;
    } catch (const std::domain_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
