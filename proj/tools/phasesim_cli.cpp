// ---------------------------------------------------------------------------
// phasesim -- command-line front end of the two-photocurrent phase
// measurement simulator.
//
// Subcommands:
//   simulate   run the two-step protocol; writes hist1.csv, hist2.csv,
//              summary.json
//   density    evaluate a marginal phase density (closed form, radial
//              quadrature, or Fock sum); writes density.csv (or .json)
//   sweep      width-versus-N scaling table; writes sweep.csv (or .json)
//   validate   run the built-in cross-check suite
//
// Exit codes: 0 success, 1 validation-suite failure, 2 bad arguments,
// 3 infeasible/overflow domain.  Every command is deterministic given its
// flags; PHASESIM_SEED overrides the default seed when --seed is absent.
// ---------------------------------------------------------------------------

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "phasesim/gaussian.hpp"
#include "phasesim/io.hpp"
#include "phasesim/phase.hpp"
#include "phasesim/simulate.hpp"

namespace {

using namespace phasesim;

constexpr double kPi = 3.14159265358979323846;

std::string out_path(const std::string& dir, const char* name) {
    return (std::filesystem::path(dir) / name).string();
}

void ensure_out_dir(const std::string& dir) {
    if (!dir.empty() && dir != ".") {
        std::filesystem::create_directories(dir);
    }
}

// CLI11 processes config files only on the root application, so each
// subcommand takes a plain --config option instead and the key=value pairs
// are applied here, filling exactly the options that were not set on the
// command line or through the environment.
void apply_config_file(CLI::App* sub, const std::string& path) {
    if (path.empty()) return;
    const std::string text = read_text_file(path);
    const auto strip = [](const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string();
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    };
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        const std::string line = strip(text.substr(pos, eol - pos));
        pos = eol + 1;
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: expected key=value, got '" + line + "'");
        }
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty() || key == "config") {
            throw std::invalid_argument("config: bad key in line '" + line + "'");
        }
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr) {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
        if (opt->count() > 0) continue;  // explicit flags and environment win
        opt->add_result(value);
        opt->run_callback();
    }
}

std::vector<double> parse_photon_list(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string item =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0' || !std::isfinite(v)) {
            throw std::invalid_argument("malformed photon-number list entry: '" + item + "'");
        }
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

// -----------------------------------------------------------------------
// simulate
// -----------------------------------------------------------------------
struct SimulateConfig {
    std::string config_path;
    double total_photons = 2.0;
    double beta_s = 0.5625;
    double beta_p = 0.25;
    std::size_t n_samples = 100000;
    std::size_t n_bins = 200;
    std::uint64_t seed = 1;
    std::string reallocation = "fixed-ratio";
    unsigned threads = 1;
    std::string out_dir = ".";
};

int cmd_simulate(const SimulateConfig& cfg) {
    const Reallocation rule = cfg.reallocation == "fixed-rs" ? Reallocation::FixedRs
                                                             : Reallocation::FixedRatio;
    const TwoStepResult res =
        two_step({cfg.total_photons, cfg.beta_s, cfg.beta_p}, cfg.n_samples,
                 cfg.n_bins, cfg.seed, rule, cfg.threads);
    ensure_out_dir(cfg.out_dir);
    write_text_file(out_path(cfg.out_dir, "hist1.csv"), histogram_csv(res.hist1));
    write_text_file(out_path(cfg.out_dir, "hist2.csv"), histogram_csv(res.hist2));
    write_text_file(out_path(cfg.out_dir, "summary.json"),
                    summary_json(res, "hist1.csv", "hist2.csv"));
    std::cout << "phi_bar = " << format_double(res.phi_bar)
              << " rad (phi_bar/pi = " << format_double(res.phi_bar / kPi) << ")\n"
              << "width1 = " << format_double(res.width1)
              << " rad (predicted " << format_double(res.predicted1) << ")\n"
              << "width2 = " << format_double(res.width2)
              << " rad (predicted " << format_double(res.predicted2) << ")\n"
              << "wrote hist1.csv hist2.csv summary.json in " << cfg.out_dir << "\n";
    return 0;
}

// -----------------------------------------------------------------------
// density
// -----------------------------------------------------------------------
struct DensityConfig {
    std::string config_path;
    double x_s = 0.0;
    double r_s = 0.0;
    double r_p = 0.0;
    std::string method = "closed";
    std::size_t phase_points = 512;
    std::string out_dir = ".";
    std::string format = "csv";
};

int cmd_density(const DensityConfig& cfg) {
    const PhaseGrid grid{cfg.phase_points};
    validate_phase_grid(grid);
    PhaseDensity density;
    if (cfg.method == "fock") {
        if (cfg.r_s != 0.0 || cfg.r_p != 0.0) {
            throw std::invalid_argument(
                "fock method supports coherent states only (r_s = r_p = 0)");
        }
        density = fock_marginal(coherent_fock(cfg.x_s, fock_default_dim(cfg.x_s)), grid);
    } else {
        const GaussianModel model =
            composed_model({cfg.x_s, cfg.r_s}, {cfg.r_p, 0.0});
        density = cfg.method == "quadrature" ? marginal_by_quadrature(model, grid)
                                             : closed_form_density(model, grid);
    }
    ensure_out_dir(cfg.out_dir);
    const char* name = cfg.format == "json" ? "density.json" : "density.csv";
    write_text_file(out_path(cfg.out_dir, name),
                    cfg.format == "json" ? density_json(density) : density_csv(density));
    std::cout << "integral = " << format_double(density_integral(density)) << "\n"
              << "numeric width = " << format_double(numeric_width(density)) << "\n"
              << "wrote " << name << " in " << cfg.out_dir << "\n";
    return 0;
}

// -----------------------------------------------------------------------
// sweep
// -----------------------------------------------------------------------
struct SweepConfig {
    std::string config_path;
    std::string photon_list = "100,1000,10000";
    double beta_s = 0.25;
    double beta_p = 0.25;
    std::string method = "analytic";
    std::size_t n_samples = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string out_dir = ".";
    std::string format = "csv";
};

int cmd_sweep(const SweepConfig& cfg) {
    const std::vector<double> photons = parse_photon_list(cfg.photon_list);
    const SweepMode mode = cfg.method == "monte-carlo" ? SweepMode::MonteCarlo
                                                       : SweepMode::Analytic;
    const SweepResult sweep = scaling_sweep(photons, cfg.beta_s, cfg.beta_p, mode,
                                            cfg.seed, cfg.n_samples, cfg.threads);
    ensure_out_dir(cfg.out_dir);
    const char* name = cfg.format == "json" ? "sweep.json" : "sweep.csv";
    write_text_file(out_path(cfg.out_dir, name),
                    cfg.format == "json" ? sweep_json(sweep) : sweep_csv(sweep));
    for (const SweepRow& r : sweep.rows) {
        std::cout << "N = " << format_double(r.N)
                  << "  width1 = " << format_double(r.width1)
                  << "  width2 = " << format_double(r.width2) << "\n";
    }
    std::cout << "slope1 = " << format_double(sweep.slope1) << " (log width1 / log N)\n"
              << "slope2 = " << format_double(sweep.slope2) << " (log width2 / log N)\n"
              << "wrote " << name << " in " << cfg.out_dir << "\n";
    return 0;
}

// -----------------------------------------------------------------------
// validate -- the cross-check suite.  Each check prints one line; any
// failure flips the exit code to 1.  Setting PHASESIM_INJECT_FAULT=1
// perturbs a reference constant to prove the harness can fail.
// -----------------------------------------------------------------------
struct CheckReport {
    bool all_passed = true;

    void record(const char* name, bool passed, double measured, double tol) {
        std::printf("%s  %-26s measured = %.3e  (tol %.1e)\n",
                    passed ? "PASS" : "FAIL", name, measured, tol);
        if (!passed) all_passed = false;
    }
};

int cmd_validate() {
    CheckReport report;
    const char* fault_env = std::getenv("PHASESIM_INJECT_FAULT");
    const bool fault = fault_env != nullptr && std::string(fault_env) != "0";
    // Reference level of the phase-uniform vacuum density; the fault hook
    // shifts it past the tolerance so the suite must report failure.
    const double uniform_ref = 1.0 / (2.0 * kPi) + (fault ? 1e-9 : 0.0);

    // Vacuum uniformity of the closed form.
    {
        double worst = 0.0;
        for (int k = 0; k < 64; ++k) {
            const double phi = -kPi + (k + 1) * (2.0 * kPi / 64.0);
            const double dev = std::abs(marginal_closed_form(0.0, 0.5, 0.5, phi) - uniform_ref);
            if (dev > worst) worst = dev;
        }
        report.record("vacuum_uniformity", worst <= 1e-12, worst, 1e-12);
    }

    const SqueezedSignalParams step1_sig{std::sqrt(1.5), std::asinh(std::sqrt(0.5))};
    const GaussianModel step1_model = composed_model(step1_sig, {0.0, 0.0});
    const PhaseGrid grid{512};

    // Closed form against radial quadrature.
    {
        const PhaseDensity closed = closed_form_density(step1_model, grid);
        const PhaseDensity quad = marginal_by_quadrature(step1_model, grid);
        double worst = 0.0;
        for (std::size_t k = 0; k < grid.n_points; ++k) {
            const double dev = std::abs(closed.values[k] - quad.values[k]);
            if (dev > worst) worst = dev;
        }
        report.record("closed_vs_quadrature", worst < 1e-8, worst, 1e-8);
    }

    // Fock sum against the closed form for a coherent state.
    {
        const PhaseDensity fock = fock_marginal(coherent_fock(1.0, 60), grid);
        const PhaseDensity closed =
            closed_form_density(composed_model({1.0, 0.0}, {0.0, 0.0}), grid);
        double worst = 0.0;
        for (std::size_t k = 0; k < grid.n_points; ++k) {
            const double dev = std::abs(fock.values[k] - closed.values[k]);
            if (dev > worst) worst = dev;
        }
        report.record("fock_vs_closed", worst < 1e-6, worst, 1e-6);
    }

    // Normalization of the closed-form density.
    {
        const double dev = std::abs(density_integral(closed_form_density(step1_model, grid)) - 1.0);
        report.record("density_normalization", dev < 1e-6, dev, 1e-6);
    }

    // Grid convolution against the analytic composed Gaussian (desk-size grid).
    {
        const std::size_t m = 121;
        const double half_width = 6.0;
        const PlaneGrid conv =
            grid_convolution(wigner_on_grid(step1_sig, half_width, m),
                             wigner_on_grid(ProbeParams{0.0, 0.0}, half_width, m));
        const PlaneGrid exact = wigner_on_grid(step1_model, half_width, m);
        double worst = 0.0;
        for (std::size_t i = 0; i < conv.values.size(); ++i) {
            const double dev = std::abs(conv.values[i] - exact.values[i]);
            if (dev > worst) worst = dev;
        }
        report.record("convolution_vs_analytic", worst < 1e-4, worst, 1e-4);
    }

    // Fourier inversion of the characteristic function against the same target.
    {
        const std::size_t m = 121;
        const double half_width = 6.0;
        const PlaneGrid ft = kb_by_fourier(signal_model(step1_sig),
                                           probe_model({0.0, 0.0}), half_width, m);
        const PlaneGrid exact = wigner_on_grid(step1_model, half_width, m);
        double worst = 0.0;
        for (std::size_t i = 0; i < ft.values.size(); ++i) {
            const double dev = std::abs(ft.values[i] - exact.values[i]);
            if (dev > worst) worst = dev;
        }
        report.record("fourier_vs_analytic", worst < 1e-3, worst, 1e-3);
    }

    // Width law: numeric width over the step-1 prediction at N = 100.
    {
        const EnergyBudget budget{100.0, 0.75, 0.0};
        const std::array<double, 2> q = q_variances(std::asinh(std::sqrt(25.0)));
        const PhaseDensity density =
            closed_form_density(std::sqrt(75.0), q[0], q[1], PhaseGrid{4096});
        const double ratio = numeric_width(density) / step1_width(budget);
        report.record("width_law_step1", std::abs(ratio - 1.0) < 0.05, ratio, 0.05);
    }

    // Monte Carlo against the closed form, binomial 5-sigma bins.
    {
        const std::size_t n = 100000, bins = 200;
        const StepResult step = run_step(step1_sig, {0.0, 0.0}, n, bins, 1);
        std::size_t ok = 0;
        for (std::size_t k = 0; k < bins; ++k) {
            const double p = marginal_closed_form(step1_model, step.hist.center(k)) *
                             step.hist.spacing();
            const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
            const double observed =
                static_cast<double>(step.hist.counts[k]) / static_cast<double>(n);
            if (std::abs(observed - p) <= 5.0 * se) ++ok;
        }
        const double frac = static_cast<double>(ok) / static_cast<double>(bins);
        report.record("mc_vs_analytic_bins", frac >= 0.99, frac, 0.99);
    }

    // Two-step sharpening on the default budget.
    {
        const TwoStepResult res = two_step({2.0, 0.5625, 0.25}, 100000, 200, 1);
        report.record("two_step_sharpening", res.width2 < res.width1,
                      res.width2 / res.width1, 1.0);
    }

    // Determinism across thread counts.
    {
        const StepResult a = run_step(step1_sig, {0.0, 0.0}, 20000, 200, 99, 1, 1);
        const StepResult b = run_step(step1_sig, {0.0, 0.0}, 20000, 200, 99, 1, 4);
        const bool same = a.hist.counts == b.hist.counts && a.phi_bar == b.phi_bar &&
                          a.width == b.width;
        report.record("determinism_threads", same, same ? 0.0 : 1.0, 0.0);
    }

    std::printf("%s\n", report.all_passed ? "all checks passed" : "CHECKS FAILED");
    return report.all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phasesim: two-photocurrent quantum phase measurement simulator"};
    app.require_subcommand(1);

    SimulateConfig sim;
    CLI::App* sim_cmd =
        app.add_subcommand("simulate", "run the two-step measurement protocol");
    sim_cmd->add_option("--config", sim.config_path,
                        "key=value config file; explicit flags take precedence")
        ->check(CLI::ExistingFile);
    sim_cmd->add_option("--total-photons", sim.total_photons, "total mean photon number N");
    sim_cmd->add_option("--beta-s", sim.beta_s, "coherent fraction x_s^2/N of the final signal");
    sim_cmd->add_option("--beta-p", sim.beta_p, "probe squeezing fraction sinh^2(r_p)/N");
    sim_cmd->add_option("--n-samples", sim.n_samples, "samples per step");
    sim_cmd->add_option("--bins", sim.n_bins, "histogram bins over (-pi, pi]");
    sim_cmd->add_option("--seed", sim.seed, "master seed")->envname("PHASESIM_SEED");
    sim_cmd->add_option("--reallocation", sim.reallocation, "step-2 signal split rule")
        ->check(CLI::IsMember({"fixed-ratio", "fixed-rs"}));
    sim_cmd->add_option("--threads", sim.threads, "sampling worker threads");
    sim_cmd->add_option("--out-dir", sim.out_dir, "output directory");

    DensityConfig den;
    CLI::App* den_cmd =
        app.add_subcommand("density", "evaluate a marginal phase density");
    den_cmd->add_option("--config", den.config_path,
                        "key=value config file; explicit flags take precedence")
        ->check(CLI::ExistingFile);
    den_cmd->add_option("--x-s", den.x_s, "signal coherent amplitude");
    den_cmd->add_option("--r-s", den.r_s, "signal squeezing parameter");
    den_cmd->add_option("--r-p", den.r_p, "probe squeezing magnitude (aligned probe)");
    den_cmd->add_option("--method", den.method, "evaluation route")
        ->check(CLI::IsMember({"closed", "quadrature", "fock"}));
    den_cmd->add_option("--phase-points", den.phase_points, "phase grid size (>= 8)");
    den_cmd->add_option("--out-dir", den.out_dir, "output directory");
    den_cmd->add_option("--format", den.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));

    SweepConfig swp;
    CLI::App* swp_cmd =
        app.add_subcommand("sweep", "width scaling against total photon number");
    swp_cmd->add_option("--config", swp.config_path,
                        "key=value config file; explicit flags take precedence")
        ->check(CLI::ExistingFile);
    swp_cmd->add_option("--total-photons", swp.photon_list,
                        "comma-separated ascending photon numbers (>= 3 values)");
    swp_cmd->add_option("--beta-s", swp.beta_s, "coherent fraction");
    swp_cmd->add_option("--beta-p", swp.beta_p, "probe squeezing fraction");
    swp_cmd->add_option("--method", swp.method, "width source")
        ->check(CLI::IsMember({"analytic", "monte-carlo"}));
    swp_cmd->add_option("--n-samples", swp.n_samples, "samples per step (monte-carlo)");
    swp_cmd->add_option("--seed", swp.seed, "master seed")->envname("PHASESIM_SEED");
    swp_cmd->add_option("--threads", swp.threads, "sampling worker threads");
    swp_cmd->add_option("--out-dir", swp.out_dir, "output directory");
    swp_cmd->add_option("--format", swp.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));

    CLI::App* val_cmd = app.add_subcommand("validate", "run the cross-check suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (*sim_cmd) {
            apply_config_file(sim_cmd, sim.config_path);
            return cmd_simulate(sim);
        }
        if (*den_cmd) {
            apply_config_file(den_cmd, den.config_path);
            return cmd_density(den);
        }
        if (*swp_cmd) {
            apply_config_file(swp_cmd, swp.config_path);
            return cmd_sweep(swp);
        }
        if (*val_cmd) return cmd_validate();
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
