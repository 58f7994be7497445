// Command-line front end: single runs, figure-preset reproduction, parameter
// sweeps, analytic tables and the Ito-algebra cross-check.

#include "dicke/algebra.hpp"
#include "dicke/dynamics.hpp"
#include "dicke/errors.hpp"
#include "dicke/io.hpp"
#include "dicke/ito.hpp"
#include "dicke/kernels.hpp"
#include "dicke/observables.hpp"
#include "dicke/version.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace dicke;

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_integration = 3;
constexpr int exit_no_suppression = 4;
constexpr int exit_verification = 5;
constexpr int exit_partial_sweep = 6;

void warn_if_outside_validity(const Couplings& c) {
    if (c.outside_validity_range())
        std::cerr << "warning: couplings outside the derivation's validity range "
                     "|eta_±| << chi << 1; results use the renormalized model\n";
}

std::string output_or_default(const std::string& out, const std::string& fallback) {
    if (!out.empty())
        return out;
    return io::default_out_dir() + "/" + fallback;
}

// Writes a trace plus its metadata sidecar.
void write_run_output(const io::RunConfig& cfg, const std::string& path,
                      const EnsembleSpec& spec, const PulseTrace& trace) {
    const std::string body = cfg.format == io::OutputFormat::csv
                                 ? io::trace_to_csv(spec, trace)
                                 : io::trace_to_json(spec, trace);
    io::write_text_atomic(path, body);
    io::write_text_atomic(path + ".meta.json", io::metadata_json(cfg));
}

PulseTrace run_trace(const io::RunConfig& cfg) {
    const EnsembleSpec spec = cfg.spec();
    const Couplings coup = cfg.couplings();
    const LadderState initial = cfg.initial_state();
    const TimeGrid grid = cfg.grid();
    IntegratorOptions opts;
    opts.abs_tol = cfg.abs_tol;
    opts.rel_tol = cfg.rel_tol;
    if (cfg.full) {
        FullState rho{Eigen::MatrixXcd::Zero(spec.dim(), spec.dim())};
        for (int k = 0; k < spec.dim(); ++k)
            rho.rho(k, k) = initial.populations[k];
        return evolve_full(spec, coup, rho, grid, opts).trace;
    }
    return evolve_diagonal(spec, coup, initial, grid, opts);
}

// --- simulate ---------------------------------------------------------------

int cmd_simulate(const io::RunConfig& cfg) {
    cfg.validate();
    warn_if_outside_validity(cfg.couplings());
    const std::string path = output_or_default(
        cfg.output_path,
        cfg.format == io::OutputFormat::csv ? "trace.csv" : "trace.json");
    const PulseTrace trace = run_trace(cfg);
    write_run_output(cfg, path, cfg.spec(), trace);
    std::cout << path << '\n';
    return exit_ok;
}

// --- figure -----------------------------------------------------------------

std::string intensity_tag(double s) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", s);
    return buf;
}

int cmd_figure(const std::string& preset_id, double chi0, double t_end, int points,
               const std::string& out_dir, io::OutputFormat format) {
    const io::FigurePreset& preset = io::figure_preset(preset_id);
    const std::string dir = out_dir.empty() ? io::default_out_dir() : out_dir;
    const char* ext = format == io::OutputFormat::csv ? "csv" : "json";
    for (double s : io::preset_field_intensities) {
        io::RunConfig cfg;
        cfg.n_atoms = 8;
        cfg.chi = chi0;
        cfg.field_intensity = s;
        cfg.eta_plus = preset.eta_plus;
        cfg.eta_minus = preset.eta_minus;
        cfg.initial = std::string(preset.initial);
        cfg.t_end = t_end;
        cfg.output_points = points;
        cfg.format = format;
        cfg.validate();
        warn_if_outside_validity(cfg.couplings());
        const std::string path =
            dir + "/fig" + preset_id + "_s" + intensity_tag(s) + "." + ext;
        write_run_output(cfg, path, cfg.spec(), run_trace(cfg));
        std::cout << path << '\n';
    }
    return exit_ok;
}

// --- analyze ----------------------------------------------------------------

void emit_table(const std::string& out, const std::string& content) {
    if (out.empty())
        std::cout << content;
    else
        io::write_text_atomic(out, content);
}

int analyze_critical(double eta_plus, double eta_minus, int k_max,
                     const std::string& out) {
    const Couplings c(0.1, eta_plus, eta_minus);
    const CriticalSet set = critical_numbers(c, k_max);
    std::ostringstream os;
    os << "k,n_star,nearest_integer,f_at_nearest\n";
    for (std::size_t i = 0; i < set.values.size(); ++i)
        os << (i + 1) << ',' << io::format17(set.values[i]) << ','
           << set.nearest[i].n << ',' << io::format17(set.nearest[i].f_value) << '\n';
    emit_table(out, os.str());
    return exit_ok;
}

int analyze_stabilized(int n_atoms, double eta_plus, double eta_minus,
                       double tolerance, const std::string& out) {
    const EnsembleSpec spec(n_atoms);
    const Couplings c(0.1, eta_plus, eta_minus);
    const StabilizedStates states = stabilized_states(spec, c, tolerance);
    std::ostringstream os;
    os << "m,k,residual\n";
    for (const auto& member : states.members)
        os << io::format17(member.m) << ',' << member.k << ','
           << io::format17(member.residual) << '\n';
    emit_table(out, os.str());
    return exit_ok;
}

int analyze_wstate(int n_atoms, double chi, double eta_plus, double eta_minus,
                   double t_end, int points, const std::string& out) {
    const EnsembleSpec spec(n_atoms);
    const Couplings c(chi, eta_plus, eta_minus);
    warn_if_outside_validity(c);
    const TimeGrid grid{0.0, t_end, points};
    std::ostringstream os;
    os << "tau,survival\n";
    for (double t : grid.sample_times())
        os << io::format17(t) << ',' << io::format17(w_state_decay(spec, c, t))
           << '\n';
    emit_table(out, os.str());
    return exit_ok;
}

int analyze_delay(int n_atoms, double chi, int n_emitted_max,
                  const std::string& out) {
    const EnsembleSpec spec(n_atoms);
    const Couplings c(chi, 0.0, 0.0);
    const double gamma_w = c.gamma_wiener();
    const int n_max = n_emitted_max > 0 ? n_emitted_max : n_atoms;
    std::ostringstream os;
    os << "n_emitted,mean_tau\n";
    for (int n = 1; n <= n_max; ++n)
        os << n << ',' << io::format17(delay_time_sum(spec, gamma_w, n)) << '\n';
    emit_table(out, os.str());
    return exit_ok;
}

// --- verify-ito ---------------------------------------------------------------

// Deterministic uniform doubles in [0,1); avoids the standard library's
// unspecified distribution details.
struct Uniform {
    std::mt19937_64 eng;
    explicit Uniform(std::uint64_t seed) : eng(seed) {}
    double next() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
};

int cmd_verify_ito(int n_max, int trials, std::uint64_t seed, const std::string& out) {
    if (n_max < 1 || n_max > 8)
        throw std::invalid_argument("verify-ito: n_max must be in [1, 8]");
    if (trials < 0)
        throw std::invalid_argument("verify-ito: trials must be >= 0");

    constexpr double threshold = 1e-10;
    Uniform rng(seed);
    std::ostringstream os;
    os << "verify-ito: n_max=" << n_max << " trials=" << trials << " seed=" << seed
       << '\n';

    double worst_coeff = 0.0, worst_rhs = 0.0;
    std::string worst_case = "none";

    for (int n = 1; n <= n_max; ++n) {
        const EnsembleSpec spec(n);
        const int d = spec.dim();
        double n_coeff = 0.0, n_rhs = 0.0;
        for (int t = 0; t < trials; ++t) {
            const double chi = 0.02 + 0.28 * rng.next();
            const double etap = (2.0 * rng.next() - 1.0) * 0.9 * chi;
            const double etam = (2.0 * rng.next() - 1.0) * 0.9 * chi;
            const Couplings c(chi, etap, etam);

            const SdeCoefficients closed = closed_form_coefficients(spec, c);
            const SdeCoefficients series = exponentiate_increment(generator(spec, c));
            const double coeff_dev =
                std::max({(series.a0 - closed.a0).cwiseAbs().maxCoeff(),
                          (series.a_plus - closed.a_plus).cwiseAbs().maxCoeff(),
                          (series.a_minus - closed.a_minus).cwiseAbs().maxCoeff(),
                          (series.a_lambda - closed.a_lambda).cwiseAbs().maxCoeff()});

            Eigen::MatrixXcd a(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    a(i, j) = cplx{rng.next() - 0.5, rng.next() - 0.5};
            Eigen::MatrixXcd rho = a * a.adjoint();
            const double tr = rho.trace().real();
            if (tr < 1e-12)
                rho = Eigen::MatrixXcd::Identity(d, d) / d;
            else
                rho /= tr;

            const Eigen::MatrixXcd sde = master_equation_rhs_from_sde(series, rho);
            const Eigen::MatrixXcd explicit_rhs = full_rhs(spec, c, FullState{rho});
            const double rhs_dev = (sde - explicit_rhs).cwiseAbs().maxCoeff();

            n_coeff = std::max(n_coeff, coeff_dev);
            n_rhs = std::max(n_rhs, rhs_dev);
            if (std::max(coeff_dev, rhs_dev) > std::max(worst_coeff, worst_rhs)) {
                std::ostringstream ws;
                ws << "n_atoms=" << n << " chi=" << io::format17(chi)
                   << " eta_plus=" << io::format17(etap)
                   << " eta_minus=" << io::format17(etam);
                worst_case = ws.str();
            }
            worst_coeff = std::max(worst_coeff, coeff_dev);
            worst_rhs = std::max(worst_rhs, rhs_dev);
        }
        os << "n_atoms=" << n << ": max coeff dev=" << io::format17(n_coeff)
           << " max rhs dev=" << io::format17(n_rhs) << '\n';
    }

    const bool pass = worst_coeff <= threshold && worst_rhs <= threshold;
    os << "overall: max coeff dev=" << io::format17(worst_coeff)
       << " max rhs dev=" << io::format17(worst_rhs)
       << " threshold=" << io::format17(threshold) << " => "
       << (pass ? "PASS" : "FAIL") << '\n';
    if (!pass)
        os << "worst case: " << worst_case << '\n';

    emit_table(out, os.str());
    return pass ? exit_ok : exit_verification;
}

// --- sweep --------------------------------------------------------------------

double mean_ladder_value(const EnsembleSpec& spec, const double* row) {
    double mean = 0.0;
    for (int k = 0; k < spec.dim(); ++k)
        mean += spec.m_at(k) * row[k];
    return mean;
}

std::string aggregate_value(const std::string& name, const io::RunConfig& cfg,
                            const PulseTrace& trace) {
    const PeakInfo peak = peak_and_delay(trace);
    if (name == "peak_intensity")
        return io::format17(peak.peak_intensity);
    if (name == "peak_time")
        return io::format17(peak.peak_time);
    if (name == "has_delay")
        return peak.has_delay ? "1" : "0";
    if (name == "emitted_fraction") {
        const EnsembleSpec spec = cfg.spec();
        const double m0 = mean_ladder_value(spec, trace.row(0));
        const double m1 = mean_ladder_value(spec, trace.row(trace.size() - 1));
        const double available = m0 + spec.spin();
        return io::format17(available <= 0.0 ? 0.0 : (m0 - m1) / available);
    }
    throw std::invalid_argument("sweep: unknown aggregate '" + name + "'");
}

int cmd_sweep(const io::SweepConfig& sweep, const std::string& out) {
    sweep.validate();
    std::ostringstream os;
    for (const auto& p : sweep.parameters)
        os << p.name << ',';
    for (std::size_t i = 0; i < sweep.aggregates.size(); ++i)
        os << sweep.aggregates[i] << ',';
    os << "status\n";

    const bool two = sweep.parameters.size() == 2;
    const auto& outer = sweep.parameters[0];
    const std::vector<double> inner_values =
        two ? sweep.parameters[1].values : std::vector<double>{0.0};

    bool any_failed = false;
    for (double v0 : outer.values) {
        for (double v1 : inner_values) {
            io::RunConfig cfg = sweep.base;
            io::set_numeric_field(cfg, outer.name, v0);
            if (two)
                io::set_numeric_field(cfg, sweep.parameters[1].name, v1);
            os << io::format17(v0) << ',';
            if (two)
                os << io::format17(v1) << ',';
            try {
                cfg.validate();
                const PulseTrace trace = run_trace(cfg);
                for (const auto& name : sweep.aggregates)
                    os << aggregate_value(name, cfg, trace) << ',';
                os << "ok\n";
            } catch (const std::exception& e) {
                any_failed = true;
                for (std::size_t i = 0; i < sweep.aggregates.size(); ++i)
                    os << ',';
                os << "failed\n";
                std::cerr << "sweep: " << outer.name << "=" << io::format17(v0);
                if (two)
                    std::cerr << " " << sweep.parameters[1].name << "="
                              << io::format17(v1);
                std::cerr << ": " << e.what() << '\n';
            }
        }
    }
    emit_table(out, os.str());
    return any_failed ? exit_partial_sweep : exit_ok;
}

// --- option plumbing ----------------------------------------------------------

struct RunFlags {
    std::string config_path;
    std::optional<int> n_atoms;
    std::optional<double> chi, eta_plus, eta_minus, q, field_intensity, t_end;
    std::optional<double> abs_tol, rel_tol;
    std::optional<int> points;
    std::optional<std::string> initial, format, out;
    bool full = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("--config", f.config_path, "configuration file (key=value or JSON)");
    cmd->add_option("--n-atoms", f.n_atoms, "ensemble size N");
    cmd->add_option("--chi", f.chi, "Raman coupling chi");
    cmd->add_option("--eta-plus", f.eta_plus, "Stark parameter eta_+");
    cmd->add_option("--eta-minus", f.eta_minus, "Stark parameter eta_-");
    cmd->add_option("--q", f.q, "geometric intensity factor");
    cmd->add_option("--field-intensity", f.field_intensity,
                    "classical field intensity s, scales chi^2 by s");
    cmd->add_option("--initial", f.initial,
                    "fully_excited|semi_excited|w_state|m=<v>|p0,p1,...");
    cmd->add_option("--t-end", f.t_end, "end of the dimensionless time window");
    cmd->add_option("--points", f.points, "number of output samples");
    cmd->add_option("--format", f.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", f.out, "output path");
    cmd->add_flag("--full", f.full, "integrate the dense density matrix");
    cmd->add_option("--abs-tol", f.abs_tol, "integrator absolute tolerance");
    cmd->add_option("--rel-tol", f.rel_tol, "integrator relative tolerance");
}

io::RunConfig resolve_config(const RunFlags& f) {
    io::RunConfig cfg;
    if (!f.config_path.empty())
        cfg = io::parse_config_file(f.config_path);
    if (f.n_atoms)
        cfg.n_atoms = *f.n_atoms;
    if (f.chi)
        cfg.chi = *f.chi;
    if (f.eta_plus)
        cfg.eta_plus = *f.eta_plus;
    if (f.eta_minus)
        cfg.eta_minus = *f.eta_minus;
    if (f.q)
        cfg.q = *f.q;
    if (f.field_intensity)
        cfg.field_intensity = *f.field_intensity;
    if (f.initial)
        cfg.initial = *f.initial;
    if (f.t_end)
        cfg.t_end = *f.t_end;
    if (f.points)
        cfg.output_points = *f.points;
    if (f.format)
        cfg.format = *f.format == "csv" ? io::OutputFormat::csv : io::OutputFormat::json;
    if (f.out)
        cfg.output_path = *f.out;
    if (f.full)
        cfg.full = true;
    if (f.abs_tol)
        cfg.abs_tol = *f.abs_tol;
    if (f.rel_tol)
        cfg.rel_tol = *f.rel_tol;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-Wiener Dicke superradiance simulator"};
    app.set_version_flag("--version", dicke::version);
    app.require_subcommand(1);

    // simulate
    RunFlags sim_flags;
    CLI::App* sim = app.add_subcommand("simulate", "run one evolution and write a trace");
    add_run_flags(sim, sim_flags);
    std::uint64_t sim_seed = 0;
    sim->add_option("--seed", sim_seed, "accepted for interface parity (runs are deterministic)");

    // figure
    std::string fig_preset;
    double fig_chi0 = 0.1, fig_t_end = 200.0;
    int fig_points = 501;
    std::string fig_out, fig_format = "csv";
    CLI::App* fig = app.add_subcommand(
        "figure", "run a figure preset (three classical-field intensities)");
    fig->add_option("preset", fig_preset, "one of 2, 3a, 3b, 4a, 4b, 5a, 5b, 6a, 6b")
        ->required();
    fig->add_option("--chi", fig_chi0, "base coupling chi_0 (chi^2 = s chi_0^2)");
    fig->add_option("--t-end", fig_t_end, "time window");
    fig->add_option("--points", fig_points, "output samples");
    fig->add_option("--out", fig_out, "output directory");
    fig->add_option("--format", fig_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    // analyze
    CLI::App* analyze = app.add_subcommand("analyze", "closed-form analysis tables");
    analyze->require_subcommand(1);
    int an_n_atoms = 8, an_k_max = 3, an_points = 101, an_n_emitted = 0;
    double an_eta_plus = 0.0, an_eta_minus = 0.0, an_chi = 0.1, an_tol = 1e-9,
           an_t_end = 100.0;
    std::string an_out;

    CLI::App* crit = analyze->add_subcommand("critical", "critical atom numbers N*(k)");
    crit->add_option("--eta-plus", an_eta_plus, "eta_+")->required();
    crit->add_option("--eta-minus", an_eta_minus, "eta_-");
    crit->add_option("--k-max", an_k_max, "number of critical values");
    crit->add_option("--out", an_out, "output path (default stdout)");

    CLI::App* stab = analyze->add_subcommand("stabilized", "stabilized ladder states");
    stab->add_option("--n-atoms", an_n_atoms, "ensemble size")->required();
    stab->add_option("--eta-plus", an_eta_plus, "eta_+")->required();
    stab->add_option("--eta-minus", an_eta_minus, "eta_-");
    stab->add_option("--tolerance", an_tol, "phase residual tolerance");
    stab->add_option("--out", an_out, "output path (default stdout)");

    CLI::App* wst = analyze->add_subcommand("wstate", "singly excited state survival");
    wst->add_option("--n-atoms", an_n_atoms, "ensemble size")->required();
    wst->add_option("--chi", an_chi, "coupling chi");
    wst->add_option("--eta-plus", an_eta_plus, "eta_+");
    wst->add_option("--eta-minus", an_eta_minus, "eta_-");
    wst->add_option("--t-end", an_t_end, "time window");
    wst->add_option("--points", an_points, "samples");
    wst->add_option("--out", an_out, "output path (default stdout)");

    CLI::App* dly = analyze->add_subcommand(
        "delay", "mean emission times from a fully excited start");
    dly->add_option("--n-atoms", an_n_atoms, "ensemble size")->required();
    dly->add_option("--chi", an_chi, "coupling chi (gamma_W = chi^2)");
    dly->add_option("--n-emitted", an_n_emitted,
                    "largest photon count (default n_atoms)");
    dly->add_option("--out", an_out, "output path (default stdout)");

    // verify-ito
    int vi_n_max = 8, vi_trials = 100;
    std::uint64_t vi_seed = 0;
    std::string vi_out;
    CLI::App* vi = app.add_subcommand(
        "verify-ito",
        "cross-check series-exponentiated SDE coefficients against closed forms");
    vi->add_option("--n-max", vi_n_max, "largest ensemble size (<= 8)");
    vi->add_option("--trials", vi_trials, "random coupling draws per size");
    vi->add_option("--seed", vi_seed, "RNG seed");
    vi->add_option("--out", vi_out, "report path (default stdout)");

    // sweep
    std::string sw_config, sw_out;
    CLI::App* sw = app.add_subcommand("sweep", "run a parameter sweep");
    sw->add_option("--config", sw_config, "sweep configuration file")->required();
    sw->add_option("--out", sw_out, "table path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(resolve_config(sim_flags));
        if (fig->parsed())
            return cmd_figure(fig_preset, fig_chi0, fig_t_end, fig_points, fig_out,
                              fig_format == "csv" ? io::OutputFormat::csv
                                                  : io::OutputFormat::json);
        if (crit->parsed())
            return analyze_critical(an_eta_plus, an_eta_minus, an_k_max, an_out);
        if (stab->parsed())
            return analyze_stabilized(an_n_atoms, an_eta_plus, an_eta_minus, an_tol,
                                      an_out);
        if (wst->parsed())
            return analyze_wstate(an_n_atoms, an_chi, an_eta_plus, an_eta_minus,
                                  an_t_end, an_points, an_out);
        if (dly->parsed())
            return analyze_delay(an_n_atoms, an_chi, an_n_emitted, an_out);
        if (vi->parsed())
            return cmd_verify_ito(vi_n_max, vi_trials, vi_seed, vi_out);
        if (sw->parsed())
            return cmd_sweep(io::parse_sweep_file(sw_config), sw_out);
    } catch (const NoSuppressionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_no_suppression;
    } catch (const IntegrationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_integration;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_verification;
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return exit_config;
}
