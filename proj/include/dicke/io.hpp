#pragma once

#include "dicke/algebra.hpp"
#include "dicke/dynamics.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

// Run configuration, trace serialization and figure presets shared by the CLI
// and the test suites. All numeric output is locale-independent with 17
// significant digits, '.' decimal separator and '\n' line endings, so
// repeated runs are byte-identical.
namespace dicke::io {

// Shortest-width 17-significant-digit decimal form of v.
std::string format17(double v);

enum class OutputFormat { csv, json };

struct RunConfig {
    int n_atoms = 8;
    double chi = 0.1;
    double eta_plus = 0.0;
    double eta_minus = 0.0;
    double q = 1.0;
    // Dimensionless classical-field intensity s; scales the coupling as
    // chi_eff^2 = s * chi^2.
    double field_intensity = 1.0;
    // fully_excited | semi_excited | w_state | m=<value> | p1,p2,...
    std::string initial = "fully_excited";
    double t_end = 100.0;
    int output_points = 201;
    std::string output_path;
    OutputFormat format = OutputFormat::csv;
    bool full = false; // integrate the dense density matrix instead
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;

    void validate() const;
    EnsembleSpec spec() const;
    Couplings couplings() const; // field_intensity folded into chi
    TimeGrid grid() const;
    LadderState initial_state() const;

    bool operator==(const RunConfig&) const = default;
};

// Applies one key=value assignment; throws std::invalid_argument for unknown
// keys or malformed values, naming the field.
void apply_key(RunConfig& cfg, std::string_view key, std::string_view value);

// Flat key=value text ('#' comments); parse(serialize(c)) == c exactly.
std::string serialize(const RunConfig& cfg);
RunConfig parse_config_text(const std::string& text);

// Reads either the flat format or a JSON object with the same keys.
RunConfig parse_config_file(const std::string& path);

struct SweepParameter {
    std::string name; // numeric RunConfig field
    std::vector<double> values;
};

struct SweepConfig {
    RunConfig base;
    std::vector<SweepParameter> parameters; // one or two
    std::vector<std::string> aggregates;    // nonempty

    void validate() const;
};

// Known aggregate names: peak_intensity, peak_time, has_delay,
// emitted_fraction.
bool is_known_aggregate(std::string_view name);

// Flat format with sweep.param1/sweep.values1 (or sweep.range1 =
// start:stop:step), optional sweep.param2/..., and sweep.aggregates; all other
// keys configure the base run.
SweepConfig parse_sweep_text(const std::string& text);
SweepConfig parse_sweep_file(const std::string& path);

// Sets a numeric field by its config key name.
void set_numeric_field(RunConfig& cfg, std::string_view name, double value);

// ---------------------------------------------------------------------------
// Trace output. CSV header: tau,intensity,p[-r],...,p[r].

std::string format_ladder_value(const EnsembleSpec& spec, int k); // "-4", "-3.5"
std::string trace_to_csv(const EnsembleSpec& spec, const PulseTrace& trace);
std::string trace_to_json(const EnsembleSpec& spec, const PulseTrace& trace);
std::string metadata_json(const RunConfig& cfg);

// Writes via a temporary file in the same directory plus rename, creating
// parent directories as needed.
void write_text_atomic(const std::string& path, const std::string& content);

// Directory used when no output path is given: $DICKESIM_OUT_DIR or ".".
std::string default_out_dir();

// ---------------------------------------------------------------------------
// Figure presets: three classical-field intensities per preset, N = 8.

struct FigurePreset {
    std::string_view id;
    double eta_plus;
    double eta_minus;
    std::string_view initial;
};

inline constexpr std::array<double, 3> preset_field_intensities{0.64, 1.0, 1.44};

const std::vector<FigurePreset>& figure_presets();
// Throws std::invalid_argument for an unknown id.
const FigurePreset& figure_preset(std::string_view id);

} // namespace dicke::io
