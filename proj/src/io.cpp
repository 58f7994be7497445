#include "dicke/io.hpp"

#include "dicke/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace dicke::io {

namespace fs = std::filesystem;

std::string format17(double v) {
    char buf[64];
    const auto res =
        std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view value) {
    const std::string v(trim(value));
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw std::invalid_argument("config: field '" + std::string(key) +
                                    "' expects a number, got '" + v + "'");
    return out;
}

int parse_int(std::string_view key, std::string_view value) {
    const double d = parse_double(key, value);
    const double r = std::round(d);
    if (std::abs(d - r) > 0.0 || std::abs(r) > 1e15)
        throw std::invalid_argument("config: field '" + std::string(key) +
                                    "' expects an integer");
    return static_cast<int>(r);
}

bool parse_bool(std::string_view key, std::string_view value) {
    const std::string_view v = trim(value);
    if (v == "true" || v == "1")
        return true;
    if (v == "false" || v == "0")
        return false;
    throw std::invalid_argument("config: field '" + std::string(key) +
                                "' expects true/false");
}

std::vector<double> parse_double_list(std::string_view key, std::string_view text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto piece =
            text.substr(pos, comma == std::string_view::npos ? text.size() - pos
                                                             : comma - pos);
        if (!trim(piece).empty())
            out.push_back(parse_double(key, piece));
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return out;
}

} // namespace

void RunConfig::validate() const {
    spec();
    couplings();
    grid();
    initial_state();
    if (!(field_intensity > 0.0))
        throw std::invalid_argument("config: field_intensity must be > 0");
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw std::invalid_argument("config: tolerances must be > 0");
}

EnsembleSpec RunConfig::spec() const {
    try {
        return EnsembleSpec(n_atoms);
    } catch (const std::domain_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
}

Couplings RunConfig::couplings() const {
    if (!(field_intensity > 0.0))
        throw std::invalid_argument("config: field_intensity must be > 0");
    try {
        return Couplings(chi * std::sqrt(field_intensity), eta_plus, eta_minus, q);
    } catch (const std::domain_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
}

TimeGrid RunConfig::grid() const {
    TimeGrid g{0.0, t_end, output_points};
    try {
        g.validate();
    } catch (const std::domain_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return g;
}

LadderState RunConfig::initial_state() const {
    const EnsembleSpec s = spec();
    try {
        if (initial == "fully_excited")
            return fully_excited_state(s);
        if (initial == "semi_excited") {
            if (!s.on_ladder(0.0))
                throw std::domain_error(
                    "semi_excited requires m = 0 on the ladder (even n_atoms)");
            return semi_excited_state(s);
        }
        if (initial == "w_state")
            return w_state(s);
        if (initial.rfind("m=", 0) == 0)
            return ladder_basis_state(s, parse_double("initial", initial.substr(2)));
        LadderState state{parse_double_list("initial", initial)};
        state.validate(s);
        return state;
    } catch (const std::domain_error& e) {
        throw std::invalid_argument(std::string("config: initial: ") + e.what());
    }
}

void apply_key(RunConfig& cfg, std::string_view key, std::string_view value) {
    const std::string_view v = trim(value);
    if (key == "n_atoms")
        cfg.n_atoms = parse_int(key, v);
    else if (key == "chi")
        cfg.chi = parse_double(key, v);
    else if (key == "eta_plus")
        cfg.eta_plus = parse_double(key, v);
    else if (key == "eta_minus")
        cfg.eta_minus = parse_double(key, v);
    else if (key == "q")
        cfg.q = parse_double(key, v);
    else if (key == "field_intensity")
        cfg.field_intensity = parse_double(key, v);
    else if (key == "initial")
        cfg.initial = std::string(v);
    else if (key == "t_end")
        cfg.t_end = parse_double(key, v);
    else if (key == "output_points")
        cfg.output_points = parse_int(key, v);
    else if (key == "output_path")
        cfg.output_path = std::string(v);
    else if (key == "format") {
        if (v == "csv")
            cfg.format = OutputFormat::csv;
        else if (v == "json")
            cfg.format = OutputFormat::json;
        else
            throw std::invalid_argument("config: format must be csv or json");
    } else if (key == "full")
        cfg.full = parse_bool(key, v);
    else if (key == "abs_tol")
        cfg.abs_tol = parse_double(key, v);
    else if (key == "rel_tol")
        cfg.rel_tol = parse_double(key, v);
    else
        throw std::invalid_argument("config: unknown key '" + std::string(key) + "'");
}

std::string serialize(const RunConfig& cfg) {
    std::ostringstream os;
    os << "n_atoms = " << cfg.n_atoms << '\n';
    os << "chi = " << format17(cfg.chi) << '\n';
    os << "eta_plus = " << format17(cfg.eta_plus) << '\n';
    os << "eta_minus = " << format17(cfg.eta_minus) << '\n';
    os << "q = " << format17(cfg.q) << '\n';
    os << "field_intensity = " << format17(cfg.field_intensity) << '\n';
    os << "initial = " << cfg.initial << '\n';
    os << "t_end = " << format17(cfg.t_end) << '\n';
    os << "output_points = " << cfg.output_points << '\n';
    os << "output_path = " << cfg.output_path << '\n';
    os << "format = " << (cfg.format == OutputFormat::csv ? "csv" : "json") << '\n';
    os << "full = " << (cfg.full ? "true" : "false") << '\n';
    os << "abs_tol = " << format17(cfg.abs_tol) << '\n';
    os << "rel_tol = " << format17(cfg.rel_tol) << '\n';
    return os.str();
}

namespace {

// Applies every key=value line of `text` through `sink`.
template <typename Sink>
void for_each_assignment(const std::string& text, Sink&& sink) {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const std::string_view trimmed = trim(line);
        if (trimmed.empty())
            continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not a key=value assignment");
        sink(trim(trimmed.substr(0, eq)), trim(trimmed.substr(eq + 1)));
    }
}

void apply_json(RunConfig& cfg, const nlohmann::json& j) {
    if (!j.is_object())
        throw std::invalid_argument("config: JSON document must be an object");
    for (const auto& [key, value] : j.items()) {
        std::string text;
        if (value.is_string())
            text = value.get<std::string>();
        else
            text = value.dump();
        apply_key(cfg, key, text);
    }
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    const std::string_view body = trim(text);
    RunConfig cfg;
    if (!body.empty() && body.front() == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::parse_error& e) {
            throw std::invalid_argument(std::string("config: invalid JSON: ") +
                                        e.what());
        }
        apply_json(cfg, j);
        return cfg;
    }
    for_each_assignment(text, [&cfg](std::string_view k, std::string_view v) {
        apply_key(cfg, k, v);
    });
    return cfg;
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::invalid_argument("config: cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

RunConfig parse_config_file(const std::string& path) {
    return parse_config_text(read_file(path));
}

bool is_known_aggregate(std::string_view name) {
    return name == "peak_intensity" || name == "peak_time" || name == "has_delay" ||
           name == "emitted_fraction";
}

void SweepConfig::validate() const {
    base.validate();
    if (parameters.empty() || parameters.size() > 2)
        throw std::invalid_argument("sweep: need one or two swept parameters");
    for (const auto& p : parameters) {
        if (p.values.empty())
            throw std::invalid_argument("sweep: parameter '" + p.name +
                                        "' has no values");
        RunConfig probe = base;
        set_numeric_field(probe, p.name, p.values.front()); // name check
    }
    if (aggregates.empty())
        throw std::invalid_argument("sweep: aggregation list is empty");
    for (const auto& a : aggregates)
        if (!is_known_aggregate(a))
            throw std::invalid_argument("sweep: unknown aggregate '" + a + "'");
}

void set_numeric_field(RunConfig& cfg, std::string_view name, double value) {
    auto as_int = [&](std::string_view field) {
        const double r = std::round(value);
        if (value != r)
            throw std::invalid_argument("sweep: field '" + std::string(field) +
                                        "' expects integer values");
        return static_cast<int>(r);
    };
    if (name == "n_atoms")
        cfg.n_atoms = as_int(name);
    else if (name == "chi")
        cfg.chi = value;
    else if (name == "eta_plus")
        cfg.eta_plus = value;
    else if (name == "eta_minus")
        cfg.eta_minus = value;
    else if (name == "q")
        cfg.q = value;
    else if (name == "t_end")
        cfg.t_end = value;
    else if (name == "field_intensity")
        cfg.field_intensity = value;
    else if (name == "output_points")
        cfg.output_points = as_int(name);
    else
        throw std::invalid_argument("sweep: '" + std::string(name) +
                                    "' is not a sweepable numeric field");
}

namespace {

std::vector<double> parse_range(std::string_view key, std::string_view text) {
    // start:stop:step, inclusive of stop up to rounding.
    std::array<double, 3> parts{};
    std::size_t idx = 0, pos = 0;
    const std::string s(text);
    while (idx < 3) {
        const auto colon = s.find(':', pos);
        const auto piece =
            s.substr(pos, colon == std::string::npos ? std::string::npos : colon - pos);
        parts[idx++] = parse_double(key, piece);
        if (colon == std::string::npos)
            break;
        pos = colon + 1;
    }
    if (idx != 3)
        throw std::invalid_argument("sweep: range for '" + std::string(key) +
                                    "' must be start:stop:step");
    const auto [start, stop, step] = std::tuple{parts[0], parts[1], parts[2]};
    if (!(step > 0.0) || stop < start)
        throw std::invalid_argument("sweep: range for '" + std::string(key) +
                                    "' must have step > 0 and stop >= start");
    std::vector<double> out;
    for (double v = start; v <= stop + 0.5 * step; v += step)
        out.push_back(std::min(v, stop));
    return out;
}

} // namespace

SweepConfig parse_sweep_text(const std::string& text) {
    SweepConfig sweep;
    std::array<SweepParameter, 2> slots;
    std::array<bool, 2> have_slot{false, false};

    for_each_assignment(text, [&](std::string_view key, std::string_view value) {
        if (key.rfind("sweep.", 0) != 0) {
            apply_key(sweep.base, key, value);
            return;
        }
        const std::string_view sub = key.substr(6);
        auto slot_of = [&](std::string_view stem) -> int {
            if (sub == std::string(stem) + "1")
                return 0;
            if (sub == std::string(stem) + "2")
                return 1;
            return -1;
        };
        if (int i = slot_of("param"); i >= 0) {
            slots[i].name = std::string(trim(value));
            have_slot[i] = true;
        } else if (int i = slot_of("values"); i >= 0) {
            slots[i].values = parse_double_list(key, value);
            have_slot[i] = true;
        } else if (int i = slot_of("range"); i >= 0) {
            slots[i].values = parse_range(key, value);
            have_slot[i] = true;
        } else if (sub == "aggregates") {
            sweep.aggregates.clear();
            std::size_t pos = 0;
            const std::string v(value);
            while (pos <= v.size()) {
                const auto comma = v.find(',', pos);
                const auto piece = trim(
                    v.substr(pos, comma == std::string::npos ? v.size() - pos
                                                             : comma - pos));
                if (!piece.empty())
                    sweep.aggregates.emplace_back(piece);
                if (comma == std::string::npos)
                    break;
                pos = comma + 1;
            }
        } else {
            throw std::invalid_argument("sweep: unknown key 'sweep." +
                                        std::string(sub) + "'");
        }
    });

    for (int i = 0; i < 2; ++i)
        if (have_slot[i]) {
            if (slots[i].name.empty())
                throw std::invalid_argument("sweep: missing sweep.param" +
                                            std::to_string(i + 1));
            sweep.parameters.push_back(std::move(slots[i]));
        }
    sweep.validate();
    return sweep;
}

SweepConfig parse_sweep_file(const std::string& path) {
    return parse_sweep_text(read_file(path));
}

// ---------------------------------------------------------------------------

std::string format_ladder_value(const EnsembleSpec& spec, int k) {
    const long long two_m = 2LL * k - spec.n_atoms();
    if (two_m % 2 == 0)
        return std::to_string(two_m / 2);
    return (two_m < 0 ? "-" : "") + std::to_string(std::llabs(two_m) / 2) + ".5";
}

std::string trace_to_csv(const EnsembleSpec& spec, const PulseTrace& trace) {
    std::ostringstream os;
    os << "tau,intensity";
    for (int k = 0; k < spec.dim(); ++k)
        os << ",p[" << format_ladder_value(spec, k) << ']';
    os << '\n';
    for (std::size_t i = 0; i < trace.size(); ++i) {
        os << format17(trace.times[i]) << ',' << format17(trace.intensities[i]);
        const double* row = trace.row(i);
        for (int k = 0; k < spec.dim(); ++k)
            os << ',' << format17(row[k]);
        os << '\n';
    }
    return os.str();
}

std::string trace_to_json(const EnsembleSpec& spec, const PulseTrace& trace) {
    nlohmann::ordered_json j;
    j["tau"] = trace.times;
    j["intensity"] = trace.intensities;
    std::vector<double> ms(spec.dim());
    for (int k = 0; k < spec.dim(); ++k)
        ms[k] = spec.m_at(k);
    j["m"] = ms;
    auto& pops = j["populations"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < trace.size(); ++i)
        pops.push_back(std::vector<double>(trace.row(i), trace.row(i) + spec.dim()));
    return j.dump(2) + "\n";
}

std::string metadata_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["version"] = dicke::version;
    auto& p = j["parameters"];
    p["n_atoms"] = cfg.n_atoms;
    p["chi"] = cfg.chi;
    p["eta_plus"] = cfg.eta_plus;
    p["eta_minus"] = cfg.eta_minus;
    p["q"] = cfg.q;
    p["field_intensity"] = cfg.field_intensity;
    p["initial"] = cfg.initial;
    p["t_end"] = cfg.t_end;
    p["output_points"] = cfg.output_points;
    p["format"] = cfg.format == OutputFormat::csv ? "csv" : "json";
    p["full"] = cfg.full;
    auto& integ = j["integrator"];
    integ["method"] = "dormand-prince-5(4)";
    integ["abs_tol"] = cfg.abs_tol;
    integ["rel_tol"] = cfg.rel_tol;
    return j.dump(2) + "\n";
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out.flush())
            throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

std::string default_out_dir() {
    if (const char* dir = std::getenv("DICKESIM_OUT_DIR"); dir && *dir)
        return dir;
    return ".";
}

// ---------------------------------------------------------------------------

const std::vector<FigurePreset>& figure_presets() {
    static const std::vector<FigurePreset> presets = [] {
        constexpr double pi = std::numbers::pi;
        return std::vector<FigurePreset>{
            {"2", 0.0, 0.0, "fully_excited"},
            {"3a", pi / 2 - 0.4, 0.0, "fully_excited"},
            {"3b", pi / 2 + 0.4, 0.0, "fully_excited"},
            {"4a", pi / 8, pi / 8, "fully_excited"},
            {"4b", pi / 4 + 0.6, pi / 4, "fully_excited"},
            {"5a", pi / 2 - 0.4, 0.0, "semi_excited"},
            {"5b", pi / 2 + 0.4, 0.0, "semi_excited"},
            {"6a", pi / 4 + 0.6, pi / 4, "semi_excited"},
            {"6b", pi / 4 + 1.4, pi / 4, "semi_excited"},
        };
    }();
    return presets;
}

const FigurePreset& figure_preset(std::string_view id) {
    for (const auto& p : figure_presets())
        if (p.id == id)
            return p;
    throw std::invalid_argument("unknown figure preset '" + std::string(id) +
                                "'; known: 2, 3a, 3b, 4a, 4b, 5a, 5b, 6a, 6b");
}

} // namespace dicke::io
