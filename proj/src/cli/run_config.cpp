#include "itfh/cli/run_config.hpp"

#include "itfh/cli/figures.hpp"
#include "itfh/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace itfh::cli {

std::string_view to_string(Mode m)
{
    switch (m) {
    case Mode::Simulate: return "simulate";
    case Mode::Analytic: return "analytic";
    case Mode::Efficiency: return "efficiency";
    case Mode::Plane: return "plane";
    case Mode::ValidateWaveform: return "validate-waveform";
    case Mode::Figure: return "figure";
    }
    return "?";
}

Mode mode_from_string(std::string_view name)
{
    for (Mode m : {Mode::Simulate, Mode::Analytic, Mode::Efficiency, Mode::Plane, Mode::ValidateWaveform, Mode::Figure})
        if (to_string(m) == name)
            return m;
    throw ConfigError("unknown mode '" + std::string(name) + "'");
}

std::vector<double> PowerGrid::points() const
{
    if (!(step_db > 0.0))
        throw ConfigError("popt_step must be positive");
    if (!(stop_dbm >= start_dbm))
        throw ConfigError("popt_stop must not be below popt_start");
    const auto n = static_cast<long long>(std::floor((stop_dbm - start_dbm) / step_db + 1e-9)) + 1;
    if (n > 100000)
        throw ConfigError("power grid has more than 100000 points");
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i)
        pts.push_back(start_dbm + static_cast<double>(i) * step_db);
    return pts;
}

namespace {

double parse_double(std::string_view v)
{
    const std::string s(v);
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || !std::isfinite(d))
        throw ConfigError("expected a number, got '" + s + "'");
    return d;
}

std::uint64_t parse_count(std::string_view v)
{
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec == std::errc() && ptr == v.data() + v.size())
        return out;
    // Also accept integral scientific notation such as 1e8.
    const double d = parse_double(v);
    if (d < 0.0 || d != std::floor(d) || d > 1.8e19)
        throw ConfigError("expected a nonnegative integer, got '" + std::string(v) + "'");
    return static_cast<std::uint64_t>(d);
}

int parse_int(std::string_view v, int lo, int hi)
{
    const std::uint64_t u = parse_count(v);
    if (u < static_cast<std::uint64_t>(lo) || u > static_cast<std::uint64_t>(hi))
        throw ConfigError("value " + std::string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(u);
}

int parse_pow2(std::string_view v, int lo, int hi)
{
    const int x = parse_int(v, lo, hi);
    if (!is_pow2(x))
        throw ConfigError("value " + std::string(v) + " is not a power of two");
    return x;
}

bool parse_bool(std::string_view v)
{
    if (v == "1" || v == "true" || v == "yes" || v == "on")
        return true;
    if (v == "0" || v == "false" || v == "no" || v == "off")
        return false;
    throw ConfigError("expected a boolean, got '" + std::string(v) + "'");
}

double positive(std::string_view v)
{
    const double d = parse_double(v);
    if (!(d > 0.0))
        throw ConfigError("value must be positive");
    return d;
}

struct ParseState {
    RunConfig cfg;
};

using Setter = std::function<void(ParseState&, std::string_view)>;

struct KeyDef {
    std::string name;
    std::string help;
    Setter set;
    bool scheme_scoped = true; // allowed inside [scheme] sections
};

const std::vector<KeyDef>& key_defs()
{
    static const std::vector<KeyDef> defs = {
        {"mode", "simulate | analytic | efficiency | plane | validate-waveform | figure",
         [](ParseState& s, std::string_view v) { s.cfg.mode = mode_from_string(v); }, false},
        {"scheme", "itfh | qam-mppm | sppm | mppm | ppm",
         [](ParseState& s, std::string_view v) { s.cfg.scheme = scheme_from_string(v); }, false},
        {"N", "slots per symbol (2..64)", [](ParseState& s, std::string_view v) { s.cfg.params.N = parse_int(v, 2, kMaxSlots); }},
        {"w", "signal slots per symbol (ignored by sppm and ppm)",
         [](ParseState& s, std::string_view v) { s.cfg.params.w = parse_int(v, 1, kMaxSlots); }},
        {"MF", "FSK alphabet size (power of two)", [](ParseState& s, std::string_view v) { s.cfg.params.M_F = parse_pow2(v, 2, 1 << 16); }},
        {"MQ", "QAM alphabet size (power of two, 4..256)", [](ParseState& s, std::string_view v) { s.cfg.params.M_Q = parse_pow2(v, 4, 256); }},
        {"MS", "SPPM transmitter count (power of two)", [](ParseState& s, std::string_view v) { s.cfg.params.M_S = parse_pow2(v, 2, 1 << 16); }},
        {"m", "modulation index in (0, 1]", [](ParseState& s, std::string_view v) {
             const double m = parse_double(v);
             if (!(m > 0.0 && m <= 1.0))
                 throw ConfigError("m must lie in (0, 1]");
             s.cfg.params.m = m;
         }},
        {"Lm", "SPPM amplitude limiting factor in (0, 1)", [](ParseState& s, std::string_view v) {
             const double l = parse_double(v);
             if (!(l > 0.0 && l < 1.0))
                 throw ConfigError("Lm must lie in (0, 1)");
             s.cfg.params.L_m = l;
         }},
        {"temperature", "receiver temperature in K", [](ParseState& s, std::string_view v) { s.cfg.env.temperature = positive(v); }},
        {"load_resistance", "load resistance in ohm", [](ParseState& s, std::string_view v) { s.cfg.env.load_resistance = positive(v); }},
        {"noise_figure_db", "amplifier noise figure in dB", [](ParseState& s, std::string_view v) { s.cfg.env.noise_figure_db = parse_double(v); }},
        {"rin_db_hz", "relative intensity noise in dB/Hz", [](ParseState& s, std::string_view v) { s.cfg.env.rin_db_hz = parse_double(v); }},
        {"responsivity", "photodiode responsivity in A/W", [](ParseState& s, std::string_view v) { s.cfg.env.responsivity = positive(v); }},
        {"popt_start", "first grid power in dBm", [](ParseState& s, std::string_view v) {
             s.cfg.grid.start_dbm = parse_double(v);
             s.cfg.grid_explicit = true;
         }, false},
        {"popt_stop", "last grid power in dBm", [](ParseState& s, std::string_view v) {
             s.cfg.grid.stop_dbm = parse_double(v);
             s.cfg.grid_explicit = true;
         }, false},
        {"popt_step", "grid step in dB", [](ParseState& s, std::string_view v) {
             s.cfg.grid.step_db = positive(v);
             s.cfg.grid_explicit = true;
         }, false},
        {"popt", "single power point in dBm", [](ParseState& s, std::string_view v) {
             s.cfg.grid.start_dbm = s.cfg.grid.stop_dbm = parse_double(v);
             s.cfg.grid_explicit = true;
         }, false},
        {"Rb", "bit rate in bit/s", [](ParseState& s, std::string_view v) { s.cfg.R_b = positive(v); }},
        {"seed", "master random seed", [](ParseState& s, std::string_view v) { s.cfg.seed = parse_count(v); }, false},
        {"min_bit_errors", "stop once this many bit errors (and symbol errors) are seen",
         [](ParseState& s, std::string_view v) { s.cfg.rule.min_bit_errors = parse_count(v); }, false},
        {"min_symbol_errors", "stop once this many symbol errors (and bit errors) are seen",
         [](ParseState& s, std::string_view v) { s.cfg.rule.min_symbol_errors = parse_count(v); }, false},
        {"max_symbols", "symbol budget per power point (figure mode default 1e6)",
         [](ParseState& s, std::string_view v) {
             s.cfg.rule.max_symbols = parse_count(v);
             s.cfg.max_symbols_explicit = true;
         }, false},
        {"workers", "worker threads (0: automatic)", [](ParseState& s, std::string_view v) { s.cfg.workers = parse_int(v, 0, 1024); }, false},
        {"output", "output path, '-' for stdout", [](ParseState& s, std::string_view v) { s.cfg.output = std::string(v); }, false},
        {"backend", "MPPM error backend: bessel | ub | exact",
         [](ParseState& s, std::string_view v) { s.cfg.backend = backend_from_string(v); }, false},
        {"figure", "figure preset name", [](ParseState& s, std::string_view v) {
             find_figure(v); // throws on unknown names
             s.cfg.figure = std::string(v);
         }, false},
        {"simulation", "figure mode: include simulated series", [](ParseState& s, std::string_view v) { s.cfg.figure_simulation = parse_bool(v); }, false},
        {"trials", "waveform crosscheck trials", [](ParseState& s, std::string_view v) {
             s.cfg.trials = parse_count(v);
             if (s.cfg.trials < 2)
                 throw ConfigError("trials must be at least 2");
         }, false},
        {"n0", "waveform: cycles per slot of the lowest tone", [](ParseState& s, std::string_view v) { s.cfg.waveform.n0 = parse_int(v, 1, 1 << 20); }, false},
        {"samples_per_slot", "waveform: samples per slot (0: automatic)",
         [](ParseState& s, std::string_view v) { s.cfg.waveform.samples_per_slot = parse_int(v, 0, 1 << 24); }, false},
    };
    return defs;
}

const KeyDef* find_key(std::string_view name)
{
    for (const auto& d : key_defs())
        if (d.name == name)
            return &d;
    return nullptr;
}

struct Assignment {
    std::string key;
    std::string value;
    int line = 0;
    std::optional<Scheme> section;
};

std::string where(std::string_view source, int line)
{
    return std::string(source) + ":" + std::to_string(line) + ": ";
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// Splits a line into key=value tokens, tolerating spaces around '='.
std::vector<std::string> tokens(const std::string& line)
{
    std::string norm;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '=') {
            while (!norm.empty() && (norm.back() == ' ' || norm.back() == '\t'))
                norm.pop_back();
            norm += '=';
            while (i + 1 < line.size() && (line[i + 1] == ' ' || line[i + 1] == '\t'))
                ++i;
        } else {
            norm += line[i];
        }
    }
    std::istringstream is(norm);
    std::vector<std::string> out;
    for (std::string t; is >> t;)
        out.push_back(t);
    return out;
}

void apply(ParseState& st, const std::string& key, const std::string& value, const std::string& prefix)
{
    const KeyDef* def = find_key(key);
    if (!def)
        throw ConfigError(prefix + "unknown key '" + key + "'");
    try {
        def->set(st, value);
    } catch (const ConfigError& e) {
        throw ConfigError(prefix + key + ": " + e.what());
    }
}

} // namespace

const std::vector<KeyInfo>& config_keys()
{
    static const std::vector<KeyInfo> keys = [] {
        std::vector<KeyInfo> k;
        for (const auto& d : key_defs())
            k.push_back({d.name, d.help});
        return k;
    }();
    return keys;
}

RunConfig parse_config(std::string_view text, std::string_view source, const std::vector<Override>& overrides)
{
    std::vector<Assignment> assigns;
    std::optional<Scheme> section;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        const std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(where(source, line_no) + "malformed section header");
            try {
                section = scheme_from_string(trim(line.substr(1, line.size() - 2)));
            } catch (const ConfigError&) {
                throw ConfigError(where(source, line_no) + "unknown section '" + line + "' (sections are scheme names)");
            }
            continue;
        }
        for (const auto& tok : tokens(line)) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == tok.size())
                throw ConfigError(where(source, line_no) + "expected key=value, got '" + tok + "'");
            const std::string key = tok.substr(0, eq);
            const KeyDef* def = find_key(key);
            if (!def)
                throw ConfigError(where(source, line_no) + "unknown key '" + key + "'");
            if (section && !def->scheme_scoped)
                throw ConfigError(where(source, line_no) + "key '" + key + "' is not allowed inside a scheme section");
            assigns.push_back({key, tok.substr(eq + 1), line_no, section});
        }
    }

    ParseState st;
    int scheme_line = 0;
    for (const auto& a : assigns)
        if (!a.section) {
            apply(st, a.key, a.value, where(source, a.line));
            if (a.key == "scheme")
                scheme_line = a.line;
        }
    // The scheme has to be known before sections can be resolved.
    for (const auto& o : overrides)
        if (o.key == "scheme")
            apply(st, o.key, o.value, "--scheme: ");
    for (const auto& a : assigns)
        if (a.section && st.cfg.scheme && *a.section == *st.cfg.scheme)
            apply(st, a.key, a.value, where(source, a.line));
    for (const auto& o : overrides)
        apply(st, o.key, o.value, "--" + o.key + ": ");

    RunConfig cfg = st.cfg;
    const bool needs_scheme = cfg.mode == Mode::Simulate || cfg.mode == Mode::Analytic ||
                              cfg.mode == Mode::Efficiency || cfg.mode == Mode::ValidateWaveform;
    if (needs_scheme && !cfg.scheme)
        throw ConfigError(std::string(source) + ": mode '" + std::string(to_string(cfg.mode)) +
                          "' requires scheme=<itfh|qam-mppm|sppm|mppm|ppm>");
    if (cfg.mode == Mode::Figure && cfg.figure.empty())
        throw ConfigError(std::string(source) + ": figure mode requires figure=<name>");
    if (cfg.scheme) {
        cfg.params.scheme = *cfg.scheme;
        // Single-pulse schemes ignore w, so one file can serve every scheme.
        if (cfg.params.scheme == Scheme::SPPM || cfg.params.scheme == Scheme::PPM)
            cfg.params.w = 1;
        try {
            validate(cfg.params);
        } catch (const ConfigError& e) {
            throw ConfigError((scheme_line ? where(source, scheme_line) : std::string(source) + ": ") +
                              "invalid " + std::string(to_string(cfg.params.scheme)) + " parameters: " + e.what());
        }
    }
    try {
        cfg.grid.points();
        validate(cfg.rule);
        validate(cfg.env);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(source) + ": " + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path, const std::vector<Override>& overrides)
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_config(buf.str(), path, overrides);
}

std::string describe(const SchemeParams& p)
{
    std::ostringstream os;
    os << "N=" << p.N;
    switch (p.scheme) {
    case Scheme::ITFH: os << " w=" << p.w << " MF=" << p.M_F << " m=" << p.m; break;
    case Scheme::QAM_MPPM: os << " w=" << p.w << " MQ=" << p.M_Q << " m=" << p.m; break;
    case Scheme::SPPM: os << " MS=" << p.M_S << " Lm=" << p.L_m; break;
    case Scheme::MPPM: os << " w=" << p.w; break;
    case Scheme::PPM: break;
    }
    return os.str();
}

} // namespace itfh::cli
