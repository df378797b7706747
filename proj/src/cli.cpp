#include "brightdark/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "brightdark/enbs.hpp"
#include "brightdark/scan.hpp"
#include "brightdark/unified.hpp"

namespace brightdark::cli {

std::string to_string(Subcommand s)
{
    switch (s) {
    case Subcommand::scan:
        return "scan";
    case Subcommand::three_scan:
        return "three-scan";
    case Subcommand::bloch:
        return "bloch";
    case Subcommand::oracle:
        return "oracle";
    case Subcommand::dirichlet:
        return "dirichlet";
    case Subcommand::slit:
        return "slit";
    case Subcommand::g2:
        return "g2";
    case Subcommand::spectrum:
        return "spectrum";
    case Subcommand::budget:
        return "budget";
    }
    return "scan";
}

double parse_quantity(std::string_view text, Dimension dim)
{
    double value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || !std::isfinite(value))
        throw DomainError("cannot parse quantity '" + std::string(text) + "'");
    const std::string_view unit(res.ptr, static_cast<std::size_t>(last - res.ptr));
    if (unit.empty())
        return value;

    struct Suffix {
        std::string_view name;
        double scale;
    };
    static constexpr Suffix time[] = {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}, {"fs", 1e-15}};
    static constexpr Suffix freq[] = {{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}, {"THz", 1e12}};
    static constexpr Suffix length[] = {{"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}, {"pm", 1e-12}};

    std::span<const Suffix> table;
    switch (dim) {
    case Dimension::time:
        table = time;
        break;
    case Dimension::frequency:
        table = freq;
        break;
    case Dimension::length:
        table = length;
        break;
    }
    for (const auto& s : table)
        if (s.name == unit)
            return value * s.scale;
    throw DomainError("unknown unit '" + std::string(unit) + "' in '" + std::string(text) + "'");
}

namespace {

enum class Kind { real, integer, time, frequency, length, target, flag };

struct OptionDef {
    std::string name;
    Kind kind;
    std::string default_value; // empty: no default
    std::string help;
};

constexpr const char* kTwoPiText = "6.283185307179586";

double to_real(const std::string& s)
{
    double v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
        throw DomainError("expected a real number, got '" + s + "'");
    return v;
}

long long to_integer(const std::string& s)
{
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw DomainError("expected an integer, got '" + s + "'");
    return v;
}

std::string check_value(Kind kind, const std::string& s)
{
    try {
        switch (kind) {
        case Kind::real:
            to_real(s);
            break;
        case Kind::integer:
            to_integer(s);
            break;
        case Kind::time:
            parse_quantity(s, Dimension::time);
            break;
        case Kind::frequency:
            parse_quantity(s, Dimension::frequency);
            break;
        case Kind::length:
            parse_quantity(s, Dimension::length);
            break;
        case Kind::target:
            parse_scan_target(s);
            break;
        case Kind::flag:
            break;
        }
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

std::vector<OptionDef> enbs_options(const std::string& alpha_default)
{
    return {
        {"alpha", Kind::real, alpha_default, "seed amplitude |alpha| for both sources"},
        {"alpha1", Kind::real, "", "seed amplitude of source 1 (excludes --alpha)"},
        {"alpha2", Kind::real, "", "seed amplitude of source 2 (excludes --alpha)"},
        {"r", Kind::real, "0.01", "weak-gain parameter of both sources, in (0, 0.2]"},
        {"phi-p1", Kind::real, "0", "pump input phase of source 1 (rad)"},
        {"phi-p2", Kind::real, "0", "pump input phase of source 2 (rad)"},
        {"phi-sd1", Kind::real, "0", "seed input phase of source 1 (rad)"},
        {"phi-sd2", Kind::real, "0", "seed input phase of source 2 (rad)"},
    };
}

std::vector<OptionDef> scan_options()
{
    auto defs = enbs_options("10");
    std::vector<OptionDef> more = {
        {"target", Kind::target, "signal", "scanned phase: pump, seed or signal"},
        {"phi-s0", Kind::real, "0", "fixed signal phase (rad)"},
        {"start", Kind::real, "0", "scan start (rad)"},
        {"stop", Kind::real, kTwoPiText, "scan stop (rad)"},
        {"steps", Kind::integer, "100", "number of scan points (>= 8)"},
        {"noise", Kind::flag, "", "emulate Poisson shot noise (requires --seed)"},
        {"frames-mean-counts", Kind::real, "30000", "mean counts per frame over a period"},
        {"background", Kind::real, "0", "additive mean background counts per point"},
        {"n-bar", Kind::real, "", "high-flux mean photon number; adds expected_counts"},
    };
    defs.insert(defs.end(), more.begin(), more.end());
    return defs;
}

std::vector<OptionDef> slit_options()
{
    return {
        {"width", Kind::length, "10um", "slit width b"},
        {"wavelength", Kind::length, "807nm", "wavelength (sets k = 2 pi / lambda)"},
        {"segments", Kind::integer, "1024", "number of slit segments K (>= 16)"},
        {"points", Kind::integer, "721", "number of detector angles"},
        {"theta-max", Kind::real, "0.25", "angles span [-theta-max, theta-max] (rad)"},
    };
}

std::vector<OptionDef> options_for(Subcommand s)
{
    switch (s) {
    case Subcommand::scan:
        return scan_options();
    case Subcommand::bloch: {
        auto defs = scan_options();
        defs.push_back({"radius", Kind::real, "1", "ring radius"});
        return defs;
    }
    case Subcommand::three_scan: {
        auto defs = enbs_options("10");
        defs.push_back({"steps", Kind::integer, "100", "points per scan (>= 8)"});
        return defs;
    }
    case Subcommand::oracle:
        return enbs_options("1");
    case Subcommand::dirichlet:
        return {
            {"M", Kind::integer, "4", "number of sources (>= 2)"},
            {"points", Kind::integer, "721", "grid points"},
            {"min", Kind::real, "-6.283185307179586", "grid start (rad)"},
            {"max", Kind::real, kTwoPiText, "grid stop (rad)"},
        };
    case Subcommand::slit:
        return slit_options();
    case Subcommand::g2: {
        auto defs = slit_options();
        defs.push_back({"photons", Kind::integer, "2", "Fock photon number N in the slit supermode"});
        defs.push_back({"alpha", Kind::real, "", "coherent amplitude instead of a Fock state (excludes --photons)"});
        return defs;
    }
    case Subcommand::spectrum:
        return {
            {"f-rep", Kind::frequency, "250MHz", "repetition rate"},
            {"pulses", Kind::integer, "64", "number of pulses (>= 16)"},
            {"spp", Kind::integer, "32", "samples per period (>= 8)"},
            {"pulse-width", Kind::time, "100ps", "Gaussian pulse half width"},
            {"phase-noise", Kind::real, "0", "rms per-pulse carrier phase (rad); > 0 requires --seed"},
            {"amplitude", Kind::real, "1", "pulse amplitude"},
        };
    case Subcommand::budget:
        return {
            {"occupancy", Kind::real, "0.01", "mean photons per time bin"},
            {"t-int", Kind::time, "10ms", "integration time"},
            {"f-rep", Kind::frequency, "250MHz", "repetition rate"},
        };
    }
    return {};
}

const char* description(Subcommand s)
{
    switch (s) {
    case Subcommand::scan:
        return "Phase scan of one control (pump, seed or signal) with optional shot noise";
    case Subcommand::three_scan:
        return "Fit pump, seed and signal scans and compare their visibilities";
    case Subcommand::bloch:
        return "Map a fitted scan onto the Bloch equator";
    case Subcommand::oracle:
        return "Analytic versus Fock-space partial-trace visibility";
    case Subcommand::dirichlet:
        return "M-source Dirichlet bright-port profile";
    case Subcommand::slit:
        return "Discretized single-slit bright-mode occupation";
    case Subcommand::g2:
        return "Second-order correlation across detector angles";
    case Subcommand::spectrum:
        return "RF power spectrum of a synthesized pulse train";
    case Subcommand::budget:
        return "Photon budget: time bins and expected counts per frame";
    }
    return "";
}

constexpr Subcommand kAll[] = {Subcommand::scan,      Subcommand::three_scan, Subcommand::bloch,
                               Subcommand::oracle,    Subcommand::dirichlet,  Subcommand::slit,
                               Subcommand::g2,        Subcommand::spectrum,   Subcommand::budget};

struct SubcommandSlots {
    Subcommand which;
    CLI::App* app = nullptr;
    std::vector<OptionDef> defs;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    bool flag_set = false;
    std::string output;
    std::string format = "csv";
    std::string seed;
    CLI::Option* seed_opt = nullptr;
};

} // namespace

ParseResult parse_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Bright/dark collective-mode interference simulator", "brightdark"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", std::string(BRIGHTDARK_VERSION));

    std::vector<std::unique_ptr<SubcommandSlots>> slots;
    for (Subcommand s : kAll) {
        auto slot = std::make_unique<SubcommandSlots>();
        slot->which = s;
        slot->defs = options_for(s);
        slot->app = app.add_subcommand(to_string(s), description(s));
        for (const auto& def : slot->defs) {
            const std::string flag = "--" + def.name;
            if (def.kind == Kind::flag) {
                slot->options[def.name] = slot->app->add_flag(flag, slot->flag_set, def.help);
                continue;
            }
            auto& storage = slot->values[def.name];
            storage = def.default_value;
            auto* opt = slot->app->add_option(flag, storage, def.help);
            if (!def.default_value.empty())
                opt->capture_default_str();
            const Kind kind = def.kind;
            opt->check(CLI::Validator([kind](std::string& v) { return check_value(kind, v); }, "", ""));
            slot->options[def.name] = opt;
        }
        slot->app->add_option("-o,--output", slot->output, "output path (default: standard output)");
        slot->app->add_option("--format", slot->format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
        slot->seed_opt = slot->app->add_option("--seed", slot->seed, "RNG seed (unsigned 64-bit)")
                             ->check(CLI::Validator(
                                 [](std::string& v) -> std::string {
                                     std::uint64_t x = 0;
                                     const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
                                     return (r.ec == std::errc() && r.ptr == v.data() + v.size()) ? "" : "seed must be an unsigned integer";
                                 },
                                 "", ""));

        auto& o = slot->options;
        if (o.count("alpha") && o.count("alpha1")) {
            o["alpha"]->excludes(o["alpha1"]);
            o["alpha"]->excludes(o["alpha2"]);
        }
        if (o.count("photons") && o.count("alpha"))
            o["photons"]->excludes(o["alpha"]);
        if (o.count("noise"))
            o["noise"]->needs(slot->seed_opt);
        slots.push_back(std::move(slot));
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return {std::nullopt, code == 0 ? kExitOk : kExitUsage};
    }

    for (auto& slot : slots) {
        if (!slot->app->parsed())
            continue;
        CliConfig cfg;
        cfg.subcommand = slot->which;
        cfg.output = slot->output;
        cfg.format = parse_format(slot->format);
        if (!slot->seed.empty()) {
            std::uint64_t x = 0;
            std::from_chars(slot->seed.data(), slot->seed.data() + slot->seed.size(), x);
            cfg.seed = x;
        }
        for (const auto& def : slot->defs) {
            if (def.kind == Kind::flag) {
                if (slot->flag_set)
                    cfg.params[def.name] = "true";
                continue;
            }
            const std::string& v = slot->values[def.name];
            if (!v.empty())
                cfg.params[def.name] = v;
        }
        // Explicit alpha1/alpha2 replace the shared default.
        if (cfg.has("alpha") && slot->options.count("alpha1") &&
            (slot->options["alpha1"]->count() > 0 || slot->options["alpha2"]->count() > 0))
            cfg.params.erase("alpha");
        if (cfg.subcommand == Subcommand::g2 && slot->options["alpha"]->count() > 0)
            cfg.params.erase("photons");
        if (cfg.subcommand == Subcommand::spectrum && to_real(cfg.params["phase-noise"]) > 0.0 && !cfg.seed) {
            err << "--phase-noise > 0 requires --seed\n";
            return {std::nullopt, kExitUsage};
        }
        return {std::move(cfg), kExitOk};
    }
    return {std::nullopt, kExitUsage};
}

namespace {

double real_param(const CliConfig& c, const std::string& key) { return to_real(c.params.at(key)); }

int int_param(const CliConfig& c, const std::string& key)
{
    const long long v = to_integer(c.params.at(key));
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw DomainError("--" + key + " out of range");
    return static_cast<int>(v);
}

double quantity_param(const CliConfig& c, const std::string& key, Dimension d)
{
    return parse_quantity(c.params.at(key), d);
}

EnbsConfig enbs_from(const CliConfig& c)
{
    EnbsConfig cfg;
    const double shared = c.has("alpha") ? real_param(c, "alpha") : 0.0;
    cfg.alpha1 = c.has("alpha1") ? real_param(c, "alpha1") : shared;
    cfg.alpha2 = c.has("alpha2") ? real_param(c, "alpha2") : shared;
    cfg.r1 = cfg.r2 = real_param(c, "r");
    cfg.phi_p1 = real_param(c, "phi-p1");
    cfg.phi_p2 = real_param(c, "phi-p2");
    cfg.phi_sd1 = real_param(c, "phi-sd1");
    cfg.phi_sd2 = real_param(c, "phi-sd2");
    return cfg;
}

ScanSpec scan_from(const CliConfig& c)
{
    ScanSpec spec;
    spec.target = parse_scan_target(c.params.at("target"));
    spec.start = real_param(c, "start");
    spec.stop = real_param(c, "stop");
    spec.steps = int_param(c, "steps");
    spec.base = enbs_from(c);
    spec.phi_s0 = real_param(c, "phi-s0");
    if (c.has("noise")) {
        NoiseSpec noise;
        noise.frames_mean_counts = real_param(c, "frames-mean-counts");
        noise.background = real_param(c, "background");
        noise.rng_seed = c.seed.value_or(0);
        spec.noise = noise;
    }
    return spec;
}

SlitSpec slit_from(const CliConfig& c)
{
    SlitSpec spec;
    spec.width = quantity_param(c, "width", Dimension::length);
    spec.wavenumber = kTwoPi / quantity_param(c, "wavelength", Dimension::length);
    spec.segments = int_param(c, "segments");
    const double tmax = real_param(c, "theta-max");
    spec.angles = linspace(-tmax, tmax, int_param(c, "points"));
    return spec;
}

Json base_meta(const CliConfig& c)
{
    Json meta;
    meta["version"] = BRIGHTDARK_VERSION;
    meta["subcommand"] = to_string(c.subcommand);
    meta["params"] = c.params;
    meta["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
    return meta;
}

Table run_subcommand(const CliConfig& c, Json& meta)
{
    switch (c.subcommand) {
    case Subcommand::scan: {
        const ScanSpec spec = scan_from(c);
        meta["spec"] = to_json(spec);
        FringeDataset data = run_scan(spec);
        if (c.has("n-bar")) {
            data = high_flux(data, real_param(c, "n-bar"));
            meta["n_bar"] = *data.n_bar;
        }
        return to_table(data);
    }
    case Subcommand::bloch: {
        const ScanSpec spec = scan_from(c);
        meta["spec"] = to_json(spec);
        const FringeDataset data = run_scan(spec);
        const FitResult fit = fit_fringe(data);
        meta["fit"] = {{"visibility", fit.visibility}, {"delta", fit.delta}, {"offset", fit.offset}};
        const auto pts = bloch_map(data, fit, real_param(c, "radius"));
        Table t;
        t.columns = {"phase_rad", "x", "y"};
        for (std::size_t i = 0; i < pts.size(); ++i)
            t.rows.push_back({data.points[i].phase, pts[i].x, pts[i].y});
        return t;
    }
    case Subcommand::three_scan: {
        const EnbsConfig base = enbs_from(c);
        meta["base"] = to_json(base);
        const ThreeScanReport report = three_scan_equivalence(base, int_param(c, "steps"));
        meta["summary"] = {{"max_visibility_spread", report.max_visibility_spread},
                           {"max_rms_residual", report.max_rms_residual},
                           {"pump_seed_opposite", report.pump_seed_opposite},
                           {"equivalent", report.equivalent},
                           {"analytic_visibility", visibility(base)}};
        Table t;
        t.columns = {"target", "visibility", "delta_rad", "offset", "rms_residual"};
        for (const auto& s : report.scans)
            t.rows.push_back({to_string(s.target), s.fit.visibility, s.fit.delta, s.fit.offset, s.fit.rms_residual});
        return t;
    }
    case Subcommand::oracle: {
        const EnbsConfig cfg = enbs_from(c);
        meta["base"] = to_json(cfg);
        const double analytic = visibility(cfg);
        const SignalDensity oracle = oracle_reduced_density(cfg);
        const double oracle_v = fringe_visibility(oracle);
        Table t;
        t.columns = {"alpha1", "alpha2", "analytic_v", "oracle_v", "abs_diff", "idler_overlap", "oracle_phase_rad",
                     "expected_phase_rad"};
        t.rows.push_back({std::abs(cfg.alpha1), std::abs(cfg.alpha2), analytic, oracle_v, std::abs(analytic - oracle_v),
                          idler_overlap(cfg.alpha1, cfg.alpha2), std::arg(oracle.coherence),
                          wrap_phase(-prepared_phase(cfg))});
        return t;
    }
    case Subcommand::dirichlet: {
        DirichletSpec spec;
        spec.sources = int_param(c, "M");
        spec.deltas = linspace(real_param(c, "min"), real_param(c, "max"), int_param(c, "points"));
        return to_table(dirichlet_profile(spec), "delta_rad", "p_bright");
    }
    case Subcommand::slit:
        return to_table(slit_bright_occupation(slit_from(c)), "theta_rad", "p0");
    case Subcommand::g2: {
        SupermodeInput input = FockInput{c.has("photons") ? int_param(c, "photons") : 2};
        if (c.has("alpha"))
            input = CoherentInput{cdouble(real_param(c, "alpha"), 0.0)};
        return to_table(g2_profile(input, slit_from(c)), "theta_rad", "g2");
    }
    case Subcommand::spectrum: {
        CombSpec spec;
        spec.f_rep = quantity_param(c, "f-rep", Dimension::frequency);
        spec.n_pulses = int_param(c, "pulses");
        spec.samples_per_period = int_param(c, "spp");
        spec.pulse_width = quantity_param(c, "pulse-width", Dimension::time);
        spec.carrier_phase_noise_rms = real_param(c, "phase-noise");
        spec.amplitude = real_param(c, "amplitude");
        spec.rng_seed = c.seed.value_or(0);
        return to_table(comb_spectrum(spec));
    }
    case Subcommand::budget: {
        const PhotonBudget b = photon_budget(real_param(c, "occupancy"), quantity_param(c, "t-int", Dimension::time),
                                             quantity_param(c, "f-rep", Dimension::frequency));
        Table t;
        t.columns = {"bins", "expected_counts"};
        t.rows.push_back({static_cast<std::int64_t>(b.bins), b.expected_counts});
        return t;
    }
    }
    throw DomainError("unhandled subcommand");
}

} // namespace

int dispatch(const CliConfig& config, std::ostream& out, std::ostream& err)
{
    try {
        Json meta = base_meta(config);
        const Table table = run_subcommand(config, meta);
        if (config.output.empty()) {
            emit(table, config.format, meta, out);
            return kExitOk;
        }
        std::ofstream file(config.output, std::ios::binary | std::ios::trunc);
        if (!file) {
            err << "cannot open output file '" << config.output << "'\n";
            return kExitFailure;
        }
        emit(table, config.format, meta, file);
        return file ? kExitOk : kExitFailure;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    const ParseResult parsed = parse_args(args, out, err);
    if (!parsed.config)
        return parsed.exit_code;
    return dispatch(*parsed.config, out, err);
}

} // namespace brightdark::cli
