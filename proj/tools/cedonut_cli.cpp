// SPDX-License-Identifier: Apache-2.0
// cedonut command-line driver. Every subcommand writes CSV to stdout or --out.
// Exit codes: 0 success, 2 invalid input, 3 numeric failure.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cedonut/cedonut.hpp"

using namespace cedonut;

namespace {

constexpr int exit_invalid = 2;
constexpr int exit_numeric = 3;

std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text, const std::string& what)
{
    const std::string s = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InvalidArgument("malformed " + what + " '" + text + "'");
    }
    require(used == s.size() && std::isfinite(v), "malformed " + what + " '" + text + "'");
    return v;
}

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

// "a,b,c" or "start:step:stop" (inclusive)
std::vector<double> parse_grid(const std::string& text, const std::string& what)
{
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        require(parts.size() == 3, what + " range must be start:step:stop");
        const double start = parse_double(parts[0], what), step = parse_double(parts[1], what),
                     stop = parse_double(parts[2], what);
        require(step > 0.0 && stop >= start, what + " range needs step > 0 and stop >= start");
        const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        require(count <= 100000, what + " range is too long");
        for (std::size_t i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
        return out;
    }
    for (const auto& item : split(text, ',')) out.push_back(parse_double(item, what));
    require(!out.empty(), what + " must not be empty");
    return out;
}

std::vector<std::size_t> parse_count_grid(const std::string& text, const std::string& what)
{
    std::vector<std::size_t> out;
    for (double v : parse_grid(text, what)) {
        require(v >= 1.0 && v == std::floor(v) && v <= 1e6, what + " values must be positive integers");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

complex parse_complex(const std::string& text)
{
    const auto parts = split(text, ',');
    require(parts.size() == 2, "complex value must be re,im, got '" + text + "'");
    return {parse_double(parts[0], "real part"), parse_double(parts[1], "imaginary part")};
}

ChannelVector read_channel_file(const std::string& path)
{
    std::ifstream in(path);
    require(in.good(), "cannot open channel file '" + path + "'");
    std::vector<complex> gains;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        try {
            gains.push_back(parse_complex(line));
        } catch (const InvalidArgument& err) {
            throw InvalidArgument(path + ":" + std::to_string(line_no) + ": " + err.what());
        }
    }
    require(!gains.empty(), "channel file '" + path + "' has no rows");
    return ChannelVector(std::move(gains));
}

std::vector<RateScheme> parse_schemes(const std::string& text)
{
    std::vector<RateScheme> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_rate_scheme(item));
    require(!out.empty(), "scheme list must not be empty");
    return out;
}

// Raw flag values. Grids stay strings until the subcommand runs, so every
// validation error surfaces through the same exit path.
struct Settings {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 1;
    std::size_t trials = 10000;
    std::string n_grid;
    std::string snr_grid = "0";
    std::string fading = "rayleigh";
    std::string schemes;
    double rate = 3.0;
    std::size_t lmax = 4;
    std::size_t alpha_grid = 32;
    std::size_t search_trials = 200;
    std::string alphas = "1";
    double snr_lo = -20.0;
    double snr_hi = 25.0;
    std::string c_values = "0.5,1";
    double panel_width = 1.0;

    std::string channel_path;
    std::string target;
    std::string solver = "auto";
};

void add_output(CLI::App* sub, Settings& s)
{
    sub->add_option("--config", s.config_path, "JSON file of flag values (keys are flag names without dashes)");
    sub->add_option("--out", s.out_path, "write CSV here instead of stdout");
}

void add_ensemble(CLI::App* sub, Settings& s, const std::string& default_n, std::size_t default_trials)
{
    s.n_grid = default_n;
    s.trials = default_trials;
    sub->add_option("--seed", s.seed, "master seed; fixes every random draw")->capture_default_str();
    sub->add_option("--trials", s.trials, "channel realizations per antenna count")->capture_default_str();
    sub->add_option("--n", s.n_grid, "antenna counts: list a,b,c or range start:step:stop")->capture_default_str();
    sub->add_option("--fading", s.fading, "fading model: rayleigh | bounded:<B> | dlos:<A> (B, A in linear amplitude)")
        ->capture_default_str();
}

void add_snr_grid(CLI::App* sub, Settings& s, const std::string& default_grid)
{
    s.snr_grid = default_grid;
    sub->add_option("--snr-db", s.snr_grid, "transmit SNR P_T/sigma^2 in dB: list or start:step:stop")
        ->capture_default_str();
}

void add_dauip_search(CLI::App* sub, Settings& s)
{
    sub->add_option("--lmax", s.lmax, "largest DAUIP ring count searched")->capture_default_str();
    sub->add_option("--alpha-grid", s.alpha_grid, "alpha grid points per ring, alpha in {1/G, ..., 1}")
        ->capture_default_str();
    sub->add_option("--search-trials", s.search_trials, "channels used for the DAUIP alphabet search")
        ->capture_default_str();
    sub->add_option("--panel-width", s.panel_width, "MI radial quadrature panel width (noise std units)")
        ->capture_default_str();
}

void add_min_snr(CLI::App* sub, Settings& s)
{
    sub->add_option("--rate", s.rate, "target ergodic rate in bits per channel use")->capture_default_str();
    sub->add_option("--scheme", s.schemes,
                    "comma list of mrt|atpc|papc|epi-lower|i2|unif-epi|unif|dauip|best-dauip")
        ->capture_default_str();
    sub->add_option("--snr-lo", s.snr_lo, "lower end of the SNR search bracket in dB")->capture_default_str();
    sub->add_option("--snr-hi", s.snr_hi, "upper end of the SNR search bracket in dB")->capture_default_str();
    sub->add_option("--alphas", s.alphas, "fixed alphabet for scheme dauip: increasing alphas in (0, 1]")
        ->capture_default_str();
    add_dauip_search(sub, s);
}

void build_app(CLI::App& app, Settings& s)
{
    app.require_subcommand(1, 1);
    // precode uses --h for the channel file, so help is long-form only
    app.set_help_flag("--help", "print this help and exit");
    app.set_version_flag("--version", version_tag);

    auto* precode = app.add_subcommand("precode", "solve CE phases (radians, [-pi, pi)) so that sum h_i e^{j theta_i} / sqrt(N) = u");
    precode->add_option("--h", s.channel_path, "channel CSV file, one 're,im' row per antenna")->required();
    precode->add_option("--u", s.target, "target symbol 're,im' per unit sqrt(P_T)")->required();
    precode->add_option("--solver", s.solver, "auto | closed-form | dfs | coord-descent | homotopy")
        ->capture_default_str();
    add_output(precode, s);

    auto* mh = app.add_subcommand("mh-ratio", "mean m(h)/M(h) and the l_inf/l_1 bound per N");
    add_ensemble(mh, s, "2:2:16", 10000);
    add_output(mh, s);

    auto* bounds = app.add_subcommand("bounds", "mean EPI lower bound, I2 upper bound, PAPC and ATPC rates (bpcu)");
    add_ensemble(bounds, s, "4", 10000);
    add_snr_grid(bounds, s, "-10:5:30");
    add_output(bounds, s);

    auto* dauip = app.add_subcommand("dauip-opt", "best DAUIP alphabet per SNR, by mean MI over the channels");
    add_ensemble(dauip, s, "4", 200);
    add_snr_grid(dauip, s, "0:5:30");
    add_dauip_search(dauip, s);
    add_output(dauip, s);

    auto* curve = app.add_subcommand("rate-curve", "ergodic rate (bpcu) per N, SNR and scheme");
    add_ensemble(curve, s, "4", 2000);
    add_snr_grid(curve, s, "-10:5:30");
    curve->add_option("--scheme", s.schemes, "comma list of mrt|atpc|papc|epi-lower|i2|unif-epi|unif|dauip|best-dauip")
        ->capture_default_str();
    curve->add_option("--alphas", s.alphas, "fixed alphabet for scheme dauip: increasing alphas in (0, 1]")
        ->capture_default_str();
    add_dauip_search(curve, s);
    add_output(curve, s);

    auto* min_snr = app.add_subcommand("min-snr", "minimum SNR (dB) reaching a target ergodic rate");
    add_ensemble(min_snr, s, "1,2,4,16,64", 10000);
    add_min_snr(min_snr, s);
    add_output(min_snr, s);

    auto* apg = app.add_subcommand("apg", "array power gain: min-SNR relative to the smallest N (dB)");
    add_ensemble(apg, s, "16,32,64", 10000);
    add_min_snr(apg, s);
    add_output(apg, s);

    auto* outage = app.add_subcommand("outage", "outage probability bounds at a fixed rate, i.i.d. Rayleigh");
    add_ensemble(outage, s, "2,4", 100000);
    add_snr_grid(outage, s, "0:5:40");
    outage->add_option("--rate", s.rate, "rate R in bits per channel use")->capture_default_str();
    add_output(outage, s);

    auto* tail = app.add_subcommand("mh-tail", "empirical Prob(m(h) >= c ln(N)/sqrt(N)), i.i.d. Rayleigh");
    add_ensemble(tail, s, "4,8,16,32,64,128", 1000);
    tail->add_option("--c", s.c_values, "comma list of positive constants c (dimensionless)")->capture_default_str();
    add_output(tail, s);
}

// Per-subcommand defaults that depend on the subcommand, applied only when the
// flag was not given.
void apply_defaults(const CLI::App& sub, Settings& s)
{
    const std::string name = sub.get_name();
    // Settings is shared by all subcommands; restore this one's captured defaults
    auto unset = [&](const char* flag) {
        const CLI::Option* opt = sub.get_option_no_throw(flag);
        return opt != nullptr && opt->count() == 0 ? opt : nullptr;
    };
    if (const auto* opt = unset("--n")) s.n_grid = opt->get_default_str();
    if (const auto* opt = unset("--snr-db")) s.snr_grid = opt->get_default_str();
    if (const auto* opt = unset("--trials")) s.trials = std::stoull(opt->get_default_str());
    if (sub.get_option_no_throw("--scheme") != nullptr && sub.get_option("--scheme")->count() == 0 && s.schemes.empty())
        s.schemes = name == "rate-curve" ? "mrt,papc,unif-epi,dauip" : default_scheme_list();
    if (name == "outage" && sub.get_option("--rate")->count() == 0) s.rate = 2.0;
}

std::vector<std::string> config_arguments(const CLI::App& sub, const std::string& path)
{
    std::ifstream in(path);
    require(in.good(), "cannot open config file '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& err) {
        throw InvalidArgument("config file '" + path + "': " + err.what());
    }
    require(doc.is_object(), "config file '" + path + "' must hold a flat JSON object");

    std::vector<std::string> args;
    for (const auto& [key, value] : doc.items()) {
        const std::string flag = "--" + key;
        const CLI::Option* opt = sub.get_option_no_throw(flag);
        require(opt != nullptr && key != "config", "unknown config key '" + key + "' for " + sub.get_name());
        if (opt->count() > 0) continue;  // the command line wins
        std::string text;
        if (value.is_string()) {
            text = value.get<std::string>();
        } else if (value.is_number()) {
            text = value.dump();
        } else if (value.is_array()) {
            for (std::size_t i = 0; i < value.size(); ++i) {
                require(value[i].is_number() || value[i].is_string(), "config key '" + key + "' has a nested value");
                text += (i ? "," : "") + (value[i].is_string() ? value[i].get<std::string>() : value[i].dump());
            }
        } else {
            throw InvalidArgument("config key '" + key + "' must be a string, number or array");
        }
        args.push_back(flag + "=" + text);
    }
    return args;
}

ExperimentConfig experiment_config(const Settings& s, bool with_snr)
{
    ExperimentConfig c;
    c.master_seed = s.seed;
    c.trials = s.trials;
    c.n_grid = parse_count_grid(s.n_grid, "antenna grid");
    if (with_snr) c.snr_grid_db = parse_grid(s.snr_grid, "SNR grid");
    const auto model = parse_fading(s.fading, 1);
    c.fading = model.kind;
    c.fading_parameter = model.parameter;
    c.target_rate = s.rate;
    c.validate();
    return c;
}

RateOptions rate_options(const Settings& s)
{
    require(s.lmax >= 1 && s.alpha_grid >= 1 && s.search_trials >= 1, "--lmax, --alpha-grid and --search-trials must be >= 1");
    require(s.panel_width > 0.0, "--panel-width must be positive");
    RateOptions r;
    r.alphabet = DauipAlphabet(parse_grid(s.alphas, "alphas"));
    r.search.max_rings = s.lmax;
    r.search.alpha_grid = s.alpha_grid;
    r.search.mi.panel_width = s.panel_width;
    r.mi.panel_width = s.panel_width;
    r.search_trials = s.search_trials;
    return r;
}

MinSnrOptions min_snr_options(const Settings& s)
{
    require(s.snr_lo < s.snr_hi, "--snr-lo must be below --snr-hi");
    MinSnrOptions o;
    o.bracket_lo_db = s.snr_lo;
    o.bracket_hi_db = s.snr_hi;
    o.rate = rate_options(s);
    return o;
}

std::optional<SolverKind> parse_solver(const std::string& name)
{
    if (name == "auto") return std::nullopt;
    if (name == "closed-form") return SolverKind::ClosedFormN2;
    if (name == "dfs") return SolverKind::DfsTwoStep;
    if (name == "coord-descent") return SolverKind::CoordDescent;
    if (name == "homotopy") return SolverKind::Homotopy;
    throw InvalidArgument("unknown solver '" + name + "' (expected auto|closed-form|dfs|coord-descent|homotopy)");
}

Table run_precode(const Settings& s, bool& accepted)
{
    const auto h = read_channel_file(s.channel_path);
    const complex u = parse_complex(s.target);
    const auto kind = parse_solver(s.solver);
    PhaseSolution sol;
    if (!kind) {
        sol = dispatch_solve(h, u);
    } else if (*kind == SolverKind::ClosedFormN2) {
        require(h.size() == 2 || h.size() == 3, "closed-form solver needs N = 2 or 3");
        sol = h.size() == 2 ? solve_closed_form_n2(h, u) : solve_closed_form_n3(h, u);
    } else if (*kind == SolverKind::DfsTwoStep) {
        sol = solve_dfs_two_step(h, u);
    } else if (*kind == SolverKind::CoordDescent) {
        sol = solve_coord_descent(h, u);
    } else {
        sol = solve_homotopy(h, u);
    }
    accepted = sol.accepted;

    const auto region = make_region(h);
    Table t;
    t.experiment = "precode";
    t.note("channel_file", s.channel_path);
    t.note("n", std::to_string(h.size()));
    t.note("u", format_number(u.real()) + "," + format_number(u.imag()));
    t.note("inner_radius", format_number(region.inner));
    t.note("outer_radius", format_number(region.outer));
    t.note("solver", to_string(sol.solver));
    t.note("status", to_string(sol.status));
    t.note("iterations", std::to_string(sol.iterations));
    t.note("residual", format_number(sol.residual));
    t.note("accepted", sol.accepted ? "true" : "false");
    t.note("units", "phase_rad in [-pi, pi)");
    t.columns = {"antenna", "phase_rad"};
    for (std::size_t i = 0; i < sol.phases.size(); ++i) t.add_row({static_cast<std::int64_t>(i + 1), sol.phases[i]});
    return t;
}

Table run_dauip_opt(const Settings& s)
{
    const auto config = experiment_config(s, true);
    const auto opts = rate_options(s);
    Table t;
    t.experiment = "dauip-opt";
    t.master_seed = config.master_seed;
    t.note("trials", std::to_string(config.trials));
    t.note("fading", to_string(config.model(1)));
    t.note("lmax", std::to_string(opts.search.max_rings));
    t.note("alpha_grid", std::to_string(opts.search.alpha_grid));
    t.note("units", "snr_db = 10 log10(P_T / sigma^2); MI in bits per channel use");
    t.columns = {"n", "snr_db", "rings", "alphas", "mean_mi", "stderr"};
    for (auto n : config.n_grid) {
        const auto ens = make_ensemble(config.model(n), config.master_seed, config.trials);
        for (double db : config.snr_grid_db) {
            const auto choice = optimize_dauip(ens.regions, SnrPoint::from_db(db), opts.search);
            t.add_row({static_cast<std::int64_t>(n), db, static_cast<std::int64_t>(choice.alphabet.ring_count()),
                       describe_alphabet(choice.alphabet), choice.mean_mi.mean, choice.mean_mi.stderr_mean});
        }
    }
    return t;
}

std::vector<double> parse_c_values(const std::string& text)
{
    auto c = parse_grid(text, "c values");
    for (double v : c) require(v > 0.0, "c values must be positive");
    return c;
}

int run(const CLI::App& sub, const Settings& s)
{
    const std::string name = sub.get_name();
    Table table;
    int code = 0;
    if (name == "precode") {
        bool accepted = false;
        table = run_precode(s, accepted);
        if (!accepted) code = exit_numeric;
    } else if (name == "mh-ratio") {
        table = mh_ratio_curve(experiment_config(s, false));
    } else if (name == "bounds") {
        table = bounds_curve(experiment_config(s, true));
    } else if (name == "dauip-opt") {
        table = run_dauip_opt(s);
    } else if (name == "rate-curve") {
        table = ergodic_rate_curves(experiment_config(s, true), parse_schemes(s.schemes), rate_options(s));
    } else if (name == "min-snr") {
        table = min_snr_table(experiment_config(s, false), parse_schemes(s.schemes), min_snr_options(s));
    } else if (name == "apg") {
        table = array_power_gain(experiment_config(s, false), parse_schemes(s.schemes), min_snr_options(s));
    } else if (name == "outage") {
        table = outage_bounds(experiment_config(s, true));
    } else if (name == "mh-tail") {
        table = mh_tail_check(experiment_config(s, false), parse_c_values(s.c_values));
    }

    if (s.out_path.empty()) {
        write_csv(std::cout, table);
        std::cout.flush();
    } else {
        std::ofstream out(s.out_path);
        require(out.good(), "cannot write '" + s.out_path + "'");
        write_csv(out, table);
        require(out.good(), "write to '" + s.out_path + "' failed");
    }
    if (code == exit_numeric) std::cerr << "cedonut: precode: solution not accepted (residual above tolerance)\n";
    return code;
}

const CLI::App* chosen(const CLI::App& app)
{
    const auto subs = app.get_subcommands();
    return subs.empty() ? nullptr : subs.front();
}

} // namespace

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        Settings first;
        CLI::App probe("constant-envelope MISO precoding and capacity experiments", "cedonut");
        build_app(probe, first);
        try {
            probe.parse(argc, argv);
        } catch (const CLI::ParseError& err) {
            const int code = probe.exit(err);
            return code == 0 ? 0 : exit_invalid;
        }

        // second pass: command line plus config keys the command line did not set
        const CLI::App* sub = chosen(probe);
        if (!first.config_path.empty()) {
            for (auto& extra : config_arguments(*sub, first.config_path)) args.push_back(extra);
        }
        Settings settings;
        CLI::App app("constant-envelope MISO precoding and capacity experiments", "cedonut");
        build_app(app, settings);
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::ParseError& err) {
            const int code = app.exit(err);
            return code == 0 ? 0 : exit_invalid;
        }
        sub = chosen(app);
        apply_defaults(*sub, settings);
        return run(*sub, settings);
    } catch (const InvalidArgument& err) {
        std::cerr << "cedonut: error: " << err.what() << '\n';
        return exit_invalid;
    } catch (const NumericFailure& err) {
        std::cerr << "cedonut: numeric failure: " << err.what() << '\n';
        return exit_numeric;
    } catch (const std::exception& err) {
        std::cerr << "cedonut: error: " << err.what() << '\n';
        return exit_numeric;
    }
}
