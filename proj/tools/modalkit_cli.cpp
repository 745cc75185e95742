// Command-line frontend: simulate scenarios, run DMD/DMDc analyses, emit
// JSON stability reports and CSV reconstruction data, and run the
// normalization comparison study.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "modalkit/dmd.hpp"
#include "modalkit/dmdc.hpp"
#include "modalkit/errors.hpp"
#include "modalkit/simulator.hpp"
#include "modalkit/snapshots.hpp"
#include "modalkit/stability.hpp"

using json = nlohmann::ordered_json;
using namespace modalkit;

namespace {

constexpr const char* kModule = "cli";

std::uint64_t default_seed() {
    if (const char* env = std::getenv("MODALKIT_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0') return v;
        throw ConfigError(kModule, "MODALKIT_SEED is not an integer");
    }
    return 42;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) parts.push_back(part);
    return parts;
}

double parse_double(const std::string& s, const std::string& flag) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw ConfigError(kModule, flag + ": expected a number, got '" + s + "'");
    return v;
}

RankPolicy parse_rank_policy(const std::string& s, const std::string& flag) {
    const auto parts = split(s, ':');
    if (parts.size() == 2 && parts[0] == "fixed") {
        const double r = parse_double(parts[1], flag);
        if (r < 1 || r != std::floor(r))
            throw ConfigError(kModule, flag + ": fixed rank must be a positive integer");
        return RankPolicy::fixed(static_cast<int>(r));
    }
    if (parts.size() == 2 && parts[0] == "energy")
        return RankPolicy::energy(parse_double(parts[1], flag));
    throw ConfigError(kModule, flag + ": expected fixed:<r> or energy:<threshold>");
}

PlantedMode parse_planted_mode(const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.size() < 3 || parts.size() > 4)
        throw ConfigError(kModule, "--plant: expected freq:sigma:amp[:phase], got '" + s + "'");
    PlantedMode mode;
    mode.frequency_hz = parse_double(parts[0], "--plant");
    mode.sigma = parse_double(parts[1], "--plant");
    mode.amplitude = parse_double(parts[2], "--plant");
    if (parts.size() == 4) mode.phase = parse_double(parts[3], "--plant");
    return mode;
}

DutyPolicy parse_duty(const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.size() == 2 && parts[0] == "const") {
        const double d = parse_double(parts[1], "--duty");
        if (std::abs(d) > 1.0) throw ConfigError(kModule, "--duty: constant must lie in [-1, 1]");
        return ConstantDuty{d};
    }
    if (parts.size() == 4 && parts[0] == "sine") {
        SineModulatedDuty duty{parse_double(parts[1], "--duty"), parse_double(parts[2], "--duty"),
                               parse_double(parts[3], "--duty")};
        if (std::abs(duty.mean) + std::abs(duty.amplitude) > 1.0)
            throw ConfigError(kModule, "--duty: |mean| + |amplitude| must be <= 1");
        return duty;
    }
    throw ConfigError(kModule, "--duty: expected const:<d> or sine:<mean>:<amp>:<freq>");
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOptions {
    std::string out;
    std::string preset;
    std::vector<std::string> plant_specs;
    int channels = 3;
    int n = 0;
    double dt = 4e-4;
    double duration = 0.0;
    std::string duty = "const:0.8";
    double rn = 0.1, ln = 4e-3, cd = 800e-6, rd = 460.0, lg = 8e-3;
    double un_amp = 110.0 * std::numbers::sqrt2, un_freq = 50.0, un_phase = 0.0;
    std::string x0 = "0,170";
    std::string method = "zoh";
    std::string input_node = "source";
    std::optional<double> noise_snr;
    std::optional<std::uint64_t> seed;
    bool zero_input = false;
};

TimeSeries simulate_converter(const SimulateOptions& opt, int n) {
    ConverterParams params;
    params.R_n = opt.rn;
    params.L_n = opt.ln;
    params.C_d = opt.cd;
    params.R_d = opt.rd;
    params.L_g = opt.lg;
    params.duty = parse_duty(opt.duty);
    params.u_n = SinusoidInput{opt.un_amp, opt.un_freq, opt.un_phase};
    params.validate();

    const auto x0_parts = split(opt.x0, ',');
    if (x0_parts.size() != 2) throw ConfigError(kModule, "--x0: expected i_n,u_dc");
    const Eigen::Vector2d x0(parse_double(x0_parts[0], "--x0"), parse_double(x0_parts[1], "--x0"));

    if (opt.method != "zoh" && opt.method != "rk4")
        throw ConfigError(kModule, "--method: expected zoh or rk4");
    const SimMethod method = opt.method == "zoh" ? SimMethod::ExactZoh : SimMethod::Rk4;

    const auto* constant = std::get_if<ConstantDuty>(&params.duty);
    TimeSeries series;
    if (constant) {
        auto [system, inputs] = converter_system(params, opt.dt, n, x0);
        series = simulate(system, inputs, method, {"i_n", "u_dc"}, {"u_n"});
    } else {
        // Time-varying duty: RK4 over the instantaneous matrices.
        const auto& duty = std::get<SineModulatedDuty>(params.duty);
        Eigen::MatrixXd states(2, n);
        states.col(0) = x0;
        Eigen::VectorXd u(n);
        for (int j = 0; j < n; ++j)
            u(j) = params.u_n.amplitude *
                   std::sin(2.0 * std::numbers::pi * params.u_n.frequency_hz * opt.dt * j +
                            params.u_n.phase);
        auto deriv = [&](double t, const Eigen::Vector2d& x, double uj) {
            const double d = duty.mean + duty.amplitude *
                                             std::sin(2.0 * std::numbers::pi *
                                                      duty.frequency_hz * t);
            const auto [A, B] = converter_matrices(params, d);
            return Eigen::Vector2d(A * x + B * uj);
        };
        const double h = opt.dt;
        for (int j = 0; j + 1 < n; ++j) {
            const double t = h * j;
            const Eigen::Vector2d x = states.col(j);
            const Eigen::Vector2d k1 = deriv(t, x, u(j));
            const Eigen::Vector2d k2 = deriv(t + 0.5 * h, x + 0.5 * h * k1, u(j));
            const Eigen::Vector2d k3 = deriv(t + 0.5 * h, x + 0.5 * h * k2, u(j));
            const Eigen::Vector2d k4 = deriv(t + h, x + h * k3, u(j));
            states.col(j + 1) = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        series.dt = opt.dt;
        series.channels = {{"i_n", ChannelRole::State, states.row(0).transpose()},
                           {"u_dc", ChannelRole::State, states.row(1).transpose()},
                           {"u_n", ChannelRole::Input, u}};
    }

    if (opt.input_node == "terminal") {
        // Converter-terminal voltage: u_t = u_n - L_g * di_n/dt.
        const double L = params.L_n + params.L_g;
        const double d_avg = constant ? constant->d : std::get<SineModulatedDuty>(params.duty).mean;
        const Eigen::VectorXd& i_n = series.channels[0].values;
        const Eigen::VectorXd& u_dc = series.channels[1].values;
        Eigen::VectorXd& u_n = series.channels[2].values;
        for (Eigen::Index j = 0; j < u_n.size(); ++j) {
            const double didt = (-params.R_n * i_n(j) - d_avg * u_dc(j) + u_n(j)) / L;
            u_n(j) -= params.L_g * didt;
        }
    } else if (opt.input_node != "source") {
        throw ConfigError(kModule, "--input-node: expected source or terminal");
    }
    return series;
}

int cmd_simulate(const SimulateOptions& opt) {
    int n = opt.n;
    double duration = opt.duration;
    if (opt.preset == "railway") {
        duration = duration > 0.0 ? duration : 2.0;
        if (n == 0) n = static_cast<int>(std::llround(duration / opt.dt)) + 1;
    } else if (!opt.preset.empty()) {
        throw ConfigError(kModule, "--preset: unknown preset '" + opt.preset + "'");
    }
    if (n == 0 && duration > 0.0) n = static_cast<int>(std::llround(duration / opt.dt)) + 1;
    if (n < 2) throw ConfigError(kModule, "--n/--duration: need at least 2 samples");
    if (!(opt.dt > 0.0)) throw ConfigError(kModule, "--dt must be positive");

    const std::uint64_t seed = opt.seed ? *opt.seed : default_seed();

    TimeSeries series;
    if (!opt.plant_specs.empty()) {
        std::vector<PlantedMode> modes;
        for (const auto& s : opt.plant_specs) modes.push_back(parse_planted_mode(s));
        series = plant_modes(modes, opt.dt, n, opt.channels, seed);
        if (opt.zero_input) {
            series.channels.push_back(
                {"u_zero", ChannelRole::Input, Eigen::VectorXd::Zero(n)});
        }
    } else {
        series = simulate_converter(opt, n);
    }

    if (opt.noise_snr) series = add_noise(series, *opt.noise_snr, seed);
    write_csv(opt.out, series);
    std::cout << "wrote " << opt.out << " (" << series.length() << " rows, "
              << series.channels.size() << " channels, dt=" << series.dt << ")\n";
    return 0;
}

// ---------------------------------------------------------------------------
// analyze / study-normalization
// ---------------------------------------------------------------------------

struct AnalyzeOptions {
    std::string in;
    std::string method = "dmd";
    std::vector<std::string> states;
    std::vector<std::string> inputs;
    int stack = 1;
    std::string rank = "energy:0.99999999";
    std::string rank_p;
    double band = kDefaultCriticalBand;
    std::string normalize = "none";
    std::string out;
    std::string reconstruct_out;
};

RoleMap make_role_map(const AnalyzeOptions& opt) {
    if (opt.states.empty()) throw ConfigError(kModule, "--states: at least one state channel");
    if (opt.method == "dmdc" && opt.inputs.empty())
        throw ConfigError(kModule, "--inputs: dmdc requires at least one input channel");
    if (opt.method == "dmd" && !opt.inputs.empty())
        throw ConfigError(kModule, "--inputs: dmd uses state channels only");
    RoleMap roles;
    for (const auto& name : opt.states) roles[name] = ChannelRole::State;
    for (const auto& name : opt.inputs) {
        if (roles.count(name))
            throw ConfigError(kModule, "--inputs: channel " + name + " already a state");
        roles[name] = ChannelRole::Input;
    }
    return roles;
}

// Per-channel z-score; zero-variance channels are left as-is and reported.
TimeSeries zscore(const TimeSeries& series, std::vector<std::string>& warnings) {
    TimeSeries out = series;
    for (auto& ch : out.channels) {
        const double mean = ch.values.mean();
        const Eigen::VectorXd centered = ch.values.array() - mean;
        const double sd = std::sqrt(centered.squaredNorm() /
                                    static_cast<double>(ch.values.size()));
        if (sd == 0.0) {
            warnings.push_back("channel " + ch.name + ": zero variance, normalization skipped");
            continue;
        }
        ch.values = centered / sd;
    }
    return out;
}

struct FitResult {
    ModalDecomposition dec;
    StabilityReport report;
    double reconstruction_error = 0.0;
    Eigen::MatrixXd reconstruction;  // stacked rows over the X1 window
    std::vector<std::string> warnings;
};

FitResult run_fit(const TimeSeries& series, const AnalyzeOptions& opt) {
    FitResult result;
    TimeSeries data = series;
    if (opt.normalize == "zscore")
        data = zscore(series, result.warnings);
    else if (opt.normalize != "none")
        throw ConfigError(kModule, "--normalize: expected none or zscore");

    const SnapshotMatrices snap = build_pairs(data, opt.stack);
    const RankPolicy policy_r = parse_rank_policy(opt.rank, "--rank");
    const RankPolicy policy_p =
        parse_rank_policy(opt.rank_p.empty() ? opt.rank : opt.rank_p, "--rank-p");

    if (opt.method == "dmd") {
        result.dec = fit_dmd(snap, policy_r);
        result.reconstruction =
            reconstruct(result.dec, snap.X1.col(0), static_cast<int>(snap.cols()));
    } else if (opt.method == "dmdc") {
        result.dec = fit_dmdc(snap, policy_p, policy_r);
        result.reconstruction = reconstruct_forced(result.dec, snap.X1.col(0), *snap.U1);
    } else {
        throw ConfigError(kModule, "--method: expected dmd or dmdc");
    }
    result.reconstruction_error = (result.reconstruction - snap.X1).norm() / snap.X1.norm();

    const Eigen::VectorXd ic =
        integral_contribution(result.dec, static_cast<int>(snap.cols()));
    result.report = pair_and_classify(result.dec, ic, opt.band);
    for (const auto& w : result.warnings) result.report.warnings.push_back(w);
    return result;
}

json report_to_json(const FitResult& result) {
    const StabilityReport& rep = result.report;
    json j;
    j["schema"] = 1;
    j["method"] = rep.method == MethodKind::Dmd ? "dmd" : "dmdc";
    j["dt"] = rep.dt;
    j["ranks"] = {{"p", rep.rank_p ? json(*rep.rank_p) : json(nullptr)}, {"r", rep.rank_r}};
    json sv = json::array();
    for (const auto& s : result.dec.singular_values) {
        json one = json::array();
        for (Eigen::Index i = 0; i < s.size(); ++i) one.push_back(s(i));
        sv.push_back(one);
    }
    j["singular_values"] = sv;
    json modes = json::array();
    for (const auto& m : rep.modes) {
        json eigs = json::array();
        for (const auto& lam : m.eigenvalues)
            eigs.push_back({{"re", lam.real()}, {"im", lam.imag()}});
        modes.push_back({{"index", m.index},
                         {"eigenvalues", eigs},
                         {"sigma", m.sigma},
                         {"frequency_hz", m.frequency_hz},
                         {"damping_ratio", m.damping_ratio},
                         {"magnitude", m.magnitude},
                         {"integral_contribution", m.integral_contribution},
                         {"classification", to_string(m.classification)}});
    }
    j["modes"] = modes;
    j["dominant"] = rep.dominant;
    j["verdict"] = to_string(rep.verdict);
    j["reconstruction_error"] = result.reconstruction_error;
    j["warnings"] = rep.warnings;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError(kModule, "cannot write " + path);
    out << text;
    if (!out) throw IoError(kModule, "write failed for " + path);
}

void write_reconstruction_csv(const std::string& path, const TimeSeries& series,
                              const AnalyzeOptions& opt, const Eigen::MatrixXd& recon) {
    // First delay block only: the raw state channels over the X1 window.
    std::ofstream out(path);
    if (!out) throw IoError(kModule, "cannot write " + path);
    out << "t";
    for (const auto& name : opt.states) out << "," << name << "_measured," << name << "_dmd";
    out << "\n";
    const int m = static_cast<int>(opt.states.size());
    char buf[40];
    for (Eigen::Index j = 0; j < recon.cols(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", series.t0 + series.dt * static_cast<double>(j));
        out << buf;
        for (int i = 0; i < m; ++i) {
            const Channel* ch = series.find(opt.states[i]);
            std::snprintf(buf, sizeof(buf), "%.17g", ch->values(j));
            out << "," << buf;
            std::snprintf(buf, sizeof(buf), "%.17g", recon(i, j));
            out << "," << buf;
        }
        out << "\n";
    }
}

int verdict_exit_code(Classification verdict) {
    switch (verdict) {
        case Classification::Stable: return 0;
        case Classification::Critical: return 10;
        case Classification::Unstable: return 20;
    }
    return 64;
}

int cmd_analyze(const AnalyzeOptions& opt) {
    const TimeSeries series = ingest_csv(opt.in, make_role_map(opt));
    const FitResult result = run_fit(series, opt);
    const std::string text = report_to_json(result).dump(2) + "\n";
    if (opt.out.empty())
        std::cout << text;
    else
        write_text(opt.out, text);
    if (!opt.reconstruct_out.empty())
        write_reconstruction_csv(opt.reconstruct_out, series, opt, result.reconstruction);
    return verdict_exit_code(result.report.verdict);
}

int cmd_study_normalization(const AnalyzeOptions& opt) {
    if (opt.inputs.empty())
        throw ConfigError(kModule, "--inputs: the study needs an input channel for dmdc");
    RoleMap roles;
    for (const auto& name : opt.states) roles[name] = ChannelRole::State;
    for (const auto& name : opt.inputs) roles[name] = ChannelRole::Input;
    const TimeSeries series = ingest_csv(opt.in, roles);

    json combos;
    for (const std::string method : {"dmd", "dmdc"}) {
        for (const std::string norm : {"none", "zscore"}) {
            AnalyzeOptions one = opt;
            one.method = method;
            one.normalize = norm;
            // Black-box DMD takes every measured channel as a state.
            TimeSeries view = series;
            if (method == "dmd") {
                one.inputs.clear();
                for (auto& ch : view.channels) ch.role = ChannelRole::State;
            }
            const FitResult result = run_fit(view, one);
            json entry = report_to_json(result);
            combos[method + (norm == "none" ? "_raw" : "_zscore")] = entry;
        }
    }
    json j;
    j["schema"] = 1;
    j["stack"] = opt.stack;
    j["critical_band"] = opt.band;
    j["combos"] = combos;
    const std::string text = j.dump(2) + "\n";
    if (opt.out.empty())
        std::cout << text;
    else
        write_text(opt.out, text);
    return 0;
}

// ---------------------------------------------------------------------------
// modes
// ---------------------------------------------------------------------------

int cmd_modes(const std::string& report_path, bool as_json) {
    std::ifstream in(report_path);
    if (!in) throw IoError(kModule, "cannot open " + report_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SchemaMismatch(kModule, report_path + ": not valid JSON: " + e.what());
    }
    if (!j.contains("schema") || j["schema"] != 1 || !j.contains("modes"))
        throw SchemaMismatch(kModule, report_path + ": not a schema-1 stability report");

    if (as_json) {
        json out = json::array();
        for (const auto& m : j["modes"]) out.push_back(m);
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    std::printf("%5s %12s %12s %10s %10s %14s %10s\n", "mode", "freq_hz", "sigma", "damping",
                "|lambda|", "IC", "class");
    for (const auto& m : j["modes"]) {
        std::printf("%5d %12.4f %12.4f %10.4f %10.6f %14.6g %10s\n", m["index"].get<int>(),
                    m["frequency_hz"].get<double>(), m["sigma"].get<double>(),
                    m["damping_ratio"].get<double>(), m["magnitude"].get<double>(),
                    m["integral_contribution"].get<double>(),
                    m["classification"].get<std::string>().c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modal identification and stability analysis for actuated systems"};
    app.require_subcommand(1);

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Generate a CSV scenario");
    simulate->add_option("--out", sim.out, "Output CSV path")->required();
    simulate->add_option("--preset", sim.preset, "Scenario preset (railway)");
    simulate->add_option("--plant", sim.plant_specs,
                         "Planted mode freq:sigma:amp[:phase] (repeatable)");
    simulate->add_option("--channels", sim.channels, "Planted-mode channel count");
    simulate->add_option("--n", sim.n, "Sample count");
    simulate->add_option("--dt", sim.dt, "Sample interval in seconds");
    simulate->add_option("--duration", sim.duration, "Duration in seconds");
    simulate->add_option("--duty", sim.duty, "const:<d> or sine:<mean>:<amp>:<freq>");
    simulate->add_option("--rn", sim.rn, "AC-side resistance (ohm)");
    simulate->add_option("--ln", sim.ln, "Converter-side inductance (H)");
    simulate->add_option("--cd", sim.cd, "DC-link capacitance (F)");
    simulate->add_option("--rd", sim.rd, "DC-link load resistance (ohm)");
    simulate->add_option("--lg", sim.lg, "Grid-side inductance (H)");
    simulate->add_option("--un-amp", sim.un_amp, "Source voltage amplitude (V)");
    simulate->add_option("--un-freq", sim.un_freq, "Source voltage frequency (Hz)");
    simulate->add_option("--un-phase", sim.un_phase, "Source voltage phase (rad)");
    simulate->add_option("--x0", sim.x0, "Initial state i_n,u_dc");
    simulate->add_option("--method", sim.method, "Integrator: zoh or rk4");
    simulate->add_option("--input-node", sim.input_node,
                         "Recorded input voltage node: source or terminal");
    double snr = 0.0;
    auto* snr_opt = simulate->add_option("--noise-snr", snr, "Additive noise SNR (dB)");
    std::uint64_t seed = 0;
    auto* seed_opt = simulate->add_option("--seed", seed, "RNG seed");
    simulate->add_flag("--zero-input", sim.zero_input,
                       "Append an all-zero input channel to planted data");

    AnalyzeOptions ana;
    auto* analyze = app.add_subcommand("analyze", "Fit a decomposition and report stability");
    auto* study = app.add_subcommand("study-normalization",
                                     "Compare raw vs z-scored data for both methods");
    for (auto* cmd : {analyze, study}) {
        cmd->add_option("--in", ana.in, "Input CSV path")->required();
        cmd->add_option("--states", ana.states, "State channel names")->delimiter(',');
        cmd->add_option("--inputs", ana.inputs, "Input channel names")->delimiter(',');
        cmd->add_option("--stack", ana.stack, "Hankel shift-stacking count s");
        cmd->add_option("--rank", ana.rank, "Rank policy for r: fixed:<r> or energy:<t>");
        cmd->add_option("--rank-p", ana.rank_p, "Rank policy for p (dmdc; defaults to --rank)");
        cmd->add_option("--band", ana.band, "Critical band on |lambda|");
        cmd->add_option("--out", ana.out, "Output JSON path (stdout if omitted)");
    }
    analyze->add_option("--method", ana.method, "dmd or dmdc");
    analyze->add_option("--normalize", ana.normalize, "none or zscore");
    analyze->add_option("--reconstruct", ana.reconstruct_out, "Reconstruction CSV path");

    std::string report_path;
    bool modes_json = false;
    auto* modes = app.add_subcommand("modes", "Print the mode table of a report");
    modes->add_option("--report", report_path, "Report JSON path")->required();
    modes->add_flag("--json", modes_json, "Machine-readable output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) {
            if (*snr_opt) sim.noise_snr = snr;
            if (*seed_opt) sim.seed = seed;
            return cmd_simulate(sim);
        }
        if (*analyze) return cmd_analyze(ana);
        if (*study) return cmd_study_normalization(ana);
        if (*modes) return cmd_modes(report_path, modes_json);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 64;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 66;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 65;
    } catch (const std::exception& e) {
        std::cerr << "error: [cli] " << e.what() << "\n";
        return 70;
    }
    return 64;
}
