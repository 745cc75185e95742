#include "modalkit/simulator.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

#include "modalkit/errors.hpp"

namespace modalkit {

namespace {

constexpr const char* kModule = "simulator";
constexpr double kDivergenceLimit = 1e12;

// splitmix64; keeps seeded outputs identical across standard libraries.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform() {  // [0, 1)
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double normal() {
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
};

void check_finite_bounded(const Eigen::VectorXd& x) {
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kDivergenceLimit)
        throw SimulationDiverged(kModule, "state magnitude exceeded 1e12");
}

std::string default_name(const char* prefix, Eigen::Index i) {
    return std::string(prefix) + std::to_string(i + 1);
}

}  // namespace

void ConverterParams::validate() const {
    if (!(L_n > 0.0) || !(C_d > 0.0) || !(R_d > 0.0))
        throw ConfigError(kModule, "L_n, C_d, R_d must be positive");
    if (R_n < 0.0 || L_g < 0.0) throw ConfigError(kModule, "R_n and L_g must be >= 0");
    if (const auto* c = std::get_if<ConstantDuty>(&duty)) {
        if (std::abs(c->d) > 1.0) throw ConfigError(kModule, "duty must lie in [-1, 1]");
    } else {
        const auto& s = std::get<SineModulatedDuty>(duty);
        if (std::abs(s.mean) + std::abs(s.amplitude) > 1.0)
            throw ConfigError(kModule, "|duty mean| + |duty amplitude| must be <= 1");
    }
}

std::pair<Eigen::Matrix2d, Eigen::Vector2d> converter_matrices(const ConverterParams& params,
                                                               double d) {
    params.validate();
    const double L = params.L_n + params.L_g;
    Eigen::Matrix2d A;
    A << -params.R_n / L, -d / L,
         d / params.C_d, -1.0 / (params.R_d * params.C_d);
    Eigen::Vector2d B(1.0 / L, 0.0);
    return {A, B};
}

TimeSeries simulate(const LtiSystem& system, const Eigen::MatrixXd& inputs, SimMethod method,
                    const std::vector<std::string>& state_names,
                    const std::vector<std::string>& input_names) {
    const Eigen::Index k = system.A.rows();
    const Eigen::Index e = system.B.cols();
    const Eigen::Index n = inputs.cols();
    if (system.A.cols() != k || system.B.rows() != k || system.x0.size() != k)
        throw ShapeError(kModule, "inconsistent system dimensions");
    if (inputs.rows() != e) throw ShapeError(kModule, "input rows do not match B columns");
    if (n < 2) throw ShapeError(kModule, "need at least 2 input columns");
    if (!(system.dt > 0.0)) throw ConfigError(kModule, "dt must be positive");

    Eigen::MatrixXd states(k, n);
    states.col(0) = system.x0;

    if (method == SimMethod::ExactZoh) {
        // One matrix exponential of the (A B; 0 0) block gives (Ad, Bd).
        Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(k + e, k + e);
        aug.topLeftCorner(k, k) = system.A * system.dt;
        aug.topRightCorner(k, e) = system.B * system.dt;
        const Eigen::MatrixXd expm = aug.exp();
        const Eigen::MatrixXd ad = expm.topLeftCorner(k, k);
        const Eigen::MatrixXd bd = expm.topRightCorner(k, e);
        for (Eigen::Index j = 0; j + 1 < n; ++j) {
            states.col(j + 1) = ad * states.col(j) + bd * inputs.col(j);
            check_finite_bounded(states.col(j + 1));
        }
    } else {
        const double h = system.dt;
        for (Eigen::Index j = 0; j + 1 < n; ++j) {
            const Eigen::VectorXd u = inputs.col(j);  // piecewise-constant over the step
            const Eigen::VectorXd x = states.col(j);
            const Eigen::VectorXd k1 = system.A * x + system.B * u;
            const Eigen::VectorXd k2 = system.A * (x + 0.5 * h * k1) + system.B * u;
            const Eigen::VectorXd k3 = system.A * (x + 0.5 * h * k2) + system.B * u;
            const Eigen::VectorXd k4 = system.A * (x + h * k3) + system.B * u;
            states.col(j + 1) = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            check_finite_bounded(states.col(j + 1));
        }
    }

    TimeSeries series;
    series.dt = system.dt;
    for (Eigen::Index i = 0; i < k; ++i) {
        Channel ch;
        ch.name = i < static_cast<Eigen::Index>(state_names.size()) ? state_names[i]
                                                                    : default_name("x", i);
        ch.role = ChannelRole::State;
        ch.values = states.row(i).transpose();
        series.channels.push_back(std::move(ch));
    }
    for (Eigen::Index i = 0; i < e; ++i) {
        Channel ch;
        ch.name = i < static_cast<Eigen::Index>(input_names.size()) ? input_names[i]
                                                                    : default_name("u", i);
        ch.role = ChannelRole::Input;
        ch.values = inputs.row(i).transpose();
        series.channels.push_back(std::move(ch));
    }
    return series;
}

Eigen::VectorXcd analytic_discrete_eigs(const LtiSystem& system) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(system.A);
    if (solver.info() != Eigen::Success)
        throw NumericalFailure(kModule, "eigensolver failed on A");
    Eigen::VectorXcd out = solver.eigenvalues();
    for (Eigen::Index i = 0; i < out.size(); ++i)
        out(i) = std::exp(out(i) * system.dt);
    return out;
}

TimeSeries plant_modes(const std::vector<PlantedMode>& modes, double dt, int n, int channels,
                       std::uint64_t seed) {
    if (!(dt > 0.0)) throw ConfigError(kModule, "dt must be positive");
    if (n < 2 || channels < 1) throw ConfigError(kModule, "need n >= 2 and channels >= 1");
    const double nyquist = 0.5 / dt;
    for (const auto& mode : modes)
        if (mode.frequency_hz >= nyquist)
            throw AliasedMode(kModule, std::to_string(mode.frequency_hz) +
                                           " Hz is at or above Nyquist " +
                                           std::to_string(nyquist) + " Hz");

    const std::size_t k = modes.size();
    SplitMix64 rng(seed);
    // Mixing weights away from zero so every channel sees every mode.
    Eigen::MatrixXd mix(channels, static_cast<Eigen::Index>(std::max<std::size_t>(k, 1)));
    for (int c = 0; c < channels; ++c)
        for (std::size_t i = 0; i < std::max<std::size_t>(k, 1); ++i) {
            const double mag = 0.5 + rng.uniform();
            mix(c, static_cast<Eigen::Index>(i)) = rng.uniform() < 0.5 ? -mag : mag;
        }

    TimeSeries series;
    series.dt = dt;
    for (int c = 0; c < channels; ++c) {
        Channel ch;
        ch.name = default_name("ch", c);
        ch.role = ChannelRole::State;
        ch.values = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i < k; ++i) {
            const auto& mode = modes[i];
            for (int j = 0; j < n; ++j) {
                const double t = dt * j;
                ch.values(j) += mix(c, static_cast<Eigen::Index>(i)) * mode.amplitude *
                                std::exp(mode.sigma * t) *
                                std::cos(2.0 * std::numbers::pi * mode.frequency_hz * t +
                                         mode.phase);
            }
        }
        series.channels.push_back(std::move(ch));
    }
    return series;
}

TimeSeries add_noise(const TimeSeries& series, double snr_db, std::uint64_t seed) {
    if (!std::isfinite(snr_db)) throw ConfigError(kModule, "snr_db must be finite");
    double total = 0.0;
    for (const auto& ch : series.channels) total += ch.values.squaredNorm();
    if (total == 0.0) throw DegenerateData(kModule, "all-zero series has no SNR reference");

    TimeSeries out = series;
    const Eigen::Index n = series.length();
    std::uint64_t channel_index = 0;
    for (auto& ch : out.channels) {
        SplitMix64 rng(seed ^ (0x517cc1b727220a95ULL * ++channel_index));
        const double rms = std::sqrt(ch.values.squaredNorm() / static_cast<double>(n));
        const double sigma = rms * std::pow(10.0, -snr_db / 20.0);
        for (Eigen::Index j = 0; j < n; ++j) ch.values(j) += sigma * rng.normal();
    }
    return out;
}

std::pair<LtiSystem, Eigen::MatrixXd> converter_system(const ConverterParams& params, double dt,
                                                       int n, const Eigen::Vector2d& x0) {
    const auto* c = std::get_if<ConstantDuty>(&params.duty);
    if (!c) throw ConfigError(kModule, "converter_system requires a constant duty");
    const auto [A, B] = converter_matrices(params, c->d);

    LtiSystem system;
    system.A = A;
    system.B = B;
    system.x0 = x0;
    system.dt = dt;

    Eigen::MatrixXd inputs(1, n);
    for (int j = 0; j < n; ++j)
        inputs(0, j) = params.u_n.amplitude *
                       std::sin(2.0 * std::numbers::pi * params.u_n.frequency_hz * dt * j +
                                params.u_n.phase);
    return {system, inputs};
}

}  // namespace modalkit
