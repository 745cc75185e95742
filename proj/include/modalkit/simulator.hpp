#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "modalkit/timeseries.hpp"

namespace modalkit {

struct ConstantDuty {
    double d = 0.0;
};

struct SineModulatedDuty {
    double mean = 0.0;
    double amplitude = 0.0;
    double frequency_hz = 0.0;
};

using DutyPolicy = std::variant<ConstantDuty, SineModulatedDuty>;

struct SinusoidInput {
    double amplitude = 0.0;
    double frequency_hz = 0.0;
    double phase = 0.0;
};

/// Which voltage node the recorded input channel taps: the source behind
/// the grid inductance, or the converter terminal after it.
enum class InputNode { Source, ConverterTerminal };

/// Averaged single-phase converter main-circuit constants. The PWM
/// switching state is replaced by the duty policy, so the model is LTI
/// for a constant duty.
struct ConverterParams {
    double R_n = 0.1;      // ohms, AC-side resistance
    double L_n = 4e-3;     // henries, converter-side inductance
    double C_d = 800e-6;   // farads, DC-link capacitance
    double R_d = 460.0;    // ohms, DC-link load resistance
    double L_g = 8e-3;     // henries, grid-side inductance (in series with L_n)
    DutyPolicy duty = ConstantDuty{0.8};
    SinusoidInput u_n{110.0 * 1.4142135623730951, 50.0, 0.0};
    InputNode input_node = InputNode::Source;

    void validate() const;
};

struct LtiSystem {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::VectorXd x0;
    double dt = 0.0;
};

enum class SimMethod { ExactZoh, Rk4 };

/// State/input matrices of the averaged converter at duty d, with the
/// grid inductance folded into the series inductance.
std::pair<Eigen::Matrix2d, Eigen::Vector2d> converter_matrices(const ConverterParams& params,
                                                               double d);

/// Integrates x' = A x + B u(t) over the input columns; states come out
/// tagged State and inputs appended tagged Input.
TimeSeries simulate(const LtiSystem& system, const Eigen::MatrixXd& inputs, SimMethod method,
                    const std::vector<std::string>& state_names = {},
                    const std::vector<std::string>& input_names = {});

/// exp(eig(A) * dt): the exact discrete-time eigenvalues under ZOH sampling.
Eigen::VectorXcd analytic_discrete_eigs(const LtiSystem& system);

struct PlantedMode {
    double frequency_hz = 0.0;
    double sigma = 0.0;  // 1/s, continuous decay rate
    double amplitude = 1.0;
    double phase = 0.0;
};

/// Each channel is a seeded fixed linear mixture of the damped sinusoids
/// amplitude * e^{sigma t} * cos(2 pi f t + phase).
TimeSeries plant_modes(const std::vector<PlantedMode>& modes, double dt, int n, int channels,
                       std::uint64_t seed);

/// Adds zero-mean pseudo-random noise per channel at the requested SNR.
TimeSeries add_noise(const TimeSeries& series, double snr_db, std::uint64_t seed);

/// Builds the converter LtiSystem plus sampled u_n input columns for a
/// constant-duty run.
std::pair<LtiSystem, Eigen::MatrixXd> converter_system(const ConverterParams& params, double dt,
                                                       int n, const Eigen::Vector2d& x0);

}  // namespace modalkit
