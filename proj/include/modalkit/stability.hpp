#pragma once

#include <complex>
#include <string>
#include <vector>

#include "modalkit/dmd.hpp"

namespace modalkit {

enum class Classification { Stable, Critical, Unstable };

const char* to_string(Classification c);

/// A conjugate eigenvalue pair (or real singleton) with its continuous
/// frequency, damping, and integral contribution.
struct Mode {
    int index = 0;
    std::vector<std::complex<double>> eigenvalues;  // one or two entries
    double sigma = 0.0;             // Re(ln lambda)/dt
    double frequency_hz = 0.0;      // |Im(ln lambda)/dt| / 2pi
    double damping_ratio = 0.0;     // -sigma / sqrt(sigma^2 + omega^2)
    double magnitude = 0.0;         // |lambda|
    double integral_contribution = 0.0;
    Classification classification = Classification::Stable;
    bool unpaired_warning = false;
    bool nyquist_fold = false;
};

struct StabilityReport {
    std::vector<Mode> modes;  // sorted by integral contribution, descending
    int dominant = 0;
    Classification verdict = Classification::Stable;
    MethodKind method = MethodKind::Dmd;
    double dt = 0.0;
    int rank_r = 0;
    std::optional<int> rank_p;
    std::vector<std::string> warnings;
};

/// Per-eigenvalue importance: IC_i = dt * ||Phi_i||^2 * sum_{j=1..n} |lambda_i^j b_i|.
Eigen::VectorXd integral_contribution(const ModalDecomposition& dec, int n);

/// Principal-branch log map: lambda -> (Re(ln lambda)/dt, |Im(ln lambda)/dt|/2pi).
std::pair<double, double> to_continuous(std::complex<double> lambda, double dt);

/// Pairs conjugate eigenvalues, classifies each mode against the unit
/// circle with the given critical band, and ranks modes by IC. The
/// verdict is the worst classification among modes with IC >= 1% of max.
StabilityReport pair_and_classify(const ModalDecomposition& dec, const Eigen::VectorXd& ic,
                                  double band);

constexpr double kDefaultCriticalBand = 1e-3;

}  // namespace modalkit
