#include "modalkit/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "modalkit/errors.hpp"

namespace modalkit {

namespace {
constexpr const char* kModule = "stability";
constexpr double kIcVerdictFraction = 0.01;  // modes below 1% of max IC do not vote
constexpr double kFoldTol = 1e-9;

int severity(Classification c) { return static_cast<int>(c); }
}  // namespace

const char* to_string(Classification c) {
    switch (c) {
        case Classification::Stable: return "Stable";
        case Classification::Critical: return "Critical";
        case Classification::Unstable: return "Unstable";
    }
    return "?";
}

Eigen::VectorXd integral_contribution(const ModalDecomposition& dec, int n) {
    if (n < 1) throw ConfigError(kModule, "snapshot count must be >= 1");
    const int r = dec.rank_r;
    Eigen::VectorXd ic(r);
    for (int i = 0; i < r; ++i) {
        const double mag = std::abs(dec.eigenvalues(i));
        const double b = std::abs(dec.amplitudes(i));
        double sum = 0.0;
        double pow_mag = 1.0;
        for (int j = 1; j <= n; ++j) {
            pow_mag *= mag;
            sum += pow_mag * b;
        }
        ic(i) = dec.dt * dec.exact_modes.col(i).squaredNorm() * sum;
    }
    return ic;
}

std::pair<double, double> to_continuous(std::complex<double> lambda, double dt) {
    if (lambda == std::complex<double>(0.0, 0.0))
        throw DegenerateEigenvalue(kModule, "log map undefined at lambda = 0");
    if (!(dt > 0.0)) throw ConfigError(kModule, "dt must be positive");
    const std::complex<double> s = std::log(lambda) / dt;
    return {s.real(), std::abs(s.imag()) / (2.0 * std::numbers::pi)};
}

StabilityReport pair_and_classify(const ModalDecomposition& dec, const Eigen::VectorXd& ic,
                                  double band) {
    const int r = dec.rank_r;
    if (ic.size() != r) throw ShapeError(kModule, "IC length does not match eigenvalue count");
    if (band < 0.0) throw ConfigError(kModule, "critical band must be >= 0");

    StabilityReport report;
    report.method = dec.kind;
    report.dt = dec.dt;
    report.rank_r = dec.rank_r;
    report.rank_p = dec.rank_p;

    std::vector<bool> used(r, false);
    for (int i = 0; i < r; ++i) {
        if (used[i]) continue;
        used[i] = true;
        const std::complex<double> lam = dec.eigenvalues(i);
        const double tol = 1e-6 * (1.0 + std::abs(lam));

        Mode mode;
        mode.eigenvalues.push_back(lam);
        mode.integral_contribution = ic(i);

        if (std::abs(lam.imag()) > tol) {
            // Closest conjugate partner within tolerance.
            int best = -1;
            double best_dist = tol;
            for (int j = i + 1; j < r; ++j) {
                if (used[j]) continue;
                const double dist = std::abs(dec.eigenvalues(j) - std::conj(lam));
                if (dist <= best_dist) {
                    best_dist = dist;
                    best = j;
                }
            }
            if (best >= 0) {
                used[best] = true;
                mode.eigenvalues.push_back(dec.eigenvalues(best));
                mode.integral_contribution += ic(best);
            } else {
                mode.unpaired_warning = true;
                report.warnings.push_back("unpaired complex eigenvalue at index " +
                                          std::to_string(i));
            }
        }

        const std::complex<double> rep =
            lam.imag() >= 0.0 ? lam : std::conj(lam);  // representative of the pair
        mode.magnitude = std::abs(rep);
        if (mode.magnitude > 0.0) {
            const auto [sigma, freq] = to_continuous(rep, dec.dt);
            mode.sigma = sigma;
            mode.frequency_hz = freq;
            const double omega = std::abs(std::log(rep).imag()) / dec.dt;
            const double denom = std::hypot(sigma, omega);
            mode.damping_ratio = denom > 0.0 ? -sigma / denom : 0.0;
            if (std::abs(std::abs(std::log(rep).imag()) - std::numbers::pi) < kFoldTol) {
                mode.nyquist_fold = true;
                report.warnings.push_back("Nyquist-folded frequency in mode with |lambda|=" +
                                          std::to_string(mode.magnitude));
            }
        }

        if (mode.magnitude > 1.0 + band)
            mode.classification = Classification::Unstable;
        else if (mode.magnitude >= 1.0 - band)
            mode.classification = Classification::Critical;
        else
            mode.classification = Classification::Stable;

        report.modes.push_back(std::move(mode));
    }

    std::stable_sort(report.modes.begin(), report.modes.end(), [](const Mode& a, const Mode& b) {
        if (a.integral_contribution != b.integral_contribution)
            return a.integral_contribution > b.integral_contribution;
        return a.frequency_hz < b.frequency_hz;
    });
    for (std::size_t i = 0; i < report.modes.size(); ++i)
        report.modes[i].index = static_cast<int>(i);
    report.dominant = 0;

    double max_ic = 0.0;
    for (const auto& m : report.modes) max_ic = std::max(max_ic, m.integral_contribution);
    report.verdict = Classification::Stable;
    for (const auto& m : report.modes) {
        if (m.integral_contribution < kIcVerdictFraction * max_ic) continue;
        if (severity(m.classification) > severity(report.verdict))
            report.verdict = m.classification;
    }
    return report;
}

}  // namespace modalkit
