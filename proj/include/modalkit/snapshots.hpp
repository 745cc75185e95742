#pragma once

#include <map>
#include <optional>
#include <string>

#include "modalkit/timeseries.hpp"

namespace modalkit {

/// One-step-shifted data matrix pair (X1, X2) with the optional input
/// matrix U1, all Hankel-stacked with the same shift count s.
struct SnapshotMatrices {
    Eigen::MatrixXd X1;
    Eigen::MatrixXd X2;
    std::optional<Eigen::MatrixXd> U1;
    int m = 0;  // raw state channel count
    int e = 0;  // raw input channel count
    int s = 1;  // shift-stacking count
    double dt = 0.0;

    Eigen::Index cols() const { return X1.cols(); }
};

using RoleMap = std::map<std::string, ChannelRole>;

/// Reads `t,<name1>,<name2>,...` CSV, validates sampling uniformity
/// (0.1% of the median step) and assigns roles from role_map. The time
/// column is discarded after validation; only dt and t0 are kept.
TimeSeries ingest_csv(const std::string& path, const RoleMap& role_map);

void write_csv(const std::string& path, const TimeSeries& series);

/// Delay-major Hankel stacking: row block d (d = 0..s-1) holds every
/// channel of the requested role delayed by d samples. Shape (c*s) x (n-s+1).
Eigen::MatrixXd hankel_stack(const TimeSeries& series, int s, ChannelRole role);

/// Stacks states (and inputs when present) and splits off the
/// one-step-shifted pair: X1 = cols 0..n-s-1, X2 = cols 1..n-s.
SnapshotMatrices build_pairs(const TimeSeries& series, int s);

}  // namespace modalkit
