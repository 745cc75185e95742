#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "modalkit/simulator.hpp"
#include "modalkit/timeseries.hpp"

namespace testutil {

// Greedy multiset match: worst-case distance from each expected eigenvalue
// to its closest unused recovered one.
inline double eig_multiset_distance(const Eigen::VectorXcd& expected,
                                    const Eigen::VectorXcd& recovered) {
    std::vector<bool> used(recovered.size(), false);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < expected.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        Eigen::Index best_j = -1;
        for (Eigen::Index j = 0; j < recovered.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(expected(i) - recovered(j));
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        if (best_j >= 0) used[best_j] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

// Random continuous-time system with eigenvalue real parts pushed left of
// -margin, plus a generic x0.
inline modalkit::LtiSystem random_stable_system(std::mt19937_64& rng, int dim, double dt,
                                                double margin = 0.2) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd A(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) A(i, j) = gauss(rng);
    const double spread = A.eigenvalues().real().maxCoeff();
    A -= (spread + margin) * Eigen::MatrixXd::Identity(dim, dim);

    modalkit::LtiSystem sys;
    sys.A = A;
    sys.B = Eigen::MatrixXd::Zero(dim, 1);
    sys.x0 = Eigen::VectorXd::NullaryExpr(dim, [&](Eigen::Index) { return gauss(rng); });
    sys.dt = dt;
    return sys;
}

inline modalkit::TimeSeries series_from_matrix(const Eigen::MatrixXd& states, double dt,
                                               modalkit::ChannelRole role =
                                                   modalkit::ChannelRole::State) {
    modalkit::TimeSeries s;
    s.dt = dt;
    for (Eigen::Index i = 0; i < states.rows(); ++i) {
        modalkit::Channel ch;
        ch.name = "c" + std::to_string(i);
        ch.role = role;
        ch.values = states.row(i).transpose();
        s.channels.push_back(std::move(ch));
    }
    return s;
}

inline double relative_error(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
    return (got - want).norm() / want.norm();
}

}  // namespace testutil
