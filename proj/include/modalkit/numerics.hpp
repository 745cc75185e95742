#pragma once

#include <Eigen/Dense>
#include <complex>

namespace modalkit {

/// How many singular triplets to keep in a truncated SVD: either an
/// explicit rank or the smallest rank capturing the given share of the
/// squared singular-value energy.
struct RankPolicy {
    enum class Kind { Fixed, Energy };
    Kind kind;
    int r = 0;
    double threshold = 0.0;

    static RankPolicy fixed(int r);
    static RankPolicy energy(double threshold);
};

struct TruncatedSvd {
    Eigen::MatrixXd U;  // rows x r, orthonormal columns
    Eigen::VectorXd S;  // length r, nonincreasing, positive
    Eigen::MatrixXd V;  // cols x r, orthonormal columns
    double discarded_energy = 0.0;

    int rank() const { return static_cast<int>(S.size()); }
};

struct EigenPairs {
    Eigen::VectorXcd eigenvalues;   // descending |lambda|, ties by descending Im
    Eigen::MatrixXcd eigenvectors;  // unit columns, first nonzero entry real-positive
};

TruncatedSvd truncated_svd(const Eigen::MatrixXd& M, const RankPolicy& policy);

/// Eigendecomposition of a real square matrix with deterministic ordering
/// and eigenvector phase.
EigenPairs eig(const Eigen::MatrixXd& A);

/// V * diag(1/S) * U^T with a relative floor of 1e-12 on singular values.
Eigen::MatrixXd pinv_from_svd(const TruncatedSvd& svd);

/// Minimum-norm least-squares solve of Phi * b = rhs for complex Phi.
Eigen::VectorXcd lstsq(const Eigen::MatrixXcd& Phi, const Eigen::VectorXcd& rhs);

}  // namespace modalkit
