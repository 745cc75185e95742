#include "modalkit/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "modalkit/errors.hpp"

namespace modalkit {

namespace {
constexpr const char* kModule = "numerics";
constexpr double kPinvFloor = 1e-12;  // relative to the largest singular value
}  // namespace

RankPolicy RankPolicy::fixed(int r) {
    if (r < 1) throw ConfigError(kModule, "Fixed rank must be >= 1");
    RankPolicy p;
    p.kind = Kind::Fixed;
    p.r = r;
    return p;
}

RankPolicy RankPolicy::energy(double threshold) {
    if (!(threshold > 0.0) || threshold > 1.0)
        throw ConfigError(kModule, "Energy threshold must lie in (0, 1]");
    RankPolicy p;
    p.kind = Kind::Energy;
    p.threshold = threshold;
    return p;
}

TruncatedSvd truncated_svd(const Eigen::MatrixXd& M, const RankPolicy& policy) {
    if (!M.allFinite()) throw MalformedData(kModule, "matrix has non-finite entries");
    if (M.norm() == 0.0) throw DegenerateMatrix(kModule, "all-zero matrix has no SVD basis");

    const Eigen::Index min_dim = std::min(M.rows(), M.cols());
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    const double total_energy = sigma.squaredNorm();

    int r;
    if (policy.kind == RankPolicy::Kind::Fixed) {
        if (policy.r > min_dim)
            throw RankTooLarge(kModule, "Fixed rank " + std::to_string(policy.r) +
                                            " exceeds min dimension " + std::to_string(min_dim));
        r = policy.r;
    } else {
        r = 1;
        double cum = sigma(0) * sigma(0);
        while (r < min_dim && cum / total_energy < policy.threshold) {
            cum += sigma(r) * sigma(r);
            ++r;
        }
    }

    TruncatedSvd out;
    out.U = svd.matrixU().leftCols(r);
    out.S = sigma.head(r);
    out.V = svd.matrixV().leftCols(r);
    out.discarded_energy = 1.0 - sigma.head(r).squaredNorm() / total_energy;
    if (out.discarded_energy < 0.0) out.discarded_energy = 0.0;
    return out;
}

EigenPairs eig(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols()) throw ShapeError(kModule, "eig requires a square matrix");
    if (!A.allFinite()) throw MalformedData(kModule, "matrix has non-finite entries");

    Eigen::EigenSolver<Eigen::MatrixXd> solver(A);
    if (solver.info() != Eigen::Success)
        throw NumericalFailure(kModule, "eigensolver failed to converge");

    const Eigen::Index n = A.rows();
    Eigen::VectorXcd values = solver.eigenvalues();
    Eigen::MatrixXcd vectors = solver.eigenvectors();

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double ma = std::abs(values(a));
        const double mb = std::abs(values(b));
        if (ma != mb) return ma > mb;
        return values(a).imag() > values(b).imag();
    });

    EigenPairs out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.eigenvalues(k) = values(order[k]);
        Eigen::VectorXcd w = vectors.col(order[k]);
        w.normalize();
        // Deterministic phase: rotate the first non-negligible entry onto
        // the positive real axis.
        for (Eigen::Index i = 0; i < n; ++i) {
            const double mag = std::abs(w(i));
            if (mag > 1e-12) {
                w *= std::conj(w(i)) / mag;
                break;
            }
        }
        out.eigenvectors.col(k) = w;
    }
    return out;
}

Eigen::MatrixXd pinv_from_svd(const TruncatedSvd& svd) {
    const double floor = kPinvFloor * svd.S(0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(svd.S.size());
    for (Eigen::Index i = 0; i < svd.S.size(); ++i)
        if (svd.S(i) > floor) inv(i) = 1.0 / svd.S(i);
    return svd.V * inv.asDiagonal() * svd.U.transpose();
}

Eigen::VectorXcd lstsq(const Eigen::MatrixXcd& Phi, const Eigen::VectorXcd& rhs) {
    if (Phi.rows() != rhs.size())
        throw ShapeError(kModule, "lstsq dimension mismatch");
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Phi, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kPinvFloor);
    return svd.solve(rhs);
}

}  // namespace modalkit
