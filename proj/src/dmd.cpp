#include "modalkit/dmd.hpp"

#include <cmath>

#include "modalkit/errors.hpp"

namespace modalkit {

namespace {
constexpr const char* kModule = "dmd";
}

ModalDecomposition fit_dmd(const SnapshotMatrices& snap, const RankPolicy& policy) {
    if (snap.cols() < 2) throw TooFewSnapshots(kModule, "need at least 2 snapshot columns");

    const TruncatedSvd svd = truncated_svd(snap.X1, policy);
    const int r = svd.rank();

    // Projected operator U^T X2 V Sigma^-1.
    const Eigen::MatrixXd atil =
        svd.U.transpose() * snap.X2 * svd.V * svd.S.cwiseInverse().asDiagonal();
    const EigenPairs ed = eig(atil);

    ModalDecomposition dec;
    dec.kind = MethodKind::Dmd;
    dec.eigenvalues = ed.eigenvalues;
    dec.exact_modes =
        (snap.X2 * svd.V * svd.S.cwiseInverse().asDiagonal()).cast<std::complex<double>>() *
        ed.eigenvectors;
    dec.reduced_A = atil;
    dec.basis_U = svd.U;
    dec.singular_values.push_back(svd.S);
    dec.rank_r = r;
    dec.dt = snap.dt;
    dec.amplitudes = lstsq(dec.exact_modes, snap.X1.col(0).cast<std::complex<double>>());
    return dec;
}

Eigen::VectorXcd mode_amplitudes(const ModalDecomposition& dec, const Eigen::VectorXd& x1) {
    if (x1.size() != dec.exact_modes.rows())
        throw ShapeError(kModule, "initial snapshot length does not match mode rows");
    return lstsq(dec.exact_modes, x1.cast<std::complex<double>>());
}

namespace {

Eigen::MatrixXcd propagate_modes(const ModalDecomposition& dec, const Eigen::VectorXcd& b,
                                 int steps) {
    const Eigen::Index rows = dec.exact_modes.rows();
    const int r = dec.rank_r;
    Eigen::MatrixXcd out(rows, steps);
    Eigen::VectorXcd coeff = b;
    for (int j = 0; j < steps; ++j) {
        out.col(j) = dec.exact_modes * coeff;
        for (int k = 0; k < r; ++k) coeff(k) *= dec.eigenvalues(k);
    }
    return out;
}

}  // namespace

Eigen::MatrixXd reconstruct(const ModalDecomposition& dec, const Eigen::VectorXd& x1,
                            int steps) {
    if (dec.kind != MethodKind::Dmd)
        throw ShapeError(kModule, "reconstruct expects an unforced decomposition");
    const Eigen::VectorXcd b = mode_amplitudes(dec, x1);
    return propagate_modes(dec, b, steps).real();
}

double reconstruction_imag_residue(const ModalDecomposition& dec, const Eigen::VectorXd& x1,
                                   int steps) {
    const Eigen::VectorXcd b = mode_amplitudes(dec, x1);
    return propagate_modes(dec, b, steps).imag().norm();
}

}  // namespace modalkit
