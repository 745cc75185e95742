#include "modalkit/dmdc.hpp"

#include <algorithm>

#include "modalkit/errors.hpp"

namespace modalkit {

namespace {
constexpr const char* kModule = "dmdc";
}

ModalDecomposition fit_dmdc(const SnapshotMatrices& snap, const RankPolicy& policy_p,
                            const RankPolicy& policy_r, DmdcInternals* internals) {
    if (!snap.U1) throw MissingInputs(kModule, "snapshot trio has no input matrix U1");
    if (snap.cols() < 2) throw TooFewSnapshots(kModule, "need at least 2 snapshot columns");
    if (snap.U1->cols() != snap.X1.cols())
        throw ShapeError(kModule, "U1 column count does not match X1");

    const Eigen::Index state_rows = snap.X1.rows();
    const Eigen::Index input_rows = snap.U1->rows();

    Eigen::MatrixXd omega(state_rows + input_rows, snap.cols());
    omega.topRows(state_rows) = snap.X1;
    omega.bottomRows(input_rows) = *snap.U1;

    const TruncatedSvd svd_p = truncated_svd(omega, policy_p);
    const int p = svd_p.rank();

    if (policy_r.kind == RankPolicy::Kind::Fixed && policy_r.r > p)
        throw RankOrderViolation(kModule, "requested r=" + std::to_string(policy_r.r) +
                                              " exceeds p=" + std::to_string(p));
    TruncatedSvd svd_r = truncated_svd(snap.X2, policy_r);
    if (svd_r.rank() > p) {
        // Energy policy may overshoot p; clamp to keep r <= p.
        svd_r.U = svd_r.U.leftCols(p).eval();
        svd_r.S = svd_r.S.head(p).eval();
        svd_r.V = svd_r.V.leftCols(p).eval();
    }
    const int r = svd_r.rank();

    const Eigen::MatrixXd up1 = svd_p.U.topRows(state_rows);
    const Eigen::MatrixXd up2 = svd_p.U.bottomRows(input_rows);
    const Eigen::MatrixXd& ur = svd_r.U;

    // Common factor X2 Vp Sigma_p^-1 of both reduced operators.
    const Eigen::MatrixXd core = snap.X2 * svd_p.V * svd_p.S.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd abar = ur.transpose() * core * up1.transpose() * ur;
    const Eigen::MatrixXd bbar = ur.transpose() * core * up2.transpose();

    const EigenPairs ed = eig(abar);

    ModalDecomposition dec;
    dec.kind = MethodKind::Dmdc;
    dec.eigenvalues = ed.eigenvalues;
    dec.exact_modes =
        (core * up1.transpose() * ur).cast<std::complex<double>>() * ed.eigenvectors;
    dec.reduced_A = abar;
    dec.reduced_B = bbar;
    dec.basis_U = ur;
    dec.singular_values.push_back(svd_p.S);
    dec.singular_values.push_back(svd_r.S);
    dec.rank_r = r;
    dec.rank_p = p;
    dec.dt = snap.dt;

    // Amplitudes from the projected first snapshot: W b = Ur^T x1.
    const Eigen::VectorXcd z1 =
        (ur.transpose() * snap.X1.col(0)).cast<std::complex<double>>();
    dec.amplitudes = lstsq(ed.eigenvectors, z1);

    if (internals) {
        internals->Up1 = up1;
        internals->Up2 = up2;
        internals->Sp = svd_p.S;
        internals->Vp = svd_p.V;
        internals->Ur = ur;
    }
    return dec;
}

Eigen::MatrixXd reconstruct_forced(const ModalDecomposition& dec, const Eigen::VectorXd& x1,
                                   const Eigen::MatrixXd& inputs) {
    if (dec.kind != MethodKind::Dmdc)
        throw ShapeError(kModule, "reconstruct_forced expects a DMDc decomposition");
    if (!dec.reduced_B) throw MissingInputs(kModule, "decomposition carries no input operator");
    if (x1.size() != dec.basis_U.rows())
        throw ShapeError(kModule, "initial snapshot length does not match basis rows");
    if (inputs.rows() != dec.reduced_B->cols())
        throw ShapeError(kModule, "input row count does not match the input operator");
    const int steps = static_cast<int>(inputs.cols());
    if (steps < 1) throw ShapeError(kModule, "need at least one input column");

    Eigen::MatrixXd out(dec.basis_U.rows(), steps);
    Eigen::VectorXd z = dec.basis_U.transpose() * x1;
    for (int j = 0; j < steps; ++j) {
        out.col(j) = dec.basis_U * z;
        if (j + 1 < steps) z = dec.reduced_A * z + *dec.reduced_B * inputs.col(j);
    }
    return out;
}

}  // namespace modalkit
