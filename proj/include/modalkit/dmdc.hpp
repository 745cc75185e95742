#pragma once

#include "modalkit/dmd.hpp"

namespace modalkit {

/// Intermediate factors of the two-SVD DMDc fit, kept for verification.
struct DmdcInternals {
    Eigen::MatrixXd Up1;  // state-rows x p
    Eigen::MatrixXd Up2;  // input-rows x p
    Eigen::VectorXd Sp;   // length p
    Eigen::MatrixXd Vp;   // cols x p
    Eigen::MatrixXd Ur;   // state-rows x r
};

/// Joint fit of the dynamic and input operators from the (X1, X2, U1)
/// trio. r is clamped to p after both policies are evaluated.
ModalDecomposition fit_dmdc(const SnapshotMatrices& snap, const RankPolicy& policy_p,
                            const RankPolicy& policy_r,
                            DmdcInternals* internals = nullptr);

/// Reduced-system propagation z_{j+1} = Abar z_j + Bbar u_j from
/// z_1 = Ur^T x1; returns the lifted states Ur z_j, one column per step.
Eigen::MatrixXd reconstruct_forced(const ModalDecomposition& dec, const Eigen::VectorXd& x1,
                                   const Eigen::MatrixXd& inputs);

}  // namespace modalkit
