#pragma once

#include <optional>
#include <vector>

#include "modalkit/numerics.hpp"
#include "modalkit/snapshots.hpp"

namespace modalkit {

enum class MethodKind { Dmd, Dmdc };

/// Result of a DMD or DMDc fit: discrete-time eigenvalues, exact modes,
/// amplitudes fit on the first stacked snapshot, and the reduced operators.
struct ModalDecomposition {
    MethodKind kind = MethodKind::Dmd;
    Eigen::VectorXcd eigenvalues;          // length r
    Eigen::MatrixXcd exact_modes;          // rows(X1) x r
    Eigen::VectorXcd amplitudes;           // length r
    Eigen::MatrixXd reduced_A;             // r x r
    std::optional<Eigen::MatrixXd> reduced_B;  // r x input-rows (DMDc)
    Eigen::MatrixXd basis_U;               // rows(X1) x r projection basis
    std::vector<Eigen::VectorXd> singular_values;  // retained S per SVD
    int rank_r = 0;
    std::optional<int> rank_p;
    double dt = 0.0;
};

/// Unforced best-fit operator from the snapshot pair; inputs, if present,
/// are ignored.
ModalDecomposition fit_dmd(const SnapshotMatrices& snap, const RankPolicy& policy);

/// Modal propagation Re(Phi * Lambda^j * b), j = 0..steps-1, with b fit
/// from x1 by least squares.
Eigen::MatrixXd reconstruct(const ModalDecomposition& dec, const Eigen::VectorXd& x1,
                            int steps);

/// Minimum-norm least-squares amplitudes for an arbitrary initial snapshot.
Eigen::VectorXcd mode_amplitudes(const ModalDecomposition& dec, const Eigen::VectorXd& x1);

/// Magnitude of the imaginary residue a real-part reconstruction drops;
/// diagnostic for conjugate closure.
double reconstruction_imag_residue(const ModalDecomposition& dec, const Eigen::VectorXd& x1,
                                   int steps);

}  // namespace modalkit
