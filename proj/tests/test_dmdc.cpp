#include <doctest.h>

#include <numbers>
#include <random>

#include "helpers.hpp"
#include "modalkit/dmdc.hpp"
#include "modalkit/errors.hpp"
#include "modalkit/simulator.hpp"

using namespace modalkit;

namespace {

// Discrete forced iteration x_{j+1} = A x_j + B u_j; the brute-force oracle.
Eigen::MatrixXd iterate_forced(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                               const Eigen::VectorXd& x0, const Eigen::MatrixXd& u) {
    const int n = static_cast<int>(u.cols()) + 1;
    Eigen::MatrixXd out(x0.size(), n);
    out.col(0) = x0;
    for (int j = 1; j < n; ++j) out.col(j) = A * out.col(j - 1) + B * u.col(j - 1);
    return out;
}

SnapshotMatrices forced_snapshots(const Eigen::MatrixXd& states, const Eigen::MatrixXd& u,
                                  double dt) {
    TimeSeries series = testutil::series_from_matrix(states, dt);
    Channel input;
    input.name = "u";
    input.role = ChannelRole::Input;
    input.values = Eigen::VectorXd(states.cols());
    input.values.head(u.cols()) = u.row(0).transpose();
    input.values.tail(1).setZero();  // trailing sample unused by X1 alignment
    series.channels.push_back(std::move(input));
    return build_pairs(series, 1);
}

}  // namespace

TEST_CASE("forced 2-state system: operators recovered to 1e-6") {
    const double rho = 0.99, theta = 0.1;
    Eigen::Matrix2d a;
    a << rho * std::cos(theta), -rho * std::sin(theta),
         rho * std::sin(theta), rho * std::cos(theta);
    const Eigen::Vector2d b(1.0, 0.0);
    Eigen::MatrixXd u(1, 499);
    for (int j = 0; j < 499; ++j) u(0, j) = std::sin(0.05 * j);
    const Eigen::MatrixXd states = iterate_forced(a, b, Eigen::Vector2d(0.5, -0.2), u);

    DmdcInternals internals;
    const ModalDecomposition dec = fit_dmdc(forced_snapshots(states, u, 0.01),
                                            RankPolicy::fixed(3), RankPolicy::fixed(2),
                                            &internals);
    Eigen::VectorXcd want(2);
    want << std::polar(rho, theta), std::polar(rho, -theta);
    CHECK(testutil::eig_multiset_distance(want, dec.eigenvalues) < 1e-6);

    REQUIRE(dec.reduced_B.has_value());
    const Eigen::MatrixXd lifted_B = dec.basis_U * *dec.reduced_B;
    CHECK((lifted_B - b).cwiseAbs().maxCoeff() < 1e-6);

    // Internals invariants: stacked U_p and U_r have orthonormal columns.
    Eigen::MatrixXd up(internals.Up1.rows() + internals.Up2.rows(), internals.Up1.cols());
    up << internals.Up1, internals.Up2;
    const int p = static_cast<int>(up.cols());
    CHECK((up.transpose() * up - Eigen::MatrixXd::Identity(p, p)).norm() < 1e-10);
    CHECK((internals.Ur.transpose() * internals.Ur - Eigen::Matrix2d::Identity()).norm() <
          1e-10);
    CHECK(dec.rank_r <= *dec.rank_p);
}

TEST_CASE("zero input reduces DMDc to DMD") {
    std::mt19937_64 rng(53);
    const LtiSystem sys = testutil::random_stable_system(rng, 3, 0.01);
    TimeSeries series = simulate(sys, Eigen::MatrixXd::Zero(1, 300), SimMethod::ExactZoh);
    TimeSeries states_only = series;
    states_only.channels.pop_back();

    const SnapshotMatrices forced = build_pairs(series, 1);
    const SnapshotMatrices unforced = build_pairs(states_only, 1);
    const ModalDecomposition dmdc =
        fit_dmdc(forced, RankPolicy::fixed(3), RankPolicy::fixed(3));
    const ModalDecomposition dmd = fit_dmd(unforced, RankPolicy::fixed(3));
    CHECK(testutil::eig_multiset_distance(dmd.eigenvalues, dmdc.eigenvalues) < 1e-8);
    CHECK(dmdc.reduced_B->norm() < 1e-10);
}

TEST_CASE("converter averaged model: discrete eigenvalues match the Eq-map oracle") {
    ConverterParams params;  // Table-like defaults, duty 0.8, R_n = 0.1
    const double dt = 4e-4;
    auto [sys, inputs] = converter_system(params, dt, 2001, Eigen::Vector2d(0.0, 170.0));
    const TimeSeries series = simulate(sys, inputs, SimMethod::ExactZoh, {"i_n", "u_dc"},
                                       {"u_n"});
    const ModalDecomposition dec =
        fit_dmdc(build_pairs(series, 1), RankPolicy::fixed(3), RankPolicy::fixed(2));
    CHECK(testutil::eig_multiset_distance(analytic_discrete_eigs(sys), dec.eigenvalues) < 1e-6);
}

TEST_CASE("forced-system separation: DMDc beats state-only DMD by 1000x") {
    ConverterParams params;
    const double dt = 4e-4;
    auto [sys, inputs] = converter_system(params, dt, 2001, Eigen::Vector2d(0.0, 170.0));
    const TimeSeries series = simulate(sys, inputs, SimMethod::ExactZoh, {"i_n", "u_dc"},
                                       {"u_n"});
    const Eigen::VectorXcd truth = analytic_discrete_eigs(sys);

    const ModalDecomposition dmdc =
        fit_dmdc(build_pairs(series, 1), RankPolicy::fixed(3), RankPolicy::fixed(2));
    TimeSeries states_only = series;
    states_only.channels.pop_back();
    const ModalDecomposition dmd = fit_dmd(build_pairs(states_only, 1), RankPolicy::fixed(2));

    CHECK(testutil::eig_multiset_distance(truth, dmdc.eigenvalues) < 1e-6);
    CHECK(testutil::eig_multiset_distance(truth, dmd.eigenvalues) > 1e-3);
}

TEST_CASE("reconstruct_forced fixtures") {
    SUBCASE("zero input, identity dynamics") {
        ModalDecomposition dec;
        dec.kind = MethodKind::Dmdc;
        dec.basis_U = Eigen::Matrix2d::Identity();
        dec.reduced_A = Eigen::Matrix2d::Identity();
        dec.reduced_B = Eigen::MatrixXd::Zero(2, 1);
        dec.rank_r = 2;
        const Eigen::MatrixXd traj =
            reconstruct_forced(dec, Eigen::Vector2d(1.0, -2.0), Eigen::MatrixXd::Zero(1, 5));
        for (int j = 0; j < 5; ++j) {
            CHECK(traj(0, j) == doctest::Approx(1.0));
            CHECK(traj(1, j) == doctest::Approx(-2.0));
        }
    }
    SUBCASE("one-step memory: Abar = 0, Bbar = I, unit impulse") {
        ModalDecomposition dec;
        dec.kind = MethodKind::Dmdc;
        dec.basis_U = Eigen::Matrix2d::Identity();
        dec.reduced_A = Eigen::Matrix2d::Zero();
        dec.reduced_B = Eigen::Matrix2d::Identity();
        dec.rank_r = 2;
        Eigen::MatrixXd u = Eigen::MatrixXd::Zero(2, 4);
        u(0, 1) = 1.0;  // impulse at step 2
        const Eigen::MatrixXd traj = reconstruct_forced(dec, Eigen::Vector2d(3.0, 0.0), u);
        CHECK(traj(0, 0) == doctest::Approx(3.0));
        CHECK(traj.col(1).norm() == doctest::Approx(0.0));
        CHECK(traj(0, 2) == doctest::Approx(1.0));  // delayed lifted impulse
        CHECK(traj.col(3).norm() == doctest::Approx(0.0));
    }
}

TEST_CASE("forced reconstruction of the converter dataset is tight") {
    ConverterParams params;
    const double dt = 4e-4;
    auto [sys, inputs] = converter_system(params, dt, 2001, Eigen::Vector2d(0.0, 170.0));
    const TimeSeries series = simulate(sys, inputs, SimMethod::ExactZoh, {"i_n", "u_dc"},
                                       {"u_n"});
    const SnapshotMatrices snap = build_pairs(series, 1);
    const ModalDecomposition dec =
        fit_dmdc(snap, RankPolicy::fixed(3), RankPolicy::fixed(2));
    const Eigen::MatrixXd recon = reconstruct_forced(dec, snap.X1.col(0), *snap.U1);
    CHECK(testutil::relative_error(recon, snap.X1) < 1e-3);
}

TEST_CASE("Eq-18 consistency: lifted operators explain X2 on full-rank data") {
    const double rho = 0.95, theta = 0.3;
    Eigen::Matrix2d a;
    a << rho * std::cos(theta), -rho * std::sin(theta),
         rho * std::sin(theta), rho * std::cos(theta);
    const Eigen::Vector2d b(0.4, -1.1);
    Eigen::MatrixXd u(1, 399);
    for (int j = 0; j < 399; ++j) u(0, j) = std::cos(0.07 * j) + 0.5 * std::sin(0.21 * j);
    const Eigen::MatrixXd states = iterate_forced(a, b, Eigen::Vector2d(1.0, 1.0), u);
    const SnapshotMatrices snap = forced_snapshots(states, u, 0.01);
    const ModalDecomposition dec =
        fit_dmdc(snap, RankPolicy::fixed(3), RankPolicy::fixed(2));

    const Eigen::MatrixXd lifted_A = dec.basis_U * dec.reduced_A * dec.basis_U.transpose();
    const Eigen::MatrixXd lifted_B = dec.basis_U * *dec.reduced_B;
    const Eigen::MatrixXd predicted = lifted_A * snap.X1 + lifted_B * *snap.U1;
    CHECK((snap.X2 - predicted).norm() / snap.X2.norm() < 1e-8);
}

TEST_CASE("exact modes satisfy Phi Lambda = lifted-A Phi") {
    ConverterParams params;
    auto [sys, inputs] = converter_system(params, 4e-4, 1001, Eigen::Vector2d(0.0, 170.0));
    const TimeSeries series = simulate(sys, inputs, SimMethod::ExactZoh, {"i_n", "u_dc"},
                                       {"u_n"});
    const ModalDecomposition dec =
        fit_dmdc(build_pairs(series, 1), RankPolicy::fixed(3), RankPolicy::fixed(2));
    const Eigen::MatrixXcd lifted_A =
        (dec.basis_U * dec.reduced_A * dec.basis_U.transpose()).cast<std::complex<double>>();
    const Eigen::MatrixXcd lhs = dec.exact_modes * dec.eigenvalues.asDiagonal();
    const Eigen::MatrixXcd rhs = lifted_A * dec.exact_modes;
    CHECK((lhs - rhs).norm() < 1e-8 * dec.exact_modes.norm());
}

TEST_CASE("fit_dmdc error paths") {
    Eigen::MatrixXd states = Eigen::MatrixXd::Random(2, 30);
    SnapshotMatrices snap =
        build_pairs(testutil::series_from_matrix(states, 0.01), 1);
    CHECK_THROWS_AS(fit_dmdc(snap, RankPolicy::fixed(2), RankPolicy::fixed(2)), MissingInputs);

    Eigen::MatrixXd u = Eigen::MatrixXd::Random(1, 29);
    const SnapshotMatrices forced = forced_snapshots(states, u, 0.01);
    CHECK_THROWS_AS(fit_dmdc(forced, RankPolicy::fixed(2), RankPolicy::fixed(3)),
                    RankOrderViolation);

    ModalDecomposition dmd_dec;
    dmd_dec.kind = MethodKind::Dmd;
    CHECK_THROWS_AS(reconstruct_forced(dmd_dec, Eigen::Vector2d(1, 1),
                                       Eigen::MatrixXd::Zero(1, 3)),
                    ShapeError);
}
