#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"

using namespace qnet;
using namespace qnet::testing;

TEST_CASE("benchmark dynamics have the closed form A=-I, B=J, C=2J, D=I") {
    const NetworkSpec spec = benchmarkSpec();
    const DynamicsKernels dyn = assembleDynamics(spec);
    const Eigen::MatrixXd J = ccrSymplectic(2);
    CHECK((dyn.A.at({0}) + Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-14);
    CHECK((dyn.B.at({0}) - J).norm() < 1e-14);
    CHECK((dyn.C.at({0}) - 2.0 * J).norm() < 1e-14);
    CHECK((dyn.D.at({0}) - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("benchmark transfer function is (s-1)/(s+1) I") {
    const DynamicsKernels dyn = assembleDynamics(benchmarkSpec());
    Eigen::VectorXd sigma(1);
    sigma << 1.3;
    const std::complex<double> s(0.7, 0.4);
    const Eigen::MatrixXcd F = transferFunction(dyn, sigma, s);
    const std::complex<double> expected = (s - 1.0) / (s + 1.0);
    CHECK((F - expected * Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-13);
}

TEST_CASE("PR residuals vanish for randomized finite-range networks") {
    std::mt19937 rng(21);
    const auto grid = torusGrid(1, 9);
    for (int trial = 0; trial < 100; ++trial) {
        const NetworkSpec spec = randomNetwork(rng);
        spec.validate();
        const DynamicsKernels dyn = assembleDynamics(spec);
        const PrResiduals pr = prResiduals(dyn, spec.theta, grid);
        CHECK(pr.pr1 <= 1e-12);
        CHECK(pr.pr2 <= 1e-12);
        CHECK(pr.pr3 <= 1e-12); // D is a symplectic gain by construction
    }
}

TEST_CASE("PR3 fails for a non-symplectic gain and holds for symplectic ones") {
    std::mt19937 rng(22);
    NetworkSpec spec = randomNetwork(rng);
    spec.D = RealKernel(1, spec.r, spec.m);
    spec.D.set({0}, 2.0 * Eigen::MatrixXd::Identity(spec.r, spec.m));
    const PrResiduals pr = prResiduals(assembleDynamics(spec), spec.theta, torusGrid(1, 5));
    CHECK(pr.pr1 <= 1e-12);
    CHECK(pr.pr2 <= 1e-12);
    CHECK(pr.pr3 > 1e-3);
}

TEST_CASE("(J,J)-unitarity holds at random regular samples") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const NetworkSpec spec = randomNetwork(rng);
    const DynamicsKernels dyn = assembleDynamics(spec);
    std::vector<std::pair<Eigen::VectorXd, std::complex<double>>> samples;
    for (int k = 0; k < 20; ++k) {
        Eigen::VectorXd sigma(1);
        sigma << u(rng);
        samples.emplace_back(sigma, std::complex<double>(u(rng), 5.0 + u(rng)));
    }
    CHECK(jjUnitarityResidual(dyn, samples) <= 1e-10);
}

TEST_CASE("samples near the symbol spectrum are refused") {
    const DynamicsKernels dyn = assembleDynamics(benchmarkSpec()); // spectrum {-1}
    Eigen::VectorXd sigma = Eigen::VectorXd::Zero(1);
    std::vector<std::pair<Eigen::VectorXd, std::complex<double>>> bad{
        {sigma, std::complex<double>(-1.0 + 1e-9, 0.0)}};
    CHECK_THROWS_AS(jjUnitarityResidual(dyn, bad), SampleTooCloseToSpectrum);
    // mirrored spectrum of -A(-sigma) is {+1}
    std::vector<std::pair<Eigen::VectorXd, std::complex<double>>> bad2{
        {sigma, std::complex<double>(1.0, 1e-9)}};
    CHECK_THROWS_AS(jjUnitarityResidual(dyn, bad2), SampleTooCloseToSpectrum);
}

TEST_CASE("stability margin and derivative bound") {
    const auto grid = torusGrid(1, 33);
    CHECK(stabilityMargin(assembleDynamics(benchmarkSpec()), grid) == doctest::Approx(1.0));
    const DynamicsKernels chain = assembleDynamics(coupledChainSpec(0.1));
    CHECK(stabilityMargin(chain, grid) > 0.0);
    // sum_l |l| ||A_l||: two offset-1 blocks 0.1 J with unit largest singular value
    CHECK(symbolDerivativeBound(chain.A) == doctest::Approx(0.2));
}

TEST_CASE("benchmark invariant covariance is I/2 with tiny ALE residual") {
    const DynamicsKernels dyn = assembleDynamics(benchmarkSpec());
    for (const auto& sigma : torusGrid(1, 16)) {
        const Eigen::MatrixXcd P = invariantCovarianceSft(dyn, sigma);
        CHECK((P - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-12);
        const Eigen::MatrixXcd A = dyn.A.sft(sigma);
        const Eigen::MatrixXcd B = dyn.B.sft(sigma);
        CHECK((A * P + P * A.adjoint() + B * B.adjoint()).norm() <= 1e-11);
    }
}

TEST_CASE("Kronecker ALE solve agrees with the integral oracle") {
    const DynamicsKernels dyn = assembleDynamics(coupledChainSpec(0.15));
    for (const auto& sigma : torusGrid(1, 7)) {
        const Eigen::MatrixXcd A = dyn.A.sft(sigma);
        const Eigen::MatrixXcd B = dyn.B.sft(sigma);
        const Eigen::MatrixXcd P = invariantCovarianceSft(dyn, sigma);
        const Eigen::MatrixXcd Pint = covarianceByIntegral(A, B);
        CHECK((P - Pint).norm() < 1e-8);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(P, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() >= -1e-12); // PSD
    }
}

TEST_CASE("non-Hurwitz symbols are rejected") {
    NetworkSpec spec = benchmarkSpec();
    spec.R.set({0}, 5.0 * (Eigen::MatrixXd(2, 2) << 0, 1, 1, 0).finished());
    const DynamicsKernels dyn = assembleDynamics(spec);
    const auto grid = torusGrid(1, 8);
    CHECK(stabilityMargin(dyn, grid) < 0.0);
    CHECK_THROWS_AS(invariantCovarianceSft(dyn, grid.front()), NotHurwitz);
}

TEST_CASE("covariance kernel blocks are real with P_0 = I/2 on the benchmark") {
    const DynamicsKernels dyn = assembleDynamics(benchmarkSpec());
    const auto grid = torusGrid(1, 32);
    const CovarianceTable table = invariantCovarianceKernel(dyn, grid, {{0}, {1}, {-1}});
    CHECK(table.maxImagPart <= 1e-12);
    CHECK((table.blocks.at({0}) - 0.5 * Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
    CHECK(table.blocks.at({1}).norm() < 1e-12); // site-decoupled
}

TEST_CASE("spec validation names the offending invariant") {
    NetworkSpec spec = benchmarkSpec();
    spec.R.set({1}, Eigen::MatrixXd::Identity(2, 2));
    spec.R.set({-1}, 2.0 * Eigen::MatrixXd::Identity(2, 2));
    CHECK_THROWS_WITH_AS(spec.validate(), "R symmetry at offset [1]", InvariantViolation);

    NetworkSpec odd = benchmarkSpec();
    odd.n = 3;
    CHECK_THROWS_AS(odd.validate(), InvariantViolation);

    NetworkSpec sym = benchmarkSpec();
    sym.theta(0, 0) = 1.0;
    CHECK_THROWS_AS(sym.validate(), InvariantViolation);
}

TEST_CASE("series composition multiplies transfer functions") {
    const NetworkSpec up = benchmarkSpec();
    const NetworkSpec down = coupledChainSpec(0.05);
    const SeriesComposite comp = composeSeries(up, down);
    CHECK(comp.theta.rows() == 4);
    CHECK((comp.theta.topLeftCorner(2, 2) - up.theta).norm() < 1e-15);
    CHECK((comp.theta.bottomRightCorner(2, 2) - down.theta).norm() < 1e-15);
    CHECK(comp.theta.topRightCorner(2, 2).norm() == doctest::Approx(0.0));

    const DynamicsKernels d1 = assembleDynamics(up);
    const DynamicsKernels d2 = assembleDynamics(down);
    for (const auto& sigma : torusGrid(1, 5)) {
        const std::complex<double> s(0.3, 0.9);
        const Eigen::MatrixXcd lhs = transferFunction(comp.dyn, sigma, s);
        const Eigen::MatrixXcd rhs = transferFunction(d2, sigma, s) * transferFunction(d1, sigma, s);
        CHECK((lhs - rhs).norm() < 1e-12);
    }
}

TEST_CASE("series composite stays physically realizable") {
    const SeriesComposite comp = composeSeries(benchmarkSpec(), coupledChainSpec(0.05));
    const PrResiduals pr = prResiduals(comp.dyn, comp.theta, torusGrid(1, 9));
    CHECK(pr.pr1 <= 1e-12);
    CHECK(pr.pr2 <= 1e-12);
    CHECK(pr.pr3 <= 1e-12);
}

TEST_CASE("composite energy and coupling symbols reproduce the dynamics") {
    // A(sigma) = 2 Theta (R(sigma) + M(sigma)* J M(sigma)) must hold for the
    // composite R, M read back from the interconnection formulas.
    const SeriesComposite comp = composeSeries(benchmarkSpec(), coupledChainSpec(0.05));
    const Eigen::MatrixXd Jm = ccrSymplectic(2); // J of the upstream input field
    for (const auto& sigma : torusGrid(1, 7)) {
        const Eigen::MatrixXcd Rc = comp.energySft(sigma);
        const Eigen::MatrixXcd Mc = comp.couplingSft(sigma);
        CHECK((Rc - Rc.adjoint()).norm() < 1e-12);
        const Eigen::MatrixXcd A =
            2.0 * comp.theta * (Rc + Mc.adjoint() * Jm.cast<std::complex<double>>() * Mc);
        CHECK((A - comp.dyn.A.sft(sigma)).norm() < 1e-12);
    }
}
