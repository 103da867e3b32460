#ifndef QNET_TEST_HELPERS_HPP
#define QNET_TEST_HELPERS_HPP

#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "qnet/spectral.hpp"

namespace qnet::testing {

// Closed-form reference network: nu=1, n=m=r=2, Theta = J/2, R = 0,
// M = D = identity at offset 0.  A = -I, B = J, P = I/2, F(i lambda) = J/(1+i lambda),
// Phi = mu I, Psi = mu J with mu = 1/(1+lambda^2), Upsilon(theta) = theta/2.
inline NetworkSpec benchmarkSpec() {
    NetworkSpec spec;
    spec.nu = 1;
    spec.n = spec.m = spec.r = 2;
    spec.theta = 0.5 * ccrSymplectic(2);
    spec.R = RealKernel(1, 2, 2);
    spec.M = RealKernel(1, 2, 2);
    spec.D = RealKernel(1, 2, 2);
    spec.M.set({0}, Eigen::MatrixXd::Identity(2, 2));
    spec.D.set({0}, Eigen::MatrixXd::Identity(2, 2));
    return spec;
}

inline RealKernel identityWeighting(int nu, int n) {
    RealKernel S(nu, n, n);
    S.set(Offset(nu, 0), Eigen::MatrixXd::Identity(n, n));
    return S;
}

inline WeightedNetwork benchmarkNetwork() {
    return WeightedNetwork(benchmarkSpec(), identityWeighting(1, 2));
}

/// Benchmark plus nearest-neighbour energy coupling R_{+1} = R_{-1} = c I.
inline NetworkSpec coupledChainSpec(double c = 0.1) {
    NetworkSpec spec = benchmarkSpec();
    spec.R.set({1}, c * Eigen::MatrixXd::Identity(2, 2));
    spec.R.set({-1}, c * Eigen::MatrixXd::Identity(2, 2));
    return spec;
}

inline WeightedNetwork coupledChainNetwork(double c = 0.1) {
    return WeightedNetwork(coupledChainSpec(c), identityWeighting(1, 2));
}

/// Chain with R_{+1} = R_{-1} = c diag(1, -1).  Unlike the isotropic
/// coupling, this does not commute with J, so the spectral densities depend
/// on sigma in an essential way (finite fragments converge at rate 1/L and
/// the admissibility boundary is finite).
inline NetworkSpec skewChainSpec(double c = 0.1) {
    NetworkSpec spec = benchmarkSpec();
    Eigen::MatrixXd E(2, 2);
    E << 1, 0, 0, -1;
    spec.R.set({1}, c * E);
    spec.R.set({-1}, c * E);
    return spec;
}

inline WeightedNetwork skewChainNetwork(double c = 0.1) {
    return WeightedNetwork(skewChainSpec(c), identityWeighting(1, 2));
}

inline Eigen::MatrixXd randomMatrix(std::mt19937& rng, int rows, int cols, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Eigen::MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) M(i, j) = u(rng);
    return M;
}

/// Random element of Sp(m): exp(J S) with S symmetric leaves J invariant.
inline Eigen::MatrixXd randomSymplectic(std::mt19937& rng, int m, double scale = 0.3) {
    const Eigen::MatrixXd J = ccrSymplectic(m);
    Eigen::MatrixXd S = randomMatrix(rng, m, m, scale);
    S = 0.5 * (S + S.transpose()).eval();
    return (J * S).exp();
}

/// Random finite-range network with the PR structure baked in: Theta = J/2
/// rotated by a random orthogonal congruence stays antisymmetric; R symmetric
/// kernel with range 1; M random range-1; D a symplectic gain at offset 0.
inline NetworkSpec randomNetwork(std::mt19937& rng, int nu = 1, int n = 4, int m = 2) {
    NetworkSpec spec;
    spec.nu = nu;
    spec.n = n;
    spec.m = m;
    spec.r = m;
    Eigen::MatrixXd T = randomMatrix(rng, n, n, 0.5);
    spec.theta = 0.5 * ccrSymplectic(n) + 0.25 * (T - T.transpose());

    spec.R = RealKernel(nu, n, n);
    spec.M = RealKernel(nu, m, n);
    spec.D = RealKernel(nu, m, m);
    Eigen::MatrixXd R0 = randomMatrix(rng, n, n);
    spec.R.set(Offset(nu, 0), 0.5 * (R0 + R0.transpose()));
    for (int k = 0; k < nu; ++k) {
        Offset e(nu, 0);
        e[k] = 1;
        const Eigen::MatrixXd Rk = randomMatrix(rng, n, n, 0.5);
        spec.R.set(e, Rk);
        spec.R.set(negate(e), Rk.transpose());
        spec.M.set(e, randomMatrix(rng, m, n, 0.5));
    }
    spec.M.set(Offset(nu, 0), randomMatrix(rng, m, n));
    spec.D.set(Offset(nu, 0), randomSymplectic(rng, m));
    return spec;
}

/// Independent invariant covariance oracle: P = integral_0^inf e^{tA} BB* e^{tA*} dt
/// by Gauss-Legendre after t = u/(1-u), evaluated with dense matrix exponentials.
inline Eigen::MatrixXcd covarianceByIntegral(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                                             int nNodes = 240) {
    Eigen::MatrixXd Jac = Eigen::MatrixXd::Zero(nNodes, nNodes);
    for (int k = 1; k < nNodes; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        Jac(k, k - 1) = Jac(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Jac);
    const Eigen::MatrixXcd BBs = B * B.adjoint();
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(A.rows(), A.cols());
    for (int k = 0; k < nNodes; ++k) {
        const double u = 0.5 * (es.eigenvalues()[k] + 1.0); // map [-1,1] -> (0,1)
        const double w0 = es.eigenvectors()(0, k);
        const double w = 2.0 * w0 * w0 * 0.5;
        const double t = u / (1.0 - u);
        const double jac = 1.0 / ((1.0 - u) * (1.0 - u));
        const Eigen::MatrixXcd E = (t * A).exp();
        P += (w * jac) * E * BBs * E.adjoint();
    }
    return P;
}

} // namespace qnet::testing

#endif
