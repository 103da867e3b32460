#ifndef QNET_NETWORK_HPP
#define QNET_NETWORK_HPP

#include <complex>
#include <optional>
#include <vector>

#include "qnet/lattice.hpp"

namespace qnet {

/// Physical description of a translation invariant network: CCR matrix
/// Theta, energy kernel R (n x n, R_{-ell} = R_ell^T), coupling kernel M
/// (m x n) and field gain kernel D (r x m).
struct NetworkSpec {
    int nu = 1;
    int n = 2, m = 2, r = 2;
    Eigen::MatrixXd theta;
    RealKernel R{1, 2, 2};
    RealKernel M{1, 2, 2};
    RealKernel D{1, 2, 2};

    /// Throws InvariantViolation naming the violated invariant.
    void validate() const;
};

/// QSDE coefficient kernels A (n x n), B (n x m), C (r x n), D (r x m).
struct DynamicsKernels {
    RealKernel A{1, 2, 2};
    RealKernel B{1, 2, 2};
    RealKernel C{1, 2, 2};
    RealKernel D{1, 2, 2};
};

/// Canonical antisymmetric orthogonal matrix J_k = [[0, I],[-I, 0]], k even.
Eigen::MatrixXd ccrSymplectic(int k);

/// Builds the QSDE coefficient kernels from (Theta, R, M, D):
///   A_ell = 2 Theta (R_ell + sum_c M_c^T J_m M_{ell+c})
///   B_ell = 2 Theta M_{-ell}^T
///   C_ell = 2 sum_c D_{ell-c} J_m M_c
DynamicsKernels assembleDynamics(const NetworkSpec& spec);

struct PrResiduals {
    double pr1 = 0.0; ///< max_sigma || A Theta + Theta A* + B J_m B* ||
    double pr2 = 0.0; ///< max_sigma || Theta C* + B J_m D* ||
    double pr3 = 0.0; ///< max_sigma || D J_m D* - J_r ||
};

PrResiduals prResiduals(const DynamicsKernels& dyn, const Eigen::MatrixXd& theta,
                        const std::vector<Eigen::VectorXd>& sigmaGrid);

/// Transfer function F(sigma,s) = C(sigma)(sI - A(sigma))^{-1} B(sigma) + D(sigma).
Eigen::MatrixXcd transferFunction(const DynamicsKernels& dyn, const Eigen::VectorXd& sigma,
                                  std::complex<double> s);

/// max over samples of || F(sigma,s) J_m F(-sigma,-s)^T - J_r ||.
/// Throws SampleTooCloseToSpectrum when s is within tol of an eigenvalue of
/// A(sigma) or of -A(-sigma).
double jjUnitarityResidual(const DynamicsKernels& dyn,
                           const std::vector<std::pair<Eigen::VectorXd, std::complex<double>>>& samples,
                           double tol = 1e-6);

/// Negated max over the grid of the spectral abscissa of A(sigma); positive
/// iff A(sigma) is Hurwitz at every grid node.
double stabilityMargin(const DynamicsKernels& dyn, const std::vector<Eigen::VectorXd>& sigmaGrid);

/// Lipschitz bound sum_ell |ell|_1 ||A_ell|| on the sigma-derivative of the
/// symbol; used to pad grid stability certificates.
double symbolDerivativeBound(const RealKernel& A);

/// Unique solution of A P + P A* + B B* = 0 at one sigma, via the vectorized
/// n^2 x n^2 Kronecker solve; Hermitian PSD.  Throws NotHurwitz.
Eigen::MatrixXcd invariantCovarianceSft(const DynamicsKernels& dyn, const Eigen::VectorXd& sigma,
                                        double hurwitzTol = 1e-9);

struct CovarianceTable {
    std::vector<Eigen::VectorXd> sigma;
    std::vector<Eigen::MatrixXcd> P;
    /// Inverse-SFT blocks P_ell (trapezoid on the stored uniform grid);
    /// real to tolerance for real networks.
    std::map<Offset, Eigen::MatrixXd> blocks;
    double maxImagPart = 0.0; ///< largest imaginary entry discarded in blocks
};

CovarianceTable invariantCovarianceKernel(const DynamicsKernels& dyn,
                                          const std::vector<Eigen::VectorXd>& sigmaGrid,
                                          const std::vector<Offset>& offsets);

/// Series interconnection: output of `upstream` feeds the input of
/// `downstream` (requires upstream r == downstream m).  Kernel-level
/// realization of the cascaded state-space formula; composite transfer
/// function is the pointwise product F2 F1.
struct SeriesComposite {
    DynamicsKernels dyn;
    Eigen::MatrixXd theta; ///< diag(theta1, theta2)
    int n1 = 0, n2 = 0;
    /// Composite energy SFT R(sigma) (block form with the coupling
    /// cross-terms) and coupling SFT M(sigma), evaluated pointwise.
    Eigen::MatrixXcd energySft(const Eigen::VectorXd& sigma) const;
    Eigen::MatrixXcd couplingSft(const Eigen::VectorXd& sigma) const;

    NetworkSpec upstream, downstream;
};

SeriesComposite composeSeries(const NetworkSpec& upstream, const NetworkSpec& downstream);

} // namespace qnet

#endif
