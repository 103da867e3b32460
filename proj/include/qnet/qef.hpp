#ifndef QNET_QEF_HPP
#define QNET_QEF_HPP

#include <string>
#include <vector>

#include "qnet/spectral.hpp"

namespace qnet {

/// Tensor quadrature grid over T^nu x R: uniform torus nodes with weight
/// (2 pi / N)^nu, Gauss-Legendre nodes u in (-pi/2, pi/2) mapped by
/// lambda = tan(u) with weights w / cos^2(u).
struct QuadratureGrid {
    std::vector<Eigen::VectorXd> sigmaNodes;
    double sigmaWeight = 0.0;
    std::vector<double> lambdaNodes;
    std::vector<double> lambdaWeights;
    int nSigma = 0, nLambda = 0;
};

QuadratureGrid makeGrid(int nu, int nSigma = 64, int nLambda = 257, bool allowLargeNu = false);

/// Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
void gaussLegendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Hermitian matrix functions cosh(theta H), sinhc(theta H), tanhc(theta H)
/// via eigendecomposition; tanhc spectra lie in (0, 1].
struct MatrixTrig {
    Eigen::MatrixXcd coshM, sinhcM, tanhcM;
    Eigen::VectorXd eigH; ///< eigenvalues of H
};

MatrixTrig matrixTrig(const Eigen::MatrixXcd& H, double theta, double hermTol = 1e-12);

/// -ln det D_theta at one sample, routed through H = -i Psi:
///   ln det cosh(theta H) + ln det(I - theta T^{1/2} Phi T^{1/2}),
/// T = tanhc(theta H).  Real and >= 0 under admissibility.
/// Throws NotAdmissible when theta lambda_max(T^{1/2} Phi T^{1/2}) >= 1 - tol.
double qefIntegrand(const Eigen::MatrixXcd& Phi, const Eigen::MatrixXcd& Psi, double theta,
                    double tol = 1e-10);

/// theta * lambda_max(T^{1/2} Phi T^{1/2}) at one sample.
double admissibilityLoad(const Eigen::MatrixXcd& Phi, const Eigen::MatrixXcd& Psi, double theta);

/// 1 - theta * max over the grid of lambda_max(Phi tanc(theta Psi)).
double admissibilityMargin(const WeightedNetwork& wnet, double theta, const QuadratureGrid& grid);

/// Bisection for the admissibility boundary; returns +infinity sentinel
/// (1e3) when the margin stays above tol at theta = 1e3.
double maxAdmissibleTheta(const WeightedNetwork& wnet, const QuadratureGrid& grid, double tol = 1e-6);
constexpr double kThetaSentinel = 1e3;

struct RateResult {
    double value = 0.0;
    double errEstimate = 0.0; ///< deviation from the half-density grid
};

/// Spatio-temporal QEF growth rate
/// Upsilon(theta) = (2 (2 pi)^{nu+1})^{-1} * sum of weights * (-ln det D_theta).
RateResult qefRate(const WeightedNetwork& wnet, double theta, const QuadratureGrid& grid);

/// Temporal rate for a fixed fragment, per Phi_G / Psi_G:
/// Upsilon_{theta,G} = -(4 pi)^{-1} * sum_lambda w * ln det D_{theta,G}(lambda).
double temporalRateFragment(const WeightedNetwork& wnet, const Fragment& G, double theta,
                            const QuadratureGrid& grid);

/// Classical limit -(2 (2 pi)^{nu+1})^{-1} * integral of ln det(I - theta Phi).
/// Throws NotAdmissible when theta >= 1 / sup lambda_max(Phi) - tol.
double classicalRate(const WeightedNetwork& wnet, double theta, const QuadratureGrid& grid,
                     double tol = 1e-10);

/// Classical admissibility bound theta_* = 1 / ||F||_inf^2 on the grid.
double classicalThetaStar(const WeightedNetwork& wnet, const QuadratureGrid& grid);

struct RateRecord {
    double theta = 0.0;
    double upsilon = 0.0;
    double margin = 0.0;
    std::string method;
};

using RateProfile = std::vector<RateRecord>;

/// Riccati homotopy: per grid node integrate U' = Psi^2 + U^2, U_0 = Phi,
/// by fixed-step RK4; Upsilon'(theta) by quadrature of Tr U, Upsilon by
/// composite trapezoid in theta.  Every checkpointInterval steps U is
/// compared against the direct closed form and HomotopyDiverged is thrown
/// when the deviation exceeds checkpointTol.
RateProfile homotopyRate(const WeightedNetwork& wnet, double thetaMax, int nSteps,
                         const QuadratureGrid& grid, int checkpointInterval = 10,
                         double checkpointTol = 1e-6);

/// Direct U_theta = D_theta^{-1} (Phi cos(theta Psi) + Psi sin(theta Psi)),
/// evaluated through H = -i Psi.
Eigen::MatrixXcd homotopyDirect(const Eigen::MatrixXcd& Phi, const Eigen::MatrixXcd& Psi,
                                double theta);

/// Small-theta expansion: classical rate plus the theta^2 commutator
/// correction; error O(theta^4).
double smallThetaExpansion(const WeightedNetwork& wnet, double theta, const QuadratureGrid& grid);

/// Mean square cost rate (2 (2 pi)^nu)^{-1} * integral Tr(S P S*) d sigma.
double meanSquareRate(const WeightedNetwork& wnet, const QuadratureGrid& grid);

/// Cross-check route via (2 (2 pi)^{nu+1})^{-1} * integral Tr Phi.
double meanSquareRateViaPhi(const WeightedNetwork& wnet, const QuadratureGrid& grid);

/// min over thetaGrid of (Upsilon(theta) - alpha theta); upper bound on the
/// spatio-temporal log-tail rate.
double tailBound(const WeightedNetwork& wnet, double alpha, const std::vector<double>& thetaGrid,
                 const QuadratureGrid& grid);

} // namespace qnet

#endif
