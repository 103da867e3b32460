#ifndef QNET_ORACLE_HPP
#define QNET_ORACLE_HPP

#include <vector>

#include "qnet/qef.hpp"

namespace qnet {

/// Nystrom discretization of the finite-horizon integral operators on
/// L^2([0,T], C^{G x q}): midpoint nodes, symmetric sqrt(h) weighting so the
/// matrix spectra approximate the operator spectra directly.
struct DiscretizedOperators {
    Fragment G{1, {{0}}};
    double T = 0.0;
    int Nt = 0;
    int q = 0;
    Eigen::MatrixXcd Vhat; ///< Hermitian, lambda_min >= -1e-8
    Eigen::MatrixXcd Lhat; ///< skew-Hermitian
};

DiscretizedOperators discretizeOperators(const WeightedNetwork& wnet, const Fragment& G, double T,
                                         int Nt, int nSigma = 64);

struct ZeroEigReport {
    bool nonzero = false;
    double minAbsEig = 0.0;
};

/// Reports min |eig(Lhat)| against tol; informational, never asserted.
ZeroEigReport checkNoZeroEigs(const DiscretizedOperators& ops, double tol);

/// Finite-horizon log-QEF
///   ln Xi = -1/2 [ ln det cosh(theta H) + ln det(I - theta K^{1/2} Vhat K^{1/2}) ],
/// H = -i Lhat, K = tanhc(theta H).  Throws NotAdmissible when
/// theta lambda_max(K^{1/2} Vhat K^{1/2}) >= 1.
double logQefFinite(const DiscretizedOperators& ops, double theta, double tol = 1e-10);

struct ConvergenceRow {
    double T = 0.0;
    double ratePerT = 0.0;
    double error = 0.0;
};

/// lnXi/(T #G) against the temporal rate for growing horizons.
std::vector<ConvergenceRow> temporalConvergenceStudy(const WeightedNetwork& wnet, const Fragment& G,
                                                     double theta, const std::vector<double>& Tlist,
                                                     int NtPerT, int nSigma = 64);

struct AverageRow {
    double scale = 0.0; ///< L or T
    double lhs = 0.0;
    double rhs = 0.0;
    double error = 0.0;
};

/// Toeplitz averaging: Tr(prod restrict(f_s, cube L)) / L^nu against the
/// torus integral of Tr prod SFT.
std::vector<AverageRow> toeplitzAverageCheck(const std::vector<RealKernel>& kernels,
                                             const std::vector<int>& Llist, int nSigma = 64);

/// Operator averaging: Tr(Vhat^N)/T against (2 pi)^{-1} integral Tr Phi_G^N.
std::vector<AverageRow> operatorAverageCheck(const WeightedNetwork& wnet, const Fragment& G,
                                             const std::vector<double>& Tlist, int degree,
                                             int NtPerT = 20, int nSigma = 64, int nLambda = 257);

} // namespace qnet

#endif
