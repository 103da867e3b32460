#ifndef QNET_SPECTRAL_HPP
#define QNET_SPECTRAL_HPP

#include <complex>
#include <vector>

#include "qnet/network.hpp"

namespace qnet {

/// Quantum spectral density value at one (sigma, lambda): Phi Hermitian PSD,
/// Psi skew-Hermitian, Phi + i Psi the Fourier transform of the quantum
/// covariance kernel of the weighted process Z = S X.
struct SpectralSample {
    Eigen::VectorXd sigma;
    double lambda = 0.0;
    Eigen::MatrixXcd Phi;
    Eigen::MatrixXcd Psi;
};

struct FragmentSpectralSample {
    double lambda = 0.0;
    Eigen::MatrixXcd PhiG; ///< (q #G) x (q #G), Hermitian PSD
    Eigen::MatrixXcd PsiG; ///< skew-Hermitian
};

/// Stable, PR-validated network together with the weighting kernel S (q x n).
class WeightedNetwork {
public:
    WeightedNetwork(NetworkSpec spec, RealKernel S);

    const NetworkSpec& spec() const { return spec_; }
    const DynamicsKernels& dynamics() const { return dyn_; }
    const RealKernel& weighting() const { return S_; }
    int nu() const { return spec_.nu; }
    int q() const { return S_.rows(); }

    /// Symbols at one sigma, with the ALE solution; cached per call site.
    struct Symbols {
        Eigen::MatrixXcd A, B, S, P;
    };
    Symbols symbols(const Eigen::VectorXd& sigma) const;

private:
    NetworkSpec spec_;
    DynamicsKernels dyn_;
    RealKernel S_;
};

/// Spatio-temporal transfer function S(sigma)(sI - A(sigma))^{-1} B(sigma).
Eigen::MatrixXcd stTransfer(const WeightedNetwork& wnet, const Eigen::VectorXd& sigma,
                            std::complex<double> s, double tol = 1e-9);

/// Phi = F F*, Psi = F J_m F* at s = i lambda.
SpectralSample quantumSpectralDensity(const WeightedNetwork& wnet, const Eigen::VectorXd& sigma,
                                      double lambda);

/// Fragment spectral matrices Phi_G(lambda), Psi_G(lambda): block (a,b) is
/// the inverse SFT of Phi (resp. Psi) at offset G[a]-G[b], evaluated by
/// trapezoid on a uniform torus grid with nSigma points per dimension.
FragmentSpectralSample fragmentSpectralDensity(const WeightedNetwork& wnet, const Fragment& G,
                                               double lambda, int nSigma = 64);

/// Time-domain covariance / commutator blocks at lag tau:
///   V_ell(tau)      = invSFT of S e^{tau A} P S*   (tau >= 0)
///   Lambda_ell(tau) = invSFT of S e^{tau A} Theta S*
/// with V_ell(tau) = V_{-ell}(-tau)^T and Lambda_ell(tau) = -Lambda_{-ell}(-tau)^T
/// for tau < 0.
struct TimeKernelBlocks {
    std::map<Offset, Eigen::MatrixXd> V;
    std::map<Offset, Eigen::MatrixXd> Lambda;
};

TimeKernelBlocks covarianceKernelTime(const WeightedNetwork& wnet, double tau,
                                      const std::vector<Offset>& offsets, int nSigma = 64);

/// Per-sigma propagator cache: diagonalization of A(sigma) so that
/// e^{tau A(sigma)} is cheap across many lags.  Falls back to a direct
/// scaling-and-squaring exponential when the eigenbasis is ill-conditioned.
class PropagatorCache {
public:
    PropagatorCache(const WeightedNetwork& wnet, int nSigma);

    int gridSize() const { return static_cast<int>(sigma_.size()); }
    const Eigen::VectorXd& sigma(int i) const { return sigma_[i]; }

    /// S(sigma_i) e^{tau A(sigma_i)} X for X in {P(sigma_i), Theta}, tau >= 0.
    Eigen::MatrixXcd propagateCovariance(int i, double tau) const;
    Eigen::MatrixXcd propagateCommutator(int i, double tau) const;

private:
    Eigen::MatrixXcd expA(int i, double tau) const;

    std::vector<Eigen::VectorXd> sigma_;
    std::vector<Eigen::MatrixXcd> A_, S_, P_, Sadj_;
    std::vector<Eigen::MatrixXcd> eigvec_, eigvecInv_;
    std::vector<Eigen::VectorXcd> eigval_;
    std::vector<bool> diagonalizable_;
    Eigen::MatrixXd theta_;
};

} // namespace qnet

#endif
