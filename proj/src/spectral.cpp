#include "qnet/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace qnet {

WeightedNetwork::WeightedNetwork(NetworkSpec spec, RealKernel S)
    : spec_(std::move(spec)), dyn_(assembleDynamics(spec_)), S_(std::move(S)) {
    if (S_.nu() != spec_.nu) throw DimensionMismatch("weighting kernel lattice dimension mismatch");
    if (S_.cols() != spec_.n) throw DimensionMismatch("weighting kernel must have n columns");
}

WeightedNetwork::Symbols WeightedNetwork::symbols(const Eigen::VectorXd& sigma) const {
    Symbols sym;
    sym.A = dyn_.A.sft(sigma);
    sym.B = dyn_.B.sft(sigma);
    sym.S = S_.sft(sigma);
    sym.P = invariantCovarianceSft(dyn_, sigma);
    return sym;
}

Eigen::MatrixXcd stTransfer(const WeightedNetwork& wnet, const Eigen::VectorXd& sigma,
                            std::complex<double> s, double tol) {
    const Eigen::MatrixXcd A = wnet.dynamics().A.sft(sigma);
    const Eigen::MatrixXcd B = wnet.dynamics().B.sft(sigma);
    const Eigen::MatrixXcd S = wnet.weighting().sft(sigma);
    const int n = static_cast<int>(A.rows());
    const Eigen::MatrixXcd res = s * Eigen::MatrixXcd::Identity(n, n) - A;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(res);
    if (lu.rcond() < tol) throw SingularResolvent("s too close to the spectrum of A(sigma)");
    return S * lu.solve(B);
}

SpectralSample quantumSpectralDensity(const WeightedNetwork& wnet, const Eigen::VectorXd& sigma,
                                      double lambda) {
    const Eigen::MatrixXcd F = stTransfer(wnet, sigma, std::complex<double>(0.0, lambda));
    const Eigen::MatrixXd Jm = ccrSymplectic(wnet.spec().m);
    SpectralSample sample;
    sample.sigma = sigma;
    sample.lambda = lambda;
    sample.Phi = F * F.adjoint();
    sample.Psi = F * Jm * F.adjoint();
    return sample;
}

FragmentSpectralSample fragmentSpectralDensity(const WeightedNetwork& wnet, const Fragment& G,
                                               double lambda, int nSigma) {
    if (G.nu() != wnet.nu()) throw DimensionMismatch("fragment lattice dimension mismatch");
    const int q = wnet.q();
    const int N = G.size();
    const auto grid = torusGrid(wnet.nu(), nSigma);
    const double w = 1.0 / static_cast<double>(grid.size());

    // Inverse SFT per distinct offset in G - G (Plancherel reduction of the
    // lattice sum; no infinite matrices are formed).
    std::map<Offset, Eigen::MatrixXcd> phiBlocks, psiBlocks;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            const Offset d = G.site(a) - G.site(b);
            phiBlocks.emplace(d, Eigen::MatrixXcd::Zero(q, q));
            psiBlocks.emplace(d, Eigen::MatrixXcd::Zero(q, q));
        }
    for (const auto& sigma : grid) {
        const SpectralSample s = quantumSpectralDensity(wnet, sigma, lambda);
        for (auto& [d, acc] : phiBlocks) {
            double phase = 0.0;
            for (int k = 0; k < wnet.nu(); ++k) phase += d[k] * sigma[k];
            const std::complex<double> e = std::polar(w, phase);
            acc += e * s.Phi;
            psiBlocks[d] += e * s.Psi;
        }
    }

    FragmentSpectralSample out;
    out.lambda = lambda;
    out.PhiG.resize(q * N, q * N);
    out.PsiG.resize(q * N, q * N);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            const Offset d = G.site(a) - G.site(b);
            out.PhiG.block(a * q, b * q, q, q) = phiBlocks.at(d);
            out.PsiG.block(a * q, b * q, q, q) = psiBlocks.at(d);
        }
    // Enforce the exact symmetry classes lost to roundoff.
    out.PhiG = 0.5 * (out.PhiG + out.PhiG.adjoint().eval());
    out.PsiG = 0.5 * (out.PsiG - out.PsiG.adjoint().eval());
    return out;
}

PropagatorCache::PropagatorCache(const WeightedNetwork& wnet, int nSigma)
    : theta_(wnet.spec().theta) {
    sigma_ = torusGrid(wnet.nu(), nSigma);
    const int n = wnet.spec().n;
    for (const auto& sigma : sigma_) {
        const auto sym = wnet.symbols(sigma);
        A_.push_back(sym.A);
        S_.push_back(sym.S);
        P_.push_back(sym.P);
        Sadj_.push_back(sym.S.adjoint());
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(sym.A, true);
        const Eigen::MatrixXcd V = es.eigenvectors();
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(V);
        bool ok = lu.isInvertible() && lu.rcond() > 1e-10;
        if (ok) {
            const Eigen::MatrixXcd Vi = lu.inverse();
            const Eigen::MatrixXcd recon = V * es.eigenvalues().asDiagonal() * Vi;
            ok = (recon - sym.A).norm() <= 1e-10 * std::max(1.0, sym.A.norm());
            if (ok) {
                eigvec_.push_back(V);
                eigvecInv_.push_back(Vi);
                eigval_.push_back(es.eigenvalues());
            }
        }
        if (!ok) {
            eigvec_.emplace_back();
            eigvecInv_.emplace_back();
            eigval_.emplace_back();
        }
        diagonalizable_.push_back(ok);
        (void)n;
    }
}

Eigen::MatrixXcd PropagatorCache::expA(int i, double tau) const {
    if (diagonalizable_[i]) {
        Eigen::VectorXcd d = eigval_[i];
        for (int k = 0; k < d.size(); ++k) d[k] = std::exp(tau * d[k]);
        return eigvec_[i] * d.asDiagonal() * eigvecInv_[i];
    }
    return (tau * A_[i]).exp();
}

Eigen::MatrixXcd PropagatorCache::propagateCovariance(int i, double tau) const {
    return S_[i] * expA(i, tau) * P_[i] * Sadj_[i];
}

Eigen::MatrixXcd PropagatorCache::propagateCommutator(int i, double tau) const {
    return S_[i] * expA(i, tau) * theta_.cast<std::complex<double>>() * Sadj_[i];
}

TimeKernelBlocks covarianceKernelTime(const WeightedNetwork& wnet, double tau,
                                      const std::vector<Offset>& offsets, int nSigma) {
    // Negative lags via the kernel symmetries V_ell(t) = V_{-ell}(-t)^T,
    // Lambda_ell(t) = -Lambda_{-ell}(-t)^T.
    const bool flip = tau < 0.0;
    const double t = std::abs(tau);
    PropagatorCache cache(wnet, nSigma);
    const double w = 1.0 / cache.gridSize();
    const int nu = wnet.nu();

    TimeKernelBlocks out;
    for (const auto& ellIn : offsets) {
        const Offset ell = flip ? negate(ellIn) : ellIn;
        Eigen::MatrixXcd accV = Eigen::MatrixXcd::Zero(wnet.q(), wnet.q());
        Eigen::MatrixXcd accL = accV;
        for (int i = 0; i < cache.gridSize(); ++i) {
            double phase = 0.0;
            for (int k = 0; k < nu; ++k) phase += ell[k] * cache.sigma(i)[k];
            const std::complex<double> e = std::polar(w, phase);
            accV += e * cache.propagateCovariance(i, t);
            accL += e * cache.propagateCommutator(i, t);
        }
        if (flip) {
            out.V[ellIn] = accV.real().transpose();
            out.Lambda[ellIn] = -accL.real().transpose();
        } else {
            out.V[ellIn] = accV.real();
            out.Lambda[ellIn] = accL.real();
        }
    }
    return out;
}

} // namespace qnet
