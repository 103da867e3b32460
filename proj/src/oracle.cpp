#include "qnet/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace qnet {

namespace {

double tanhcScalar(double x) {
    if (std::abs(x) < 1e-6) return 1.0 - x * x / 3.0;
    return std::tanh(x) / x;
}

std::vector<Offset> differenceOffsets(const Fragment& G) {
    std::vector<Offset> offsets;
    for (int a = 0; a < G.size(); ++a)
        for (int b = 0; b < G.size(); ++b) {
            const Offset d = G.site(a) - G.site(b);
            if (std::find(offsets.begin(), offsets.end(), d) == offsets.end()) offsets.push_back(d);
        }
    return offsets;
}

} // namespace

DiscretizedOperators discretizeOperators(const WeightedNetwork& wnet, const Fragment& G, double T,
                                         int Nt, int nSigma) {
    if (T <= 0.0 || Nt < 1) throw InvariantViolation("horizon discretization needs T > 0, Nt >= 1");
    if (G.nu() != wnet.nu()) throw DimensionMismatch("fragment lattice dimension mismatch");
    const int q = wnet.q();
    const int N = G.size();
    const double h = T / Nt;
    const auto offsets = differenceOffsets(G);

    // Lag tables at tau = m h, m = 0..Nt-1; one propagator cache shared by
    // all lags.  Negative lags come from V_d(-tau) = V_{-d}(tau)^T and
    // Lambda_d(-tau) = -Lambda_{-d}(tau)^T during assembly.
    PropagatorCache cache(wnet, nSigma);
    const double w = 1.0 / cache.gridSize();
    const int nu = wnet.nu();
    std::vector<std::map<Offset, Eigen::MatrixXd>> Vlag(Nt), Llag(Nt);
    for (int m = 0; m < Nt; ++m) {
        const double tau = m * h;
        for (const auto& d : offsets) {
            Eigen::MatrixXcd accV = Eigen::MatrixXcd::Zero(q, q);
            Eigen::MatrixXcd accL = accV;
            for (int i = 0; i < cache.gridSize(); ++i) {
                double phase = 0.0;
                for (int k = 0; k < nu; ++k) phase += d[k] * cache.sigma(i)[k];
                const std::complex<double> e = std::polar(w, phase);
                accV += e * cache.propagateCovariance(i, tau);
                accL += e * cache.propagateCommutator(i, tau);
            }
            Vlag[m][d] = accV.real();
            Llag[m][d] = accL.real();
        }
    }

    DiscretizedOperators ops;
    ops.G = G;
    ops.T = T;
    ops.Nt = Nt;
    ops.q = q;
    const int dim = q * N * Nt;
    ops.Vhat.resize(dim, dim);
    ops.Lhat.resize(dim, dim);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            const Offset d = G.site(a) - G.site(b);
            const Offset dn = negate(d);
            for (int j = 0; j < Nt; ++j)
                for (int k = 0; k < Nt; ++k) {
                    const int m = j - k;
                    Eigen::MatrixXd Vblk, Lblk;
                    if (m >= 0) {
                        Vblk = h * Vlag[m].at(d);
                        Lblk = h * Llag[m].at(d);
                    } else {
                        Vblk = h * Vlag[-m].at(dn).transpose();
                        Lblk = -h * Llag[-m].at(dn).transpose();
                    }
                    ops.Vhat.block((a * Nt + j) * q, (b * Nt + k) * q, q, q) =
                        Vblk.cast<std::complex<double>>();
                    ops.Lhat.block((a * Nt + j) * q, (b * Nt + k) * q, q, q) =
                        Lblk.cast<std::complex<double>>();
                }
        }
    ops.Vhat = 0.5 * (ops.Vhat + ops.Vhat.adjoint().eval());
    ops.Lhat = 0.5 * (ops.Lhat - ops.Lhat.adjoint().eval());
    return ops;
}

ZeroEigReport checkNoZeroEigs(const DiscretizedOperators& ops, double tol) {
    const Eigen::MatrixXcd H = std::complex<double>(0.0, -1.0) * ops.Lhat;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    ZeroEigReport rep;
    rep.minAbsEig = es.eigenvalues().cwiseAbs().minCoeff();
    rep.nonzero = rep.minAbsEig > tol;
    return rep;
}

double logQefFinite(const DiscretizedOperators& ops, double theta, double tol) {
    if (theta == 0.0) return 0.0;
    const Eigen::MatrixXcd H = std::complex<double>(0.0, -1.0) * ops.Lhat;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    const Eigen::MatrixXcd& U = es.eigenvectors();
    const Eigen::VectorXd& d = es.eigenvalues();
    double lnDetCosh = 0.0;
    Eigen::VectorXd sqrtK(d.size());
    for (int k = 0; k < d.size(); ++k) {
        lnDetCosh += std::log(std::cosh(theta * d[k]));
        sqrtK[k] = std::sqrt(tanhcScalar(theta * d[k]));
    }
    const Eigen::MatrixXcd sqrtKM = U * sqrtK.asDiagonal() * U.adjoint();
    Eigen::MatrixXcd mixed = theta * sqrtKM * ops.Vhat * sqrtKM;
    mixed = 0.5 * (mixed + mixed.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> esm(mixed, Eigen::EigenvaluesOnly);
    double lnDetRest = 0.0;
    for (int k = 0; k < esm.eigenvalues().size(); ++k) {
        const double x = 1.0 - esm.eigenvalues()[k];
        if (x <= tol)
            throw NotAdmissible("theta violates the finite-horizon admissibility condition");
        lnDetRest += std::log(x);
    }
    return -0.5 * (lnDetCosh + lnDetRest);
}

std::vector<ConvergenceRow> temporalConvergenceStudy(const WeightedNetwork& wnet, const Fragment& G,
                                                     double theta, const std::vector<double>& Tlist,
                                                     int NtPerT, int nSigma) {
    const QuadratureGrid grid = makeGrid(wnet.nu(), nSigma, 257, true);
    const double target = temporalRateFragment(wnet, G, theta, grid);
    std::vector<ConvergenceRow> rows;
    for (double T : Tlist) {
        const int Nt = std::max(1, static_cast<int>(std::lround(NtPerT * T)));
        const DiscretizedOperators ops = discretizeOperators(wnet, G, T, Nt, nSigma);
        ConvergenceRow row;
        row.T = T;
        row.ratePerT = logQefFinite(ops, theta) / (T * G.size());
        row.error = std::abs(row.ratePerT - target);
        rows.push_back(row);
    }
    return rows;
}

std::vector<AverageRow> toeplitzAverageCheck(const std::vector<RealKernel>& kernels,
                                             const std::vector<int>& Llist, int nSigma) {
    if (kernels.empty()) throw InvariantViolation("need at least one kernel");
    const int nu = kernels.front().nu();
    for (std::size_t s = 0; s + 1 < kernels.size(); ++s)
        if (kernels[s].cols() != kernels[s + 1].rows())
            throw DimensionMismatch("kernel product dimensions do not chain");
    if (kernels.back().cols() != kernels.front().rows())
        throw DimensionMismatch("kernel product is not square");

    const auto grid = torusGrid(nu, nSigma);
    double rhs = 0.0;
    for (const auto& sigma : grid) {
        Eigen::MatrixXcd prod = kernels.front().sft(sigma);
        for (std::size_t s = 1; s < kernels.size(); ++s) prod *= kernels[s].sft(sigma);
        rhs += prod.trace().real();
    }
    rhs /= static_cast<double>(grid.size());

    std::vector<AverageRow> rows;
    for (int L : Llist) {
        const Fragment G = cubeFragment(nu, L);
        Eigen::MatrixXcd prod = restrictToFragment(kernels.front(), G);
        for (std::size_t s = 1; s < kernels.size(); ++s) prod *= restrictToFragment(kernels[s], G);
        AverageRow row;
        row.scale = L;
        row.lhs = prod.trace().real() / G.size();
        row.rhs = rhs;
        row.error = std::abs(row.lhs - row.rhs);
        rows.push_back(row);
    }
    return rows;
}

std::vector<AverageRow> operatorAverageCheck(const WeightedNetwork& wnet, const Fragment& G,
                                             const std::vector<double>& Tlist, int degree,
                                             int NtPerT, int nSigma, int nLambda) {
    if (degree < 1) throw InvariantViolation("power degree must be >= 1");
    const QuadratureGrid grid = makeGrid(wnet.nu(), nSigma, nLambda, true);
    double rhs = 0.0;
    for (std::size_t j = 0; j < grid.lambdaNodes.size(); ++j) {
        const FragmentSpectralSample s =
            fragmentSpectralDensity(wnet, G, grid.lambdaNodes[j], nSigma);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s.PhiG, Eigen::EigenvaluesOnly);
        double tr = 0.0;
        for (int k = 0; k < es.eigenvalues().size(); ++k)
            tr += std::pow(es.eigenvalues()[k], degree);
        rhs += grid.lambdaWeights[j] * tr;
    }
    rhs /= 2.0 * M_PI;

    std::vector<AverageRow> rows;
    for (double T : Tlist) {
        const int Nt = std::max(1, static_cast<int>(std::lround(NtPerT * T)));
        const DiscretizedOperators ops = discretizeOperators(wnet, G, T, Nt, nSigma);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ops.Vhat, Eigen::EigenvaluesOnly);
        double tr = 0.0;
        for (int k = 0; k < es.eigenvalues().size(); ++k)
            tr += std::pow(es.eigenvalues()[k], degree);
        AverageRow row;
        row.scale = T;
        row.lhs = tr / T;
        row.rhs = rhs;
        row.error = std::abs(row.lhs - row.rhs);
        rows.push_back(row);
    }
    return rows;
}

} // namespace qnet
