#include "qnet/qef.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace qnet {

namespace {

double sinhcScalar(double x) {
    if (std::abs(x) < 1e-6) return 1.0 + x * x / 6.0;
    return std::sinh(x) / x;
}

double tanhcScalar(double x) {
    if (std::abs(x) < 1e-6) return 1.0 - x * x / 3.0;
    return std::tanh(x) / x;
}

Eigen::MatrixXcd hermitianPart(const Eigen::MatrixXcd& M) { return 0.5 * (M + M.adjoint().eval()); }

// Flat table of (Phi, Psi, weight) samples over the product grid; the
// theta-independent part of every rate evaluation.
struct SpectrumTable {
    std::vector<Eigen::MatrixXcd> Phi, Psi;
    std::vector<double> w;
    int nu = 0;
};

SpectrumTable buildSpectrumTable(const WeightedNetwork& wnet, const QuadratureGrid& grid) {
    SpectrumTable t;
    t.nu = wnet.nu();
    const Eigen::MatrixXd Jm = ccrSymplectic(wnet.spec().m);
    const int n = wnet.spec().n;
    for (const auto& sigma : grid.sigmaNodes) {
        const Eigen::MatrixXcd A = wnet.dynamics().A.sft(sigma);
        const Eigen::MatrixXcd B = wnet.dynamics().B.sft(sigma);
        const Eigen::MatrixXcd S = wnet.weighting().sft(sigma);
        for (std::size_t j = 0; j < grid.lambdaNodes.size(); ++j) {
            const std::complex<double> s(0.0, grid.lambdaNodes[j]);
            const Eigen::MatrixXcd F =
                S * (s * Eigen::MatrixXcd::Identity(n, n) - A).partialPivLu().solve(B);
            t.Phi.push_back(F * F.adjoint());
            t.Psi.push_back(F * Jm * F.adjoint());
            t.w.push_back(grid.sigmaWeight * grid.lambdaWeights[j]);
        }
    }
    return t;
}

double rateNormalization(int nu) { return 1.0 / (2.0 * std::pow(2.0 * M_PI, nu + 1)); }

} // namespace

void gaussLegendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = b;
        J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    nodes.resize(n);
    weights.resize(n);
    for (int k = 0; k < n; ++k) {
        nodes[k] = es.eigenvalues()[k];
        const double v = es.eigenvectors()(0, k);
        weights[k] = 2.0 * v * v;
    }
}

QuadratureGrid makeGrid(int nu, int nSigma, int nLambda, bool allowLargeNu) {
    if (nu > 3 && !allowLargeNu)
        throw InvariantViolation("nu > 3 requires an explicit override (grid size grows as nSigma^nu)");
    if (nSigma < 1 || nLambda < 1) throw InvariantViolation("grid sizes must be positive");
    QuadratureGrid grid;
    grid.nSigma = nSigma;
    grid.nLambda = nLambda;
    grid.sigmaNodes = torusGrid(nu, nSigma);
    grid.sigmaWeight = std::pow(2.0 * M_PI / nSigma, nu);

    std::vector<double> x, w;
    gaussLegendre(nLambda, x, w);
    grid.lambdaNodes.resize(nLambda);
    grid.lambdaWeights.resize(nLambda);
    for (int k = 0; k < nLambda; ++k) {
        const double u = 0.5 * M_PI * x[k];
        const double c = std::cos(u);
        grid.lambdaNodes[k] = std::tan(u);
        grid.lambdaWeights[k] = 0.5 * M_PI * w[k] / (c * c);
    }
    return grid;
}

MatrixTrig matrixTrig(const Eigen::MatrixXcd& H, double theta, double hermTol) {
    if ((H - H.adjoint()).norm() > hermTol * std::max(1.0, H.norm()))
        throw NotHermitian("matrixTrig requires a Hermitian argument");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitianPart(H));
    const Eigen::MatrixXcd& U = es.eigenvectors();
    const Eigen::VectorXd& d = es.eigenvalues();
    Eigen::VectorXd fc(d.size()), fs(d.size()), ft(d.size());
    for (int k = 0; k < d.size(); ++k) {
        fc[k] = std::cosh(theta * d[k]);
        fs[k] = sinhcScalar(theta * d[k]);
        ft[k] = tanhcScalar(theta * d[k]);
    }
    MatrixTrig out;
    out.coshM = U * fc.asDiagonal() * U.adjoint();
    out.sinhcM = U * fs.asDiagonal() * U.adjoint();
    out.tanhcM = U * ft.asDiagonal() * U.adjoint();
    out.eigH = d;
    return out;
}

namespace {

// Eigenvalues of theta * T^{1/2} Phi T^{1/2} with T = tanhc(theta H),
// H = -i Psi, plus ln det cosh(theta H); the shared core of the integrand
// and the admissibility checks.
struct IntegrandParts {
    Eigen::VectorXd mixedEigs; ///< eigenvalues of theta T^{1/2} Phi T^{1/2}
    double lnDetCosh = 0.0;
};

IntegrandParts integrandParts(const Eigen::MatrixXcd& Phi, const Eigen::MatrixXcd& Psi,
                              double theta) {
    const Eigen::MatrixXcd H = hermitianPart(std::complex<double>(0.0, -1.0) * Psi);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    const Eigen::MatrixXcd& U = es.eigenvectors();
    const Eigen::VectorXd& d = es.eigenvalues();
    Eigen::VectorXd sqrtT(d.size());
    IntegrandParts parts;
    for (int k = 0; k < d.size(); ++k) {
        sqrtT[k] = std::sqrt(tanhcScalar(theta * d[k]));
        parts.lnDetCosh += std::log(std::cosh(theta * d[k]));
    }
    const Eigen::MatrixXcd sqrtTM = U * sqrtT.asDiagonal() * U.adjoint();
    const Eigen::MatrixXcd mixed = hermitianPart(theta * sqrtTM * Phi * sqrtTM);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> esm(mixed, Eigen::EigenvaluesOnly);
    parts.mixedEigs = esm.eigenvalues();
    return parts;
}

} // namespace

double qefIntegrand(const Eigen::MatrixXcd& Phi, const Eigen::MatrixXcd& Psi, double theta,
                    double tol) {
    if (theta == 0.0) return 0.0;
    const IntegrandParts parts = integrandParts(Phi, Psi, theta);
    double lnDetRest = 0.0;
    for (int k = 0; k < parts.mixedEigs.size(); ++k) {
        const double x = 1.0 - parts.mixedEigs[k];
        if (x <= tol) throw NotAdmissible("theta violates the spectral admissibility condition");
        lnDetRest += std::log(x);
    }
    return -(parts.lnDetCosh + lnDetRest);
}

double admissibilityLoad(const Eigen::MatrixXcd& Phi, const Eigen::MatrixXcd& Psi, double theta) {
    if (theta == 0.0) return 0.0;
    const IntegrandParts parts = integrandParts(Phi, Psi, theta);
    return parts.mixedEigs.maxCoeff();
}

double admissibilityMargin(const WeightedNetwork& wnet, double theta, const QuadratureGrid& grid) {
    const SpectrumTable table = buildSpectrumTable(wnet, grid);
    double load = 0.0;
    for (std::size_t i = 0; i < table.Phi.size(); ++i)
        load = std::max(load, admissibilityLoad(table.Phi[i], table.Psi[i], theta));
    return 1.0 - load;
}

double maxAdmissibleTheta(const WeightedNetwork& wnet, const QuadratureGrid& grid, double tol) {
    const SpectrumTable table = buildSpectrumTable(wnet, grid);
    auto margin = [&](double theta) {
        double load = 0.0;
        for (std::size_t i = 0; i < table.Phi.size(); ++i)
            load = std::max(load, admissibilityLoad(table.Phi[i], table.Psi[i], theta));
        return 1.0 - load;
    };
    if (margin(kThetaSentinel) > tol) return kThetaSentinel;
    double lo = 0.0, hi = kThetaSentinel;
    for (int it = 0; it < 200 && (hi - lo) > 1e-12 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (margin(mid) > tol ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

double rateFromTable(const SpectrumTable& table, double theta) {
    double acc = 0.0;
    for (std::size_t i = 0; i < table.Phi.size(); ++i)
        acc += table.w[i] * qefIntegrand(table.Phi[i], table.Psi[i], theta);
    return rateNormalization(table.nu) * acc;
}

} // namespace

RateResult qefRate(const WeightedNetwork& wnet, double theta, const QuadratureGrid& grid) {
    const SpectrumTable table = buildSpectrumTable(wnet, grid);
    RateResult out;
    out.value = rateFromTable(table, theta);
    const int halfSigma = std::max(4, grid.nSigma / 2);
    const int halfLambda = std::max(5, grid.nLambda / 2) | 1;
    const QuadratureGrid half = makeGrid(wnet.nu(), halfSigma, halfLambda, true);
    const SpectrumTable halfTable = buildSpectrumTable(wnet, half);
    out.errEstimate = std::abs(out.value - rateFromTable(halfTable, theta));
    return out;
}

double temporalRateFragment(const WeightedNetwork& wnet, const Fragment& G, double theta,
                            const QuadratureGrid& grid) {
    if (G.nu() != wnet.nu()) throw DimensionMismatch("fragment lattice dimension mismatch");
    const int q = wnet.q();
    const int N = G.size();
    const int n = wnet.spec().n;
    const Eigen::MatrixXd Jm = ccrSymplectic(wnet.spec().m);
    const std::size_t nl = grid.lambdaNodes.size();

    std::vector<Offset> offsets;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            const Offset d = G.site(a) - G.site(b);
            if (std::find(offsets.begin(), offsets.end(), d) == offsets.end()) offsets.push_back(d);
        }

    // One sweep over sigma, accumulating the inverse SFT of Phi, Psi at each
    // lambda node for all offsets in G - G.
    const double wS = 1.0 / static_cast<double>(grid.sigmaNodes.size());
    std::vector<std::map<Offset, Eigen::MatrixXcd>> phiAcc(nl), psiAcc(nl);
    for (std::size_t j = 0; j < nl; ++j)
        for (const auto& d : offsets) {
            phiAcc[j][d] = Eigen::MatrixXcd::Zero(q, q);
            psiAcc[j][d] = Eigen::MatrixXcd::Zero(q, q);
        }
    for (const auto& sigma : grid.sigmaNodes) {
        const Eigen::MatrixXcd A = wnet.dynamics().A.sft(sigma);
        const Eigen::MatrixXcd B = wnet.dynamics().B.sft(sigma);
        const Eigen::MatrixXcd S = wnet.weighting().sft(sigma);
        for (std::size_t j = 0; j < nl; ++j) {
            const std::complex<double> s(0.0, grid.lambdaNodes[j]);
            const Eigen::MatrixXcd F =
                S * (s * Eigen::MatrixXcd::Identity(n, n) - A).partialPivLu().solve(B);
            const Eigen::MatrixXcd Phi = F * F.adjoint();
            const Eigen::MatrixXcd Psi = F * Jm * F.adjoint();
            for (const auto& d : offsets) {
                double phase = 0.0;
                for (int k = 0; k < wnet.nu(); ++k) phase += d[k] * sigma[k];
                const std::complex<double> e = std::polar(wS, phase);
                phiAcc[j][d] += e * Phi;
                psiAcc[j][d] += e * Psi;
            }
        }
    }

    double acc = 0.0;
    Eigen::MatrixXcd PhiG(q * N, q * N), PsiG(q * N, q * N);
    for (std::size_t j = 0; j < nl; ++j) {
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) {
                const Offset d = G.site(a) - G.site(b);
                PhiG.block(a * q, b * q, q, q) = phiAcc[j][d];
                PsiG.block(a * q, b * q, q, q) = psiAcc[j][d];
            }
        PhiG = hermitianPart(PhiG);
        PsiG = 0.5 * (PsiG - PsiG.adjoint().eval());
        acc += grid.lambdaWeights[j] * qefIntegrand(PhiG, PsiG, theta);
    }
    return acc / (4.0 * M_PI);
}

double classicalThetaStar(const WeightedNetwork& wnet, const QuadratureGrid& grid) {
    const SpectrumTable table = buildSpectrumTable(wnet, grid);
    double peak = 0.0;
    for (const auto& Phi : table.Phi) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Phi, Eigen::EigenvaluesOnly);
        peak = std::max(peak, es.eigenvalues().maxCoeff());
    }
    return 1.0 / peak;
}

double classicalRate(const WeightedNetwork& wnet, double theta, const QuadratureGrid& grid,
                     double tol) {
    const SpectrumTable table = buildSpectrumTable(wnet, grid);
    double acc = 0.0;
    for (std::size_t i = 0; i < table.Phi.size(); ++i) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(table.Phi[i], Eigen::EigenvaluesOnly);
        for (int k = 0; k < es.eigenvalues().size(); ++k) {
            const double x = 1.0 - theta * es.eigenvalues()[k];
            if (x <= tol) throw NotAdmissible("theta exceeds the classical bound 1/||F||_inf^2");
            acc -= table.w[i] * std::log(x);
        }
    }
    return rateNormalization(wnet.nu()) * acc;
}

Eigen::MatrixXcd homotopyDirect(const Eigen::MatrixXcd& Phi, const Eigen::MatrixXcd& Psi,
                                double theta) {
    const Eigen::MatrixXcd H = hermitianPart(std::complex<double>(0.0, -1.0) * Psi);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    const Eigen::MatrixXcd& U = es.eigenvectors();
    const Eigen::VectorXd& d = es.eigenvalues();
    Eigen::VectorXd fc(d.size()), fsh(d.size()), fshc(d.size());
    for (int k = 0; k < d.size(); ++k) {
        fc[k] = std::cosh(theta * d[k]);
        fsh[k] = d[k] * std::sinh(theta * d[k]); // H sinh(theta H) eigenvalues
        fshc[k] = sinhcScalar(theta * d[k]);
    }
    const Eigen::MatrixXcd coshM = U * fc.asDiagonal() * U.adjoint();
    const Eigen::MatrixXcd HsinhM = U * fsh.asDiagonal() * U.adjoint();
    const Eigen::MatrixXcd sinhcM = U * fshc.asDiagonal() * U.adjoint();
    const Eigen::MatrixXcd D = coshM - theta * Phi * sinhcM;
    // U_theta = -D^{-1} D' with D' = -Psi sin(theta Psi) - Phi cos(theta Psi)
    // and Psi sin(theta Psi) = -H sinh(theta H).
    return D.partialPivLu().solve(Phi * coshM - HsinhM);
}

RateProfile homotopyRate(const WeightedNetwork& wnet, double thetaMax, int nSteps,
                         const QuadratureGrid& grid, int checkpointInterval, double checkpointTol) {
    if (nSteps < 1 || thetaMax <= 0.0) throw InvariantViolation("homotopy needs thetaMax > 0, nSteps >= 1");
    const SpectrumTable table = buildSpectrumTable(wnet, grid);
    const std::size_t M = table.Phi.size();
    std::vector<Eigen::MatrixXcd> U(M), Psi2(M);
    for (std::size_t i = 0; i < M; ++i) {
        U[i] = table.Phi[i];
        Psi2[i] = table.Psi[i] * table.Psi[i];
    }

    auto derivative = [&]() {
        double acc = 0.0;
        for (std::size_t i = 0; i < M; ++i) acc += table.w[i] * U[i].trace().real();
        return rateNormalization(table.nu) * acc;
    };
    auto marginAt = [&](double theta) {
        double load = 0.0;
        for (std::size_t i = 0; i < M; ++i)
            load = std::max(load, admissibilityLoad(table.Phi[i], table.Psi[i], theta));
        return 1.0 - load;
    };

    RateProfile profile;
    profile.push_back({0.0, 0.0, 1.0, "homotopy"});

    const double h = thetaMax / nSteps;
    double upsilon = 0.0;
    double derivPrev = derivative();
    for (int step = 1; step <= nSteps; ++step) {
        for (std::size_t i = 0; i < M; ++i) {
            const Eigen::MatrixXcd k1 = Psi2[i] + U[i] * U[i];
            const Eigen::MatrixXcd u2 = U[i] + 0.5 * h * k1;
            const Eigen::MatrixXcd k2 = Psi2[i] + u2 * u2;
            const Eigen::MatrixXcd u3 = U[i] + 0.5 * h * k2;
            const Eigen::MatrixXcd k3 = Psi2[i] + u3 * u3;
            const Eigen::MatrixXcd u4 = U[i] + h * k3;
            const Eigen::MatrixXcd k4 = Psi2[i] + u4 * u4;
            U[i] += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        const double theta = step * h;
        const double derivNow = derivative();
        upsilon += 0.5 * h * (derivPrev + derivNow);
        derivPrev = derivNow;

        if (step % checkpointInterval == 0 || step == nSteps) {
            double dev = 0.0;
            for (std::size_t i = 0; i < M; ++i)
                dev = std::max(dev, (U[i] - homotopyDirect(table.Phi[i], table.Psi[i], theta)).norm());
            if (dev > checkpointTol)
                throw HomotopyDiverged("Riccati state drifted from the closed form at theta = " +
                                       std::to_string(theta));
            profile.push_back({theta, upsilon, marginAt(theta), "homotopy"});
        }
    }
    return profile;
}

double smallThetaExpansion(const WeightedNetwork& wnet, double theta, const QuadratureGrid& grid) {
    const double base = classicalRate(wnet, theta, grid);
    const SpectrumTable table = buildSpectrumTable(wnet, grid);
    double acc = 0.0;
    const int q = wnet.q();
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(q, q);
    for (std::size_t i = 0; i < table.Phi.size(); ++i) {
        const Eigen::MatrixXcd corr = (I - theta * table.Phi[i]).partialPivLu().solve(
            (I - (theta / 3.0) * table.Phi[i]) * table.Psi[i] * table.Psi[i]);
        acc += table.w[i] * corr.trace().real();
    }
    return base + theta * theta / (4.0 * std::pow(2.0 * M_PI, wnet.nu() + 1)) * acc;
}

double meanSquareRate(const WeightedNetwork& wnet, const QuadratureGrid& grid) {
    double acc = 0.0;
    for (const auto& sigma : grid.sigmaNodes) {
        const auto sym = wnet.symbols(sigma);
        acc += grid.sigmaWeight * (sym.S * sym.P * sym.S.adjoint()).trace().real();
    }
    return acc / (2.0 * std::pow(2.0 * M_PI, wnet.nu()));
}

double meanSquareRateViaPhi(const WeightedNetwork& wnet, const QuadratureGrid& grid) {
    const SpectrumTable table = buildSpectrumTable(wnet, grid);
    double acc = 0.0;
    for (std::size_t i = 0; i < table.Phi.size(); ++i)
        acc += table.w[i] * table.Phi[i].trace().real();
    return rateNormalization(wnet.nu()) * acc;
}

double tailBound(const WeightedNetwork& wnet, double alpha, const std::vector<double>& thetaGrid,
                 const QuadratureGrid& grid) {
    if (thetaGrid.empty()) throw InvariantViolation("theta grid must be nonempty");
    const SpectrumTable table = buildSpectrumTable(wnet, grid);
    double best = std::numeric_limits<double>::infinity();
    for (double theta : thetaGrid) best = std::min(best, rateFromTable(table, theta) - alpha * theta);
    return best;
}

} // namespace qnet
