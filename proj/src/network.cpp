#include "qnet/network.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace qnet {

void NetworkSpec::validate() const {
    if (n < 2 || n % 2 != 0) throw InvariantViolation("n must be even and positive");
    if (m < 2 || m % 2 != 0) throw InvariantViolation("m must be even and positive");
    if (r < 2 || r % 2 != 0) throw InvariantViolation("r must be even and positive");
    if (r > m) throw InvariantViolation("r must not exceed m");
    if (theta.rows() != n || theta.cols() != n) throw InvariantViolation("theta must be n x n");
    if ((theta + theta.transpose()).norm() > 1e-12 * std::max(1.0, theta.norm()))
        throw InvariantViolation("theta must be antisymmetric");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(theta);
    if (!lu.isInvertible()) throw InvariantViolation("theta must be nonsingular");
    if (R.nu() != nu || M.nu() != nu || D.nu() != nu)
        throw InvariantViolation("kernel lattice dimension does not match nu");
    if (R.rows() != n || R.cols() != n) throw InvariantViolation("R must have n x n blocks");
    if (M.rows() != m || M.cols() != n) throw InvariantViolation("M must have m x n blocks");
    if (D.rows() != r || D.cols() != m) throw InvariantViolation("D must have r x m blocks");
    for (const auto& [ell, block] : R.terms()) {
        const Eigen::MatrixXd mirror = R.at(negate(ell));
        if ((block - mirror.transpose()).norm() > 1e-12 * std::max(1.0, block.norm())) {
            const Offset rep = std::max(ell, negate(ell)); // canonical representative
            std::string where = "[";
            for (std::size_t k = 0; k < rep.size(); ++k)
                where += (k ? "," : "") + std::to_string(rep[k]);
            throw InvariantViolation("R symmetry at offset " + where + "]");
        }
    }
}

Eigen::MatrixXd ccrSymplectic(int k) {
    if (k < 2 || k % 2 != 0) throw InvariantViolation("J_k requires even k >= 2");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(k, k);
    J.topRightCorner(k / 2, k / 2) = Eigen::MatrixXd::Identity(k / 2, k / 2);
    J.bottomLeftCorner(k / 2, k / 2) = -Eigen::MatrixXd::Identity(k / 2, k / 2);
    return J;
}

DynamicsKernels assembleDynamics(const NetworkSpec& spec) {
    spec.validate();
    const Eigen::MatrixXd Jm = ccrSymplectic(spec.m);
    const Eigen::MatrixXd twoTheta = 2.0 * spec.theta;

    DynamicsKernels dyn{RealKernel(spec.nu, spec.n, spec.n), RealKernel(spec.nu, spec.n, spec.m),
                        RealKernel(spec.nu, spec.r, spec.n), spec.D};

    // A_ell = 2 Theta (R_ell + sum_c M_c^T J_m M_{ell+c})
    for (const auto& [ell, Rl] : spec.R.terms()) dyn.A.add(ell, twoTheta * Rl);
    for (const auto& [c, Mc] : spec.M.terms())
        for (const auto& [cp, Mcp] : spec.M.terms())
            dyn.A.add(cp - c, twoTheta * (Mc.transpose() * Jm * Mcp));
    dyn.A.prune();

    // B_ell = 2 Theta M_{-ell}^T
    for (const auto& [c, Mc] : spec.M.terms()) dyn.B.add(negate(c), twoTheta * Mc.transpose());
    dyn.B.prune();

    // C_ell = 2 sum_c D_{ell-c} J_m M_c
    for (const auto& [cd, Dd] : spec.D.terms())
        for (const auto& [c, Mc] : spec.M.terms()) dyn.C.add(cd + c, 2.0 * (Dd * Jm * Mc));
    dyn.C.prune();

    return dyn;
}

PrResiduals prResiduals(const DynamicsKernels& dyn, const Eigen::MatrixXd& theta,
                        const std::vector<Eigen::VectorXd>& sigmaGrid) {
    if (sigmaGrid.empty()) throw InvariantViolation("sigma grid must be nonempty");
    const Eigen::MatrixXd Jm = ccrSymplectic(dyn.B.cols());
    const Eigen::MatrixXd Jr = ccrSymplectic(dyn.D.rows());
    PrResiduals res;
    for (const auto& sigma : sigmaGrid) {
        const Eigen::MatrixXcd A = dyn.A.sft(sigma);
        const Eigen::MatrixXcd B = dyn.B.sft(sigma);
        const Eigen::MatrixXcd C = dyn.C.sft(sigma);
        const Eigen::MatrixXcd D = dyn.D.sft(sigma);
        res.pr1 = std::max(res.pr1, (A * theta + theta * A.adjoint() + B * Jm * B.adjoint()).norm());
        res.pr2 = std::max(res.pr2, (theta * C.adjoint() + B * Jm * D.adjoint()).norm());
        res.pr3 = std::max(res.pr3, (D * Jm * D.adjoint() - Jr).norm());
    }
    return res;
}

Eigen::MatrixXcd transferFunction(const DynamicsKernels& dyn, const Eigen::VectorXd& sigma,
                                  std::complex<double> s) {
    const Eigen::MatrixXcd A = dyn.A.sft(sigma);
    const Eigen::MatrixXcd B = dyn.B.sft(sigma);
    const Eigen::MatrixXcd C = dyn.C.sft(sigma);
    const Eigen::MatrixXcd D = dyn.D.sft(sigma);
    const int n = static_cast<int>(A.rows());
    const Eigen::MatrixXcd resolvent =
        (s * Eigen::MatrixXcd::Identity(n, n) - A).partialPivLu().solve(B);
    return C * resolvent + D;
}

double jjUnitarityResidual(const DynamicsKernels& dyn,
                           const std::vector<std::pair<Eigen::VectorXd, std::complex<double>>>& samples,
                           double tol) {
    const Eigen::MatrixXd Jm = ccrSymplectic(dyn.B.cols());
    const Eigen::MatrixXd Jr = ccrSymplectic(dyn.D.rows());
    double residual = 0.0;
    for (const auto& [sigma, s] : samples) {
        // both resolvents appear: (sI - A(sigma))^{-1} and (-sI - A(-sigma))^{-1}
        const std::pair<Eigen::VectorXd, std::complex<double>> branches[] = {
            {sigma, s}, {-sigma, -s}};
        for (const auto& [sg, probe] : branches) {
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(dyn.A.sft(sg), false);
            for (int i = 0; i < es.eigenvalues().size(); ++i)
                if (std::abs(probe - es.eigenvalues()[i]) < tol)
                    throw SampleTooCloseToSpectrum("sample s within tolerance of the symbol spectrum");
        }
        const Eigen::MatrixXcd F = transferFunction(dyn, sigma, s);
        const Eigen::MatrixXcd Fdiam = transferFunction(dyn, -sigma, -s).transpose();
        residual = std::max(residual, (F * Jm * Fdiam - Jr).norm());
    }
    return residual;
}

double stabilityMargin(const DynamicsKernels& dyn, const std::vector<Eigen::VectorXd>& sigmaGrid) {
    if (sigmaGrid.empty()) throw InvariantViolation("sigma grid must be nonempty");
    double abscissa = -std::numeric_limits<double>::infinity();
    for (const auto& sigma : sigmaGrid) {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(dyn.A.sft(sigma), false);
        for (int i = 0; i < es.eigenvalues().size(); ++i)
            abscissa = std::max(abscissa, es.eigenvalues()[i].real());
    }
    return -abscissa;
}

double symbolDerivativeBound(const RealKernel& A) {
    double bound = 0.0;
    for (const auto& [ell, block] : A.terms()) {
        int l1 = 0;
        for (int c : ell) l1 += std::abs(c);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
        bound += l1 * svd.singularValues()(0);
    }
    return bound;
}

Eigen::MatrixXcd invariantCovarianceSft(const DynamicsKernels& dyn, const Eigen::VectorXd& sigma,
                                        double hurwitzTol) {
    const Eigen::MatrixXcd A = dyn.A.sft(sigma);
    const Eigen::MatrixXcd B = dyn.B.sft(sigma);
    const int n = static_cast<int>(A.rows());

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, false);
    for (int i = 0; i < n; ++i)
        if (es.eigenvalues()[i].real() >= -hurwitzTol)
            throw NotHurwitz("symbol A(sigma) is not Hurwitz");

    // col(P) = -(I ox A + conj(A) ox I)^{-1} col(B B*)
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    const Eigen::MatrixXcd K =
        Eigen::kroneckerProduct(I, A).eval() + Eigen::kroneckerProduct(A.conjugate(), I).eval();
    const Eigen::MatrixXcd Q = B * B.adjoint();
    Eigen::VectorXcd rhs(n * n);
    for (int j = 0; j < n; ++j) rhs.segment(j * n, n) = -Q.col(j);
    const Eigen::VectorXcd p = K.partialPivLu().solve(rhs);
    Eigen::MatrixXcd P(n, n);
    for (int j = 0; j < n; ++j) P.col(j) = p.segment(j * n, n);
    return 0.5 * (P + P.adjoint().eval());
}

CovarianceTable invariantCovarianceKernel(const DynamicsKernels& dyn,
                                          const std::vector<Eigen::VectorXd>& sigmaGrid,
                                          const std::vector<Offset>& offsets) {
    CovarianceTable table;
    table.sigma = sigmaGrid;
    table.P.reserve(sigmaGrid.size());
    for (const auto& sigma : sigmaGrid) table.P.push_back(invariantCovarianceSft(dyn, sigma));

    const double w = 1.0 / static_cast<double>(sigmaGrid.size());
    for (const auto& ell : offsets) {
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dyn.A.rows(), dyn.A.rows());
        for (std::size_t i = 0; i < sigmaGrid.size(); ++i) {
            double phase = 0.0;
            for (int k = 0; k < static_cast<int>(ell.size()); ++k) phase += ell[k] * sigmaGrid[i][k];
            acc += std::polar(1.0, phase) * table.P[i];
        }
        acc *= w;
        table.maxImagPart = std::max(table.maxImagPart, acc.imag().cwiseAbs().maxCoeff());
        table.blocks[ell] = acc.real();
    }
    return table;
}

SeriesComposite composeSeries(const NetworkSpec& upstream, const NetworkSpec& downstream) {
    upstream.validate();
    downstream.validate();
    if (upstream.r != downstream.m)
        throw DimensionMismatch("upstream output dimension must equal downstream input dimension");
    if (upstream.nu != downstream.nu) throw DimensionMismatch("lattice dimensions differ");

    const DynamicsKernels d1 = assembleDynamics(upstream);
    const DynamicsKernels d2 = assembleDynamics(downstream);
    const int nu = upstream.nu;
    const int n1 = upstream.n, n2 = downstream.n;
    const int n = n1 + n2;

    SeriesComposite out;
    out.n1 = n1;
    out.n2 = n2;
    out.upstream = upstream;
    out.downstream = downstream;
    out.theta = Eigen::MatrixXd::Zero(n, n);
    out.theta.topLeftCorner(n1, n1) = upstream.theta;
    out.theta.bottomRightCorner(n2, n2) = downstream.theta;

    RealKernel A(nu, n, n), B(nu, n, upstream.m), C(nu, downstream.r, n);
    auto embed = [](RealKernel& dst, const RealKernel& src, int ro, int co) {
        for (const auto& [ell, block] : src.terms()) {
            Eigen::MatrixXd big = Eigen::MatrixXd::Zero(dst.rows(), dst.cols());
            big.block(ro, co, block.rows(), block.cols()) = block;
            dst.add(ell, big);
        }
    };
    embed(A, d1.A, 0, 0);
    embed(A, multiply(d2.B, d1.C), n1, 0);
    embed(A, d2.A, n1, n1);
    embed(B, d1.B, 0, 0);
    embed(B, multiply(d2.B, d1.D), n1, 0);
    embed(C, multiply(d2.D, d1.C), 0, 0);
    embed(C, d2.C, 0, n1);
    A.prune();
    B.prune();
    C.prune();

    out.dyn = DynamicsKernels{A, B, C, multiply(d2.D, d1.D)};
    return out;
}

Eigen::MatrixXcd SeriesComposite::energySft(const Eigen::VectorXd& sigma) const {
    const Eigen::MatrixXcd R1 = upstream.R.sft(sigma);
    const Eigen::MatrixXcd R2 = downstream.R.sft(sigma);
    const Eigen::MatrixXcd M1 = upstream.M.sft(sigma);
    const Eigen::MatrixXcd M2 = downstream.M.sft(sigma);
    const Eigen::MatrixXcd D1 = upstream.D.sft(sigma);
    const Eigen::MatrixXd Jm1 = ccrSymplectic(upstream.m);
    Eigen::MatrixXcd R(n1 + n2, n1 + n2);
    R.topLeftCorner(n1, n1) = R1;
    R.topRightCorner(n1, n2) = -M1.adjoint() * Jm1 * D1.adjoint() * M2;
    R.bottomLeftCorner(n2, n1) = M2.adjoint() * D1 * Jm1 * M1;
    R.bottomRightCorner(n2, n2) = R2;
    return R;
}

Eigen::MatrixXcd SeriesComposite::couplingSft(const Eigen::VectorXd& sigma) const {
    const Eigen::MatrixXcd M1 = upstream.M.sft(sigma);
    const Eigen::MatrixXcd M2 = downstream.M.sft(sigma);
    const Eigen::MatrixXcd D1 = upstream.D.sft(sigma);
    Eigen::MatrixXcd M(upstream.m, n1 + n2);
    M.leftCols(n1) = M1;
    M.rightCols(n2) = D1.adjoint() * M2;
    return M;
}

} // namespace qnet
