#ifndef QNET_LATTICE_HPP
#define QNET_LATTICE_HPP

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "qnet/errors.hpp"

namespace qnet {

// Lattice offset ell in Z^nu.  std::vector compares lexicographically,
// which fixes a reproducible ordering for kernel supports and fragments.
using Offset = std::vector<int>;

inline Offset negate(const Offset& ell) {
    Offset out(ell.size());
    for (std::size_t k = 0; k < ell.size(); ++k) out[k] = -ell[k];
    return out;
}

inline Offset operator+(const Offset& a, const Offset& b) {
    if (a.size() != b.size()) throw DimensionMismatch("offset dimension mismatch");
    Offset out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + b[k];
    return out;
}

inline Offset operator-(const Offset& a, const Offset& b) {
    if (a.size() != b.size()) throw DimensionMismatch("offset dimension mismatch");
    Offset out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
    return out;
}

/// Finite-support map ell -> p x q block; the generator of a block Toeplitz
/// matrix f = (f_{j-k}) on Z^nu.  Zero blocks outside the stored support.
template <typename Scalar>
class BlockKernel {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using TermMap = std::map<Offset, Matrix>;

    BlockKernel(int nu, int rows, int cols) : nu_(nu), rows_(rows), cols_(cols) {
        if (nu < 1) throw InvariantViolation("lattice dimension must be >= 1");
        if (rows < 1 || cols < 1) throw InvariantViolation("block dimensions must be >= 1");
    }

    int nu() const { return nu_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const TermMap& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    void set(const Offset& ell, const Matrix& block) {
        checkOffset(ell);
        if (block.rows() != rows_ || block.cols() != cols_)
            throw DimensionMismatch("block size does not match kernel dimensions");
        terms_[ell] = block;
    }

    void add(const Offset& ell, const Matrix& block) {
        checkOffset(ell);
        if (block.rows() != rows_ || block.cols() != cols_)
            throw DimensionMismatch("block size does not match kernel dimensions");
        auto it = terms_.find(ell);
        if (it == terms_.end())
            terms_[ell] = block;
        else
            it->second += block;
    }

    /// Block at ell, zero if outside the support.
    Matrix at(const Offset& ell) const {
        checkOffset(ell);
        auto it = terms_.find(ell);
        if (it == terms_.end()) return Matrix::Zero(rows_, cols_);
        return it->second;
    }

    /// Spatial Fourier transform sum_ell exp(-i ell.sigma) f_ell; exact
    /// (trigonometric polynomial, no truncation).
    Eigen::MatrixXcd sft(const Eigen::VectorXd& sigma) const {
        if (sigma.size() != nu_) throw DimensionMismatch("sigma dimension does not match kernel lattice dimension");
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rows_, cols_);
        for (const auto& [ell, block] : terms_) {
            double phase = 0.0;
            for (int k = 0; k < nu_; ++k) phase -= ell[k] * sigma[k];
            out += std::polar(1.0, phase) * block.template cast<std::complex<double>>();
        }
        return out;
    }

    /// Drop blocks with norm below tol.
    void prune(double tol = 0.0) {
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (it->second.norm() <= tol)
                it = terms_.erase(it);
            else
                ++it;
        }
    }

private:
    void checkOffset(const Offset& ell) const {
        if (static_cast<int>(ell.size()) != nu_)
            throw DimensionMismatch("offset dimension does not match kernel lattice dimension");
    }

    int nu_;
    int rows_, cols_;
    TermMap terms_;
};

using RealKernel = BlockKernel<double>;
using ComplexKernel = BlockKernel<std::complex<double>>;

/// Convolution product h_j = sum_k f_{j-k} g_k, the block Toeplitz matrix
/// product; SFT(h) = SFT(f) SFT(g) pointwise.
template <typename Scalar>
BlockKernel<Scalar> multiply(const BlockKernel<Scalar>& f, const BlockKernel<Scalar>& g) {
    if (f.nu() != g.nu()) throw DimensionMismatch("kernel lattice dimensions differ");
    if (f.cols() != g.rows()) throw DimensionMismatch("inner block dimensions differ");
    BlockKernel<Scalar> h(f.nu(), f.rows(), g.cols());
    for (const auto& [lf, bf] : f.terms())
        for (const auto& [lg, bg] : g.terms())
            h.add(lf + lg, bf * bg);
    h.prune();
    return h;
}

/// Adjoint kernel: block at ell is f_{-ell}^*; SFT of the result is SFT(f)^*.
template <typename Scalar>
BlockKernel<Scalar> adjoint(const BlockKernel<Scalar>& f) {
    BlockKernel<Scalar> out(f.nu(), f.cols(), f.rows());
    for (const auto& [ell, block] : f.terms()) out.set(negate(ell), block.adjoint());
    return out;
}

template <typename Scalar>
BlockKernel<Scalar> scale(const BlockKernel<Scalar>& f, Scalar c) {
    BlockKernel<Scalar> out(f.nu(), f.rows(), f.cols());
    for (const auto& [ell, block] : f.terms()) out.set(ell, c * block);
    return out;
}

template <typename Scalar>
BlockKernel<Scalar> add(const BlockKernel<Scalar>& f, const BlockKernel<Scalar>& g) {
    if (f.nu() != g.nu() || f.rows() != g.rows() || f.cols() != g.cols())
        throw DimensionMismatch("kernel shapes differ");
    BlockKernel<Scalar> out = f;
    for (const auto& [ell, block] : g.terms()) out.add(ell, block);
    out.prune();
    return out;
}

/// Banach algebra norm: sum over the support of the largest singular value.
template <typename Scalar>
double norm1(const BlockKernel<Scalar>& f) {
    double s = 0.0;
    for (const auto& [ell, block] : f.terms()) {
        Eigen::JacobiSVD<typename BlockKernel<Scalar>::Matrix> svd(block);
        s += svd.singularValues()(0);
    }
    return s;
}

/// Finite ordered fragment G of Z^nu, lexicographic site order.
class Fragment {
public:
    Fragment(int nu, std::vector<Offset> sites) : nu_(nu) {
        if (sites.empty()) throw InvariantViolation("fragment must contain at least one site");
        for (const auto& s : sites)
            if (static_cast<int>(s.size()) != nu) throw DimensionMismatch("site dimension does not match fragment lattice dimension");
        std::sort(sites.begin(), sites.end());
        sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
        sites_ = std::move(sites);
        for (std::size_t i = 0; i < sites_.size(); ++i) index_[sites_[i]] = static_cast<int>(i);
    }

    int nu() const { return nu_; }
    int size() const { return static_cast<int>(sites_.size()); }
    const std::vector<Offset>& sites() const { return sites_; }
    const Offset& site(int i) const { return sites_.at(i); }
    bool contains(const Offset& s) const { return index_.count(s) > 0; }

private:
    int nu_;
    std::vector<Offset> sites_;
    std::map<Offset, int> index_;
};

/// Cube {0,...,L-1}^nu with L^nu sites.
inline Fragment cubeFragment(int nu, int L) {
    if (L < 1) throw InvariantViolation("cube side must be >= 1");
    std::vector<Offset> sites;
    Offset cur(nu, 0);
    while (true) {
        sites.push_back(cur);
        int k = nu - 1;
        while (k >= 0) {
            if (++cur[k] < L) break;
            cur[k] = 0;
            --k;
        }
        if (k < 0) break;
    }
    return Fragment(nu, std::move(sites));
}

/// Relative discrepancy Delta_G(ell) = #(G \ (G+ell)) / #G between the
/// fragment and its translate; symmetric in ell.
inline double fragmentDiscrepancy(const Fragment& G, const Offset& ell) {
    if (static_cast<int>(ell.size()) != G.nu()) throw DimensionMismatch("offset dimension does not match fragment");
    int missed = 0;
    for (const auto& s : G.sites())
        if (!G.contains(s - ell)) ++missed;
    return static_cast<double>(missed) / G.size();
}

/// Dense restriction f_G = (f_{G[a]-G[b]})_{a,b}; requires square blocks.
template <typename Scalar>
Eigen::MatrixXcd restrictToFragment(const BlockKernel<Scalar>& f, const Fragment& G) {
    if (f.rows() != f.cols()) throw DimensionMismatch("fragment restriction requires square-blocked kernel");
    if (f.nu() != G.nu()) throw DimensionMismatch("kernel and fragment lattice dimensions differ");
    const int p = f.rows();
    const int N = G.size();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(p * N, p * N);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            out.block(a * p, b * p, p, p) = f.at(G.site(a) - G.site(b)).template cast<std::complex<double>>();
    return out;
}

/// Uniform tensor grid over [-pi,pi)^nu with N points per dimension.
inline std::vector<Eigen::VectorXd> torusGrid(int nu, int N) {
    if (N < 1) throw InvariantViolation("torus grid size must be >= 1");
    std::vector<Eigen::VectorXd> grid;
    const double h = 2.0 * M_PI / N;
    std::vector<int> idx(nu, 0);
    while (true) {
        Eigen::VectorXd sigma(nu);
        for (int k = 0; k < nu; ++k) sigma[k] = -M_PI + idx[k] * h;
        grid.push_back(sigma);
        int k = nu - 1;
        while (k >= 0) {
            if (++idx[k] < N) break;
            idx[k] = 0;
            --k;
        }
        if (k < 0) break;
    }
    return grid;
}

} // namespace qnet

#endif
