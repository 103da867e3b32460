#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"

using namespace qnet;

TEST_CASE("sft is the exact trigonometric polynomial") {
    RealKernel f(1, 1, 1);
    f.set({1}, Eigen::MatrixXd::Constant(1, 1, 1.0));
    Eigen::VectorXd sigma(1);
    sigma << 0.7;
    const auto F = f.sft(sigma);
    CHECK(std::abs(F(0, 0) - std::polar(1.0, -0.7)) < 1e-15);
}

TEST_CASE("kernel product matches pointwise SFT product") {
    std::mt19937 rng(11);
    RealKernel f(2, 2, 3), g(2, 3, 2);
    f.set({0, 0}, testing::randomMatrix(rng, 2, 3));
    f.set({1, -1}, testing::randomMatrix(rng, 2, 3));
    g.set({0, 1}, testing::randomMatrix(rng, 3, 2));
    g.set({-2, 0}, testing::randomMatrix(rng, 3, 2));
    const RealKernel h = multiply(f, g);
    for (const auto& sigma : torusGrid(2, 5)) {
        CHECK((h.sft(sigma) - f.sft(sigma) * g.sft(sigma)).norm() < 1e-13);
    }
}

TEST_CASE("inverse shifts multiply to the identity kernel") {
    RealKernel p(1, 1, 1), m(1, 1, 1);
    p.set({1}, Eigen::MatrixXd::Constant(1, 1, 1.0));
    m.set({-1}, Eigen::MatrixXd::Constant(1, 1, 1.0));
    const RealKernel h = multiply(p, m);
    CHECK(h.terms().size() == 1);
    CHECK(h.at({0})(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("adjoint kernel realizes the pointwise SFT adjoint") {
    std::mt19937 rng(12);
    RealKernel f(1, 2, 3);
    f.set({0}, testing::randomMatrix(rng, 2, 3));
    f.set({2}, testing::randomMatrix(rng, 2, 3));
    const RealKernel fa = adjoint(f);
    for (const auto& sigma : torusGrid(1, 7))
        CHECK((fa.sft(sigma) - f.sft(sigma).adjoint()).norm() < 1e-13);
}

TEST_CASE("norm1 is submultiplicative on random pairs") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        RealKernel f(1, 2, 2), g(1, 2, 2);
        for (int l = -1; l <= 1; ++l) {
            f.set({l}, testing::randomMatrix(rng, 2, 2));
            g.set({l}, testing::randomMatrix(rng, 2, 2));
        }
        CHECK(norm1(multiply(f, g)) <= norm1(f) * norm1(g) + 1e-12);
    }
}

TEST_CASE("norm1 dominates the sup of the symbol norm") {
    std::mt19937 rng(14);
    RealKernel f(1, 2, 2);
    for (int l = -2; l <= 2; ++l) f.set({l}, testing::randomMatrix(rng, 2, 2));
    const double n1 = norm1(f);
    for (const auto& sigma : torusGrid(1, 32)) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(f.sft(sigma));
        CHECK(svd.singularValues()(0) <= n1 + 1e-12);
    }
}

TEST_CASE("fragment restriction places blocks by site differences") {
    RealKernel f(1, 1, 1);
    f.set({0}, Eigen::MatrixXd::Constant(1, 1, 2.0));
    f.set({1}, Eigen::MatrixXd::Constant(1, 1, 3.0));
    const Fragment G(1, {{0}, {1}, {5}});
    const Eigen::MatrixXcd FG = restrictToFragment(f, G);
    CHECK(FG(0, 0).real() == doctest::Approx(2.0));
    CHECK(FG(1, 0).real() == doctest::Approx(3.0)); // offset 1 - 0
    CHECK(std::abs(FG(0, 1)) == doctest::Approx(0.0));
    CHECK(std::abs(FG(2, 1)) == doctest::Approx(0.0)); // offset 4 unsupported
}

TEST_CASE("cube discrepancy has the product closed form") {
    for (int nu : {1, 2}) {
        for (int L : {3, 5}) {
            const Fragment G = cubeFragment(nu, L);
            Offset ell(nu, 0);
            ell[0] = 2;
            if (nu == 2) ell[1] = -1;
            double expected = 1.0;
            for (int k = 0; k < nu; ++k)
                expected *= std::max(0.0, 1.0 - std::abs(ell[k]) / static_cast<double>(L));
            CHECK(fragmentDiscrepancy(G, ell) == doctest::Approx(1.0 - expected).epsilon(1e-12));
        }
    }
    // translate beyond the cube: discrepancy 1
    CHECK(fragmentDiscrepancy(cubeFragment(1, 4), {7}) == doctest::Approx(1.0));
}

TEST_CASE("fragment discrepancy is symmetric under ell -> -ell") {
    const Fragment G(2, {{0, 0}, {1, 0}, {0, 1}, {2, 2}});
    for (const Offset& ell : {Offset{1, 0}, Offset{-1, 1}, Offset{2, 2}})
        CHECK(fragmentDiscrepancy(G, ell) == doctest::Approx(fragmentDiscrepancy(G, negate(ell))));
}

TEST_CASE("torus grid covers [-pi, pi) uniformly") {
    const auto grid = torusGrid(2, 4);
    CHECK(grid.size() == 16);
    for (const auto& sigma : grid) {
        CHECK(sigma[0] >= -M_PI);
        CHECK(sigma[0] < M_PI);
    }
}

TEST_CASE("dimension mismatches are rejected") {
    RealKernel f(1, 2, 2);
    CHECK_THROWS_AS(f.set({0, 1}, Eigen::MatrixXd::Zero(2, 2)), DimensionMismatch);
    CHECK_THROWS_AS(f.set({0}, Eigen::MatrixXd::Zero(3, 2)), DimensionMismatch);
    RealKernel g(1, 3, 2);
    CHECK_THROWS_AS(multiply(f, g), DimensionMismatch);
    CHECK_THROWS_AS(Fragment(1, {}), InvariantViolation);
}
