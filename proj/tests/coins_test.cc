#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qwalk/coins.h"
#include "qwalk/evolve.h"

namespace qwalk {
namespace {

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2;

void expect_identity(const CoinOp &m, double tol) {
    for (std::size_t i = 0; i < m.dim(); ++i) {
        for (std::size_t j = 0; j < m.dim(); ++j) {
            EXPECT_NEAR(std::abs(m(i, j) - (i == j ? 1.0 : 0.0)), 0.0, tol) << i << "," << j;
        }
    }
}

TEST(Hadamard, Involution) { expect_identity(hadamard() * hadamard(), 1e-15); }

TEST(Hadamard, ActsOnPlusOne) {
    const CoinOp h = hadamard();
    EXPECT_EQ(h(0, 0), cplx{kInvSqrt2});
    EXPECT_EQ(h(1, 0), cplx{kInvSqrt2});
    EXPECT_EQ(h(0, 1), cplx{kInvSqrt2});
    EXPECT_EQ(h(1, 1), cplx{-kInvSqrt2});
}

TEST(Hadamard, UnitRows) {
    const CoinOp h = hadamard();
    for (std::size_t r = 0; r < 2; ++r) {
        EXPECT_NEAR(std::norm(h(r, 0)) + std::norm(h(r, 1)), 1.0, 1e-15);
    }
}

TEST(Grover, TwoIsSwap) {
    const CoinOp g = grover(2);
    EXPECT_EQ(g(0, 0), cplx{0.0});
    EXPECT_EQ(g(0, 1), cplx{1.0});
    EXPECT_EQ(g(1, 0), cplx{1.0});
    EXPECT_EQ(g(1, 1), cplx{0.0});
}

TEST(Grover, Three) {
    const CoinOp g = grover(3);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            EXPECT_NEAR(g(i, j).real(), i == j ? -1.0 / 3 : 2.0 / 3, 1e-15);
            EXPECT_EQ(g(i, j).imag(), 0.0);
            EXPECT_EQ(g(i, j), g(j, i));
        }
    }
}

TEST(Grover, NineIsInvolution) {
    const CoinOp g = grover(9);
    EXPECT_LT(g.unitarity_defect(), 1e-12);
    expect_identity(g * g, 1e-12);
}

TEST(Grover, RejectsDegenerate) {
    EXPECT_THROW(grover(1), std::invalid_argument);
    EXPECT_THROW(grover(0), std::invalid_argument);
}

TEST(ImperfectHadamard, ZeroSpreadIsExact) {
    Rng rng(5);
    const Rng before = rng;
    const CoinOp c = sample_imperfect_hadamard({0.0}, rng);
    EXPECT_EQ(rng, before);
    const CoinOp h = hadamard();
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(c.matrix()[i], h.matrix()[i]);
    }
}

TEST(ImperfectHadamard, AngleStatistics) {
    const ImperfectCoinSpec spec{0.04};
    EXPECT_NEAR(spec.angle_sd(), 0.2 * std::numbers::pi / 4, 1e-15);
    Rng rng(11);
    const int draws = 100000;
    double sum = 0;
    for (int i = 0; i < draws; ++i) {
        const CoinOp c = sample_imperfect_hadamard(spec, rng);
        ASSERT_LT(c.unitarity_defect(), 1e-12);
        // theta/2 = atan2(sin, cos) of the first column.
        sum += 2 * std::atan2(c(1, 0).real(), c(0, 0).real());
    }
    const double mean = sum / draws;
    EXPECT_LT(std::abs(mean - std::numbers::pi / 2), 3 * spec.angle_sd() / std::sqrt(draws));
}

TEST(ImperfectHadamard, Validation) {
    EXPECT_THROW(ImperfectCoinSpec{1.5}.validate(), std::invalid_argument);
    EXPECT_THROW(ImperfectCoinSpec{-0.1}.validate(), std::invalid_argument);
}

TEST(GaussHermite, GaussianMoments) {
    // E[cos(s X)] for X ~ N(0, 1) is exp(-s^2 / 2); E[X^2] = 1.
    const auto q = gauss_hermite(64);
    ASSERT_EQ(q.nodes.size(), 64u);
    for (double s : {0.1, 0.5, 1.0, 2.0}) {
        double acc = 0;
        for (std::size_t k = 0; k < q.nodes.size(); ++k) {
            acc += q.weights[k] * std::cos(s * std::numbers::sqrt2 * q.nodes[k]);
        }
        EXPECT_NEAR(acc / std::sqrt(std::numbers::pi), std::exp(-s * s / 2), 1e-13);
    }
    double second = 0;
    for (std::size_t k = 0; k < q.nodes.size(); ++k) {
        second += q.weights[k] * 2 * q.nodes[k] * q.nodes[k];
    }
    EXPECT_NEAR(second / std::sqrt(std::numbers::pi), 1.0, 1e-13);
}

TEST(AveragedCoin, MatchesClosedForm) {
    // For rho = |0><0|, C rho C^dagger has off-diagonal cos(t/2) sin(t/2) = sin(t)/2,
    // whose Gaussian mean is sin(pi/2) exp(-sd^2/2) / 2.
    const ImperfectCoinSpec spec{0.3};
    const CoinChannel ch = averaged_imperfect_hadamard(spec);
    DensityState rho(Space{2, 1});
    rho(0, 0) = 1.0;
    apply_coin_channel(rho, ch);
    const double sd = spec.angle_sd();
    EXPECT_NEAR(rho(0, 1).real(), 0.5 * std::exp(-sd * sd / 2), 1e-13);
    // cos^2(t/2) = (1 + cos t)/2 with E[cos t] = 0 around pi/2.
    EXPECT_NEAR(rho(0, 0).real(), 0.5, 1e-13);
    EXPECT_NEAR(rho.trace(), 1.0, 1e-14);
}

TEST(AveragedCoin, ZeroSpreadIsHadamard) {
    const CoinChannel ch = averaged_imperfect_hadamard({0.0});
    const CoinChannel h = CoinChannel::from_unitary(hadamard());
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            EXPECT_NEAR(std::abs(ch(i, j) - h(i, j)), 0.0, 1e-15);
        }
    }
}

TEST(ApplyCoin, IdentityLeavesState) {
    PureState psi = PureState::product(Space{2, 3}, symmetric_line_coin(), 1);
    const PureState copy = psi;
    apply_coin(psi, identity_coin(2));
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        EXPECT_EQ(psi[i], copy[i]);
    }
}

TEST(ApplyCoin, HadamardOnSymmetricCoin) {
    PureState psi = PureState::product(Space{2, 1}, symmetric_line_coin(), 0);
    apply_coin(psi, hadamard());
    EXPECT_NEAR(std::abs(psi[0] - cplx{0.5, 0.5}), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(psi[1] - cplx{0.5, -0.5}), 0.0, 1e-15);
}

TEST(ApplyCoin, GroverFixesUniformCoin) {
    const std::vector<cplx> coin(3, 1.0 / std::sqrt(3.0));
    PureState psi = PureState::product(Space{3, 4}, coin, 2);
    const PureState copy = psi;
    apply_coin(psi, grover(3));
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        EXPECT_NEAR(std::abs(psi[i] - copy[i]), 0.0, 1e-15);
    }
}

TEST(ApplyCoin, DimensionMismatch) {
    PureState psi(Space{2, 3});
    EXPECT_THROW(apply_coin(psi, grover(3)), StructuralError);
    DensityState rho(Space{2, 3});
    EXPECT_THROW(apply_coin(rho, grover(3)), StructuralError);
}

// Dense (C (x) I) rho (C (x) I)^dagger as the oracle for the blocked density path.
TEST(ApplyCoin, DensityMatchesKroneckerOracle) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n;
    for (const CoinOp &coin : {hadamard(), grover(3), rotated_hadamard(1.1)}) {
        const Space s{coin.dim(), 3};
        const std::size_t d = s.dim();
        DensityState rho(s);
        for (auto &z : rho.data()) {
            z = {n(rng), n(rng)};
        }
        std::vector<cplx> k(d * d);
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) {
                if (r % s.vertices == c % s.vertices) {
                    k[r * d + c] = coin(r / s.vertices, c / s.vertices);
                }
            }
        }
        std::vector<cplx> expect(d * d);
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) {
                cplx acc{};
                for (std::size_t a = 0; a < d; ++a) {
                    for (std::size_t b = 0; b < d; ++b) {
                        acc += k[r * d + a] * rho(a, b) * std::conj(k[c * d + b]);
                    }
                }
                expect[r * d + c] = acc;
            }
        }
        DensityState out = rho;
        apply_coin(out, coin);
        DensityState via_channel = rho;
        apply_coin_channel(via_channel, CoinChannel::from_unitary(coin));
        for (std::size_t i = 0; i < d * d; ++i) {
            EXPECT_NEAR(std::abs(out.data()[i] - expect[i]), 0.0, 1e-12);
            EXPECT_NEAR(std::abs(via_channel.data()[i] - expect[i]), 0.0, 1e-12);
        }
    }
}

}  // namespace
}  // namespace qwalk
