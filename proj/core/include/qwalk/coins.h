#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "qwalk/hilbert.h"

namespace qwalk {

using Rng = std::mt19937_64;

/// A C x C unitary acting on the coin register only.
class CoinOp {
   public:
    CoinOp() = default;
    /// Row-major `dim` x `dim` matrix. Throws StructuralError on a size mismatch.
    CoinOp(std::size_t dim, std::vector<cplx> row_major);

    std::size_t dim() const { return dim_; }
    cplx operator()(std::size_t r, std::size_t c) const { return m_[r * dim_ + c]; }
    std::span<const cplx> matrix() const { return m_; }
    /// True when built by grover(); enables the O(C) application path.
    bool is_grover() const { return grover_; }

    /// max |U^dagger U - I| entry.
    double unitarity_defect() const;
    CoinOp operator*(const CoinOp &rhs) const;

   private:
    friend CoinOp grover(std::size_t c);

    std::size_t dim_ = 0;
    std::vector<cplx> m_;
    bool grover_ = false;
};

/// Coin 0 is |+1> (move right), coin 1 is |-1>: H|a> = (a|a> + |-a>)/sqrt(2).
CoinOp hadamard();
/// G_jk = 2/C - delta_jk.
CoinOp grover(std::size_t c);
CoinOp identity_coin(std::size_t c);

/// Real one-parameter family through the Hadamard:
/// [[cos(theta/2), sin(theta/2)], [sin(theta/2), -cos(theta/2)]], equal to H at theta = pi/2.
CoinOp rotated_hadamard(double theta);

/// Gaussian spread of the Hadamard mixing angle: mean pi/2, sd sqrt(p)*pi/4.
struct ImperfectCoinSpec {
    double p = 0;

    double angle_sd() const;
    void validate() const;
};

/// Draws theta and returns rotated_hadamard(theta). p == 0 consumes no randomness.
CoinOp sample_imperfect_hadamard(const ImperfectCoinSpec &spec, Rng &rng);

/// Nodes and weights for integrals against exp(-x^2) (physicists' convention).
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};
Quadrature gauss_hermite(std::size_t points);

/// Coin-register superoperator rho_ab -> sum_cd M[(a,b),(c,d)] rho_cd, i.e. the
/// average of C rho C^dagger over a coin ensemble, acting blockwise on rho.
class CoinChannel {
   public:
    CoinChannel(std::size_t dim, std::vector<cplx> superop);
    static CoinChannel from_unitary(const CoinOp &u);

    std::size_t dim() const { return dim_; }
    cplx operator()(std::size_t ab, std::size_t cd) const { return m_[ab * dim_ * dim_ + cd]; }

   private:
    std::size_t dim_ = 0;
    std::vector<cplx> m_;
};

/// Average of C(theta) . C(theta)^dagger over the imperfect-Hadamard Gaussian,
/// via Gauss-Hermite quadrature.
CoinChannel averaged_imperfect_hadamard(const ImperfectCoinSpec &spec, std::size_t points = 64);

/// psi -> (C (x) I) psi.
void apply_coin(PureState &psi, const CoinOp &coin);
/// rho -> (C (x) I) rho (C (x) I)^dagger.
void apply_coin(DensityState &rho, const CoinOp &coin);
void apply_coin_channel(DensityState &rho, const CoinChannel &channel);

}  // namespace qwalk
