#include "qwalk/coins.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qwalk {

CoinOp::CoinOp(std::size_t dim, std::vector<cplx> row_major) : dim_(dim), m_(std::move(row_major)) {
    if (m_.size() != dim_ * dim_) {
        throw StructuralError("coin matrix has " + std::to_string(m_.size()) + " entries, expected " +
                              std::to_string(dim_ * dim_));
    }
}

double CoinOp::unitarity_defect() const {
    double worst = 0;
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            cplx s = 0;
            for (std::size_t k = 0; k < dim_; ++k) {
                s += std::conj((*this)(k, i)) * (*this)(k, j);
            }
            worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    }
    return worst;
}

CoinOp CoinOp::operator*(const CoinOp &rhs) const {
    if (rhs.dim_ != dim_) {
        throw StructuralError("coin dimension mismatch in product");
    }
    std::vector<cplx> out(dim_ * dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            cplx s = 0;
            for (std::size_t k = 0; k < dim_; ++k) {
                s += (*this)(i, k) * rhs(k, j);
            }
            out[i * dim_ + j] = s;
        }
    }
    return {dim_, std::move(out)};
}

CoinOp hadamard() {
    return rotated_hadamard(std::numbers::pi / 2);
}

CoinOp grover(std::size_t c) {
    if (c < 2) {
        throw std::invalid_argument("Grover coin needs dimension >= 2");
    }
    std::vector<cplx> m(c * c, 2.0 / static_cast<double>(c));
    for (std::size_t i = 0; i < c; ++i) {
        m[i * c + i] -= 1.0;
    }
    CoinOp g(c, std::move(m));
    g.grover_ = true;
    return g;
}

CoinOp identity_coin(std::size_t c) {
    std::vector<cplx> m(c * c);
    for (std::size_t i = 0; i < c; ++i) {
        m[i * c + i] = 1.0;
    }
    return {c, std::move(m)};
}

CoinOp rotated_hadamard(double theta) {
    double cs = std::cos(theta / 2);
    double sn = std::sin(theta / 2);
    if (theta == std::numbers::pi / 2) {
        // cos(pi/4) and sin(pi/4) differ in the last ulp; pin both to 1/sqrt(2).
        cs = sn = std::numbers::sqrt2 / 2;
    }
    return {2, {cs, sn, sn, -cs}};
}

double ImperfectCoinSpec::angle_sd() const {
    return std::sqrt(p) * std::numbers::pi / 4;
}

void ImperfectCoinSpec::validate() const {
    if (!(p >= 0 && p <= 1)) {
        throw std::invalid_argument("imperfect coin strength p must lie in [0, 1]");
    }
}

CoinOp sample_imperfect_hadamard(const ImperfectCoinSpec &spec, Rng &rng) {
    spec.validate();
    if (spec.p == 0) {
        return hadamard();
    }
    std::normal_distribution<double> angle(std::numbers::pi / 2, spec.angle_sd());
    return rotated_hadamard(angle(rng));
}

Quadrature gauss_hermite(std::size_t points) {
    if (points == 0) {
        throw std::invalid_argument("quadrature needs at least one point");
    }
    // Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of the Hermite
    // recurrence, weights come from the first eigenvector components.
    const auto n = static_cast<Eigen::Index>(points);
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k) {
        const double b = std::sqrt(static_cast<double>(k) / 2.0);
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    Quadrature q;
    q.nodes.resize(points);
    q.weights.resize(points);
    const double mu0 = std::sqrt(std::numbers::pi);
    for (Eigen::Index i = 0; i < n; ++i) {
        q.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
        const double v0 = solver.eigenvectors()(0, i);
        q.weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
    }
    return q;
}

CoinChannel::CoinChannel(std::size_t dim, std::vector<cplx> superop) : dim_(dim), m_(std::move(superop)) {
    if (m_.size() != dim_ * dim_ * dim_ * dim_) {
        throw StructuralError("coin superoperator has the wrong size");
    }
}

CoinChannel CoinChannel::from_unitary(const CoinOp &u) {
    const std::size_t c = u.dim();
    const std::size_t c2 = c * c;
    std::vector<cplx> m(c2 * c2);
    for (std::size_t a = 0; a < c; ++a) {
        for (std::size_t b = 0; b < c; ++b) {
            for (std::size_t x = 0; x < c; ++x) {
                for (std::size_t y = 0; y < c; ++y) {
                    m[(a * c + b) * c2 + (x * c + y)] = u(a, x) * std::conj(u(b, y));
                }
            }
        }
    }
    return {c, std::move(m)};
}

CoinChannel averaged_imperfect_hadamard(const ImperfectCoinSpec &spec, std::size_t points) {
    spec.validate();
    if (spec.p == 0) {
        return CoinChannel::from_unitary(hadamard());
    }
    const Quadrature q = gauss_hermite(points);
    const double sd = spec.angle_sd();
    std::vector<cplx> m(16, 0.0);
    for (std::size_t k = 0; k < points; ++k) {
        const double theta = std::numbers::pi / 2 + std::numbers::sqrt2 * sd * q.nodes[k];
        const double w = q.weights[k] / std::sqrt(std::numbers::pi);
        const CoinChannel one = CoinChannel::from_unitary(rotated_hadamard(theta));
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                m[i * 4 + j] += w * one(i, j);
            }
        }
    }
    return {2, std::move(m)};
}

void apply_coin(PureState &psi, const CoinOp &coin) {
    const Space s = psi.space();
    if (coin.dim() != s.coins) {
        throw StructuralError("coin dimension does not match state");
    }
    const std::size_t c = s.coins;
    const std::size_t v = s.vertices;
    auto amps = psi.amplitudes();
    std::vector<cplx> in(c);
    if (coin.is_grover()) {
        const double two_over_c = 2.0 / static_cast<double>(c);
        for (std::size_t x = 0; x < v; ++x) {
            cplx sum = 0;
            for (std::size_t a = 0; a < c; ++a) {
                sum += amps[a * v + x];
            }
            sum *= two_over_c;
            for (std::size_t a = 0; a < c; ++a) {
                amps[a * v + x] = sum - amps[a * v + x];
            }
        }
        return;
    }
    for (std::size_t x = 0; x < v; ++x) {
        for (std::size_t a = 0; a < c; ++a) {
            in[a] = amps[a * v + x];
        }
        for (std::size_t a = 0; a < c; ++a) {
            cplx acc = 0;
            for (std::size_t b = 0; b < c; ++b) {
                acc += coin(a, b) * in[b];
            }
            amps[a * v + x] = acc;
        }
    }
}

namespace {

// rho -> (C (x) I) rho: mixes the coin blocks of rows sharing a vertex.
void coin_rows(DensityState &rho, const CoinOp &coin) {
    const Space s = rho.space();
    const std::size_t c = s.coins;
    const std::size_t v = s.vertices;
    const std::size_t d = s.dim();
    std::vector<cplx> tmp(c * d);
    for (std::size_t x = 0; x < v; ++x) {
        if (coin.is_grover()) {
            std::fill(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(d), cplx{});
            for (std::size_t b = 0; b < c; ++b) {
                const auto row = rho.row(b * v + x);
                for (std::size_t k = 0; k < d; ++k) {
                    tmp[k] += row[k];
                }
            }
            const double two_over_c = 2.0 / static_cast<double>(c);
            for (std::size_t a = 0; a < c; ++a) {
                auto row = rho.row(a * v + x);
                for (std::size_t k = 0; k < d; ++k) {
                    row[k] = two_over_c * tmp[k] - row[k];
                }
            }
            continue;
        }
        for (std::size_t b = 0; b < c; ++b) {
            const auto row = rho.row(b * v + x);
            std::copy(row.begin(), row.end(), tmp.begin() + static_cast<std::ptrdiff_t>(b * d));
        }
        for (std::size_t a = 0; a < c; ++a) {
            auto row = rho.row(a * v + x);
            std::fill(row.begin(), row.end(), cplx{});
            for (std::size_t b = 0; b < c; ++b) {
                const cplx u = coin(a, b);
                if (u == cplx{}) {
                    continue;
                }
                const cplx *src = tmp.data() + b * d;
                for (std::size_t k = 0; k < d; ++k) {
                    row[k] += u * src[k];
                }
            }
        }
    }
}

// rho -> rho (C (x) I)^dagger: mixes coin blocks of columns within each row.
void coin_cols(DensityState &rho, const CoinOp &coin) {
    const Space s = rho.space();
    const std::size_t c = s.coins;
    const std::size_t v = s.vertices;
    const std::size_t d = s.dim();
    std::vector<cplx> conj_coin(c * c);
    for (std::size_t a = 0; a < c; ++a) {
        for (std::size_t b = 0; b < c; ++b) {
            conj_coin[a * c + b] = std::conj(coin(a, b));
        }
    }
    std::vector<cplx> in(c);
    const double two_over_c = 2.0 / static_cast<double>(c);
    for (std::size_t r = 0; r < d; ++r) {
        auto row = rho.row(r);
        for (std::size_t w = 0; w < v; ++w) {
            if (coin.is_grover()) {
                cplx sum = 0;
                for (std::size_t b = 0; b < c; ++b) {
                    sum += row[b * v + w];
                }
                sum *= two_over_c;
                for (std::size_t a = 0; a < c; ++a) {
                    row[a * v + w] = sum - row[a * v + w];
                }
                continue;
            }
            for (std::size_t b = 0; b < c; ++b) {
                in[b] = row[b * v + w];
            }
            for (std::size_t a = 0; a < c; ++a) {
                cplx acc = 0;
                for (std::size_t b = 0; b < c; ++b) {
                    acc += in[b] * conj_coin[a * c + b];
                }
                row[a * v + w] = acc;
            }
        }
    }
}

}  // namespace

void apply_coin(DensityState &rho, const CoinOp &coin) {
    if (coin.dim() != rho.space().coins) {
        throw StructuralError("coin dimension does not match density matrix");
    }
    coin_rows(rho, coin);
    coin_cols(rho, coin);
}

void apply_coin_channel(DensityState &rho, const CoinChannel &channel) {
    const Space s = rho.space();
    if (channel.dim() != s.coins) {
        throw StructuralError("coin channel dimension does not match density matrix");
    }
    const std::size_t c = s.coins;
    const std::size_t c2 = c * c;
    const std::size_t v = s.vertices;
    std::vector<cplx> in(c2);
    for (std::size_t x = 0; x < v; ++x) {
        for (std::size_t y = 0; y < v; ++y) {
            for (std::size_t a = 0; a < c; ++a) {
                for (std::size_t b = 0; b < c; ++b) {
                    in[a * c + b] = rho(a * v + x, b * v + y);
                }
            }
            for (std::size_t a = 0; a < c; ++a) {
                for (std::size_t b = 0; b < c; ++b) {
                    cplx acc = 0;
                    for (std::size_t k = 0; k < c2; ++k) {
                        acc += channel(a * c + b, k) * in[k];
                    }
                    rho(a * v + x, b * v + y) = acc;
                }
            }
        }
    }
}

}  // namespace qwalk
