#include "qwalk/hilbert.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace qwalk {

PureState::PureState(Space space) : space_(space), amps_(space.dim()) {}

PureState::PureState(Space space, std::vector<cplx> amplitudes) : space_(space), amps_(std::move(amplitudes)) {
    if (amps_.size() != space_.dim()) {
        throw StructuralError(
            "state length " + std::to_string(amps_.size()) + " does not match coin*vertex dimension " +
            std::to_string(space_.dim()));
    }
}

PureState PureState::product(Space space, std::span<const cplx> coin_state, std::size_t vertex) {
    if (coin_state.size() != space.coins) {
        throw StructuralError("coin state has " + std::to_string(coin_state.size()) + " entries, expected " +
                              std::to_string(space.coins));
    }
    if (vertex >= space.vertices) {
        throw std::invalid_argument("start vertex out of range");
    }
    PureState psi(space);
    for (std::size_t c = 0; c < space.coins; ++c) {
        psi.at({c, vertex}) = coin_state[c];
    }
    return psi;
}

double PureState::norm_squared() const {
    double s = 0;
    for (const auto &a : amps_) {
        s += std::norm(a);
    }
    return s;
}

DensityState::DensityState(Space space) : space_(space), data_(space.dim() * space.dim()) {}

DensityState::DensityState(Space space, std::vector<cplx> row_major) : space_(space), data_(std::move(row_major)) {
    if (data_.size() != space_.dim() * space_.dim()) {
        throw StructuralError("density matrix storage does not match coin*vertex dimension");
    }
}

DensityState DensityState::from_pure(const PureState &psi) {
    DensityState rho(psi.space());
    const std::size_t d = psi.dim();
    for (std::size_t r = 0; r < d; ++r) {
        if (psi[r] == cplx{}) {
            continue;
        }
        for (std::size_t c = 0; c < d; ++c) {
            rho(r, c) = psi[r] * std::conj(psi[c]);
        }
    }
    return rho;
}

DensityState DensityState::maximally_mixed(Space space) {
    DensityState rho(space);
    const double v = 1.0 / static_cast<double>(space.dim());
    for (std::size_t i = 0; i < space.dim(); ++i) {
        rho(i, i) = v;
    }
    return rho;
}

void DensityState::swap_storage(std::vector<cplx> &other) {
    if (other.size() != data_.size()) {
        throw StructuralError("replacement storage has the wrong size");
    }
    data_.swap(other);
}

double DensityState::trace() const {
    double t = 0;
    for (std::size_t i = 0; i < dim(); ++i) {
        t += (*this)(i, i).real();
    }
    return t;
}

double DensityState::hermiticity_defect() const {
    double worst = 0;
    const std::size_t d = dim();
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = r; c < d; ++c) {
            worst = std::max(worst, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
        }
    }
    return worst;
}

double DensityState::min_diagonal() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dim(); ++i) {
        m = std::min(m, (*this)(i, i).real());
    }
    return m;
}

DensityState &DensityState::operator+=(const DensityState &other) {
    if (other.space_ != space_) {
        throw StructuralError("cannot add density matrices over different spaces");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += other.data_[i];
    }
    return *this;
}

DensityState &DensityState::operator*=(double s) {
    for (auto &z : data_) {
        z *= s;
    }
    return *this;
}

double Distribution::total() const {
    return std::accumulate(probs.begin(), probs.end(), 0.0);
}

Distribution Distribution::over_vertices(std::vector<double> probs) {
    Distribution d;
    d.labels.resize(probs.size());
    std::iota(d.labels.begin(), d.labels.end(), std::int64_t{0});
    d.probs = std::move(probs);
    d.kind = LabelKind::vertex;
    return d;
}

Distribution position_marginal(std::span<const cplx> amplitudes, Space space) {
    if (amplitudes.size() != space.dim()) {
        throw StructuralError("state length " + std::to_string(amplitudes.size()) + " does not match " +
                              std::to_string(space.coins) + "*" + std::to_string(space.vertices));
    }
    std::vector<double> p(space.vertices, 0.0);
    for (std::size_t c = 0; c < space.coins; ++c) {
        const auto block = amplitudes.subspan(c * space.vertices, space.vertices);
        for (std::size_t v = 0; v < space.vertices; ++v) {
            p[v] += std::norm(block[v]);
        }
    }
    return Distribution::over_vertices(std::move(p));
}

Distribution position_marginal(const PureState &psi) {
    return position_marginal(psi.amplitudes(), psi.space());
}

Distribution position_marginal(const DensityState &rho) {
    const Space s = rho.space();
    std::vector<double> p(s.vertices, 0.0);
    for (std::size_t c = 0; c < s.coins; ++c) {
        for (std::size_t v = 0; v < s.vertices; ++v) {
            const std::size_t i = flat_index({c, v}, s.vertices);
            p[v] += rho(i, i).real();
        }
    }
    return Distribution::over_vertices(std::move(p));
}

double purity(const DensityState &rho) {
    if (rho.hermiticity_defect() > kNormTolerance) {
        throw StructuralError("purity requires a Hermitian density matrix");
    }
    // tr(rho^2) = sum_ij |rho_ij|^2 for Hermitian rho.
    double s = 0;
    for (const auto &z : rho.data()) {
        s += std::norm(z);
    }
    return s;
}

void check_density(const DensityState &rho, bool leaky, double tol) {
    const double tr = rho.trace();
    if (!std::isfinite(tr)) {
        throw NumericalDrift("density matrix trace is not finite");
    }
    if (leaky) {
        if (tr > 1.0 + tol || tr < -tol) {
            throw NumericalDrift("leaky trace left [0, 1]: " + std::to_string(tr));
        }
    } else if (std::abs(tr - 1.0) > tol) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "trace drifted to " << tr;
        throw NumericalDrift(msg.str());
    }
    if (rho.min_diagonal() < -1e-12) {
        throw NumericalDrift("negative diagonal entry in density matrix");
    }
}

void check_pure(const PureState &psi, double tol) {
    const double n = psi.norm_squared();
    if (!std::isfinite(n) || std::abs(n - 1.0) > tol) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "state norm drifted to " << n;
        throw NumericalDrift(msg.str());
    }
}

}  // namespace qwalk
