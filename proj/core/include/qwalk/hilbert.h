#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qwalk {

using cplx = std::complex<double>;

/// Raised when a state, operator or distribution has the wrong shape for the
/// operation it is handed (dimension or label-set mismatch, non-Hermitian
/// density matrix, ...).
class StructuralError : public std::logic_error {
   public:
    using std::logic_error::logic_error;
};

/// Raised when trace or norm drifts beyond tolerance during evolution. States
/// are never renormalized silently.
class NumericalDrift : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Raised when a run would exceed a configured resource budget.
class BudgetExceeded : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kNormTolerance = 1e-10;

/// Coin (x) vertex basis. Flat indices are coin-major: coin * vertices + vertex,
/// so the conditional shift acts as a permutation inside each coin block.
struct Space {
    std::size_t coins = 0;
    std::size_t vertices = 0;

    constexpr std::size_t dim() const { return coins * vertices; }
    constexpr bool operator==(const Space &) const = default;
};

struct BasisLabel {
    std::size_t coin = 0;
    std::size_t vertex = 0;

    constexpr bool operator==(const BasisLabel &) const = default;
};

constexpr std::size_t flat_index(BasisLabel label, std::size_t vertices) {
    return label.coin * vertices + label.vertex;
}

constexpr BasisLabel basis_label(std::size_t flat, std::size_t vertices) {
    return {flat / vertices, flat % vertices};
}

class PureState {
   public:
    PureState() = default;
    /// Zero vector over the space.
    explicit PureState(Space space);
    /// Throws StructuralError if amplitudes.size() != space.dim().
    PureState(Space space, std::vector<cplx> amplitudes);

    /// |coin> (x) |vertex>, with `coin_state` of length space.coins.
    static PureState product(Space space, std::span<const cplx> coin_state, std::size_t vertex);

    const Space &space() const { return space_; }
    std::size_t dim() const { return amps_.size(); }
    std::span<cplx> amplitudes() { return amps_; }
    std::span<const cplx> amplitudes() const { return amps_; }
    cplx &operator[](std::size_t i) { return amps_[i]; }
    const cplx &operator[](std::size_t i) const { return amps_[i]; }
    cplx &at(BasisLabel b) { return amps_[flat_index(b, space_.vertices)]; }
    const cplx &at(BasisLabel b) const { return amps_[flat_index(b, space_.vertices)]; }

    double norm_squared() const;

   private:
    Space space_{};
    std::vector<cplx> amps_;
};

/// Dense row-major density matrix over coin (x) vertex.
class DensityState {
   public:
    DensityState() = default;
    explicit DensityState(Space space);
    DensityState(Space space, std::vector<cplx> row_major);

    static DensityState from_pure(const PureState &psi);
    static DensityState maximally_mixed(Space space);

    const Space &space() const { return space_; }
    std::size_t dim() const { return space_.dim(); }
    cplx &operator()(std::size_t r, std::size_t c) { return data_[r * dim() + c]; }
    const cplx &operator()(std::size_t r, std::size_t c) const { return data_[r * dim() + c]; }
    std::span<cplx> data() { return data_; }
    std::span<const cplx> data() const { return data_; }
    std::span<cplx> row(std::size_t r) { return std::span<cplx>(data_).subspan(r * dim(), dim()); }
    std::span<const cplx> row(std::size_t r) const { return std::span<const cplx>(data_).subspan(r * dim(), dim()); }

    /// Exchanges the backing storage with `other`, which must hold dim()^2 entries.
    void swap_storage(std::vector<cplx> &other);

    double trace() const;
    /// max |rho - rho^dagger| entry.
    double hermiticity_defect() const;
    double min_diagonal() const;

    DensityState &operator+=(const DensityState &other);
    DensityState &operator*=(double s);

   private:
    Space space_{};
    std::vector<cplx> data_;
};

enum class LabelKind { position, vertex };

/// Probability over vertices. For line walks labels are signed positions,
/// otherwise they are vertex ids.
struct Distribution {
    std::vector<double> probs;
    std::vector<std::int64_t> labels;
    LabelKind kind = LabelKind::vertex;

    std::size_t size() const { return probs.size(); }
    double total() const;
    double operator[](std::size_t i) const { return probs[i]; }

    static Distribution over_vertices(std::vector<double> probs);
};

Distribution position_marginal(const PureState &psi);
Distribution position_marginal(const DensityState &rho);
/// Raw-amplitude form; throws StructuralError on length mismatch.
Distribution position_marginal(std::span<const cplx> amplitudes, Space space);

/// tr(rho^2). Throws StructuralError if rho is not Hermitian to 1e-10.
double purity(const DensityState &rho);

/// Throws NumericalDrift if rho violates the density-matrix invariants. With
/// `leaky` the trace only has to lie in [0, 1 + tol].
void check_density(const DensityState &rho, bool leaky = false, double tol = kNormTolerance);
void check_pure(const PureState &psi, double tol = kNormTolerance);

}  // namespace qwalk
