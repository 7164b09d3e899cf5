#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "qwalk/coins.h"
#include "qwalk/hilbert.h"

namespace qwalk {

enum class NoiseModel { none, coin_dephase, particle_dephase, full_dephase, imperfect_coin, target_monitor };

std::string_view noise_model_name(NoiseModel model);
/// Accepts the canonical names plus the aliases "coin", "particle", "both", "full".
NoiseModel parse_noise_model(std::string_view name);

/// Decoherence selector with its per-step event probability p.
///
/// For the three dephasing models the post-unitary channel is
/// rho -> (1-p) rho + p sum_i P_i rho P_i with projectors onto the coin basis,
/// the position basis, or the full coin-position basis. `imperfect_coin` acts
/// through the coin (see ImperfectCoinSpec). `target_monitor` projects the
/// target vertex out of the state with probability p per step (p = 1 is the
/// continuously monitored walk).
struct NoiseSpec {
    NoiseModel model = NoiseModel::none;
    double p = 0;
    std::optional<std::size_t> target;

    static NoiseSpec none() { return {}; }
    static NoiseSpec dephasing(NoiseModel model, double p);
    static NoiseSpec imperfect(double p) { return {NoiseModel::imperfect_coin, p, std::nullopt}; }
    static NoiseSpec monitor(std::size_t target, double p = 1.0) { return {NoiseModel::target_monitor, p, target}; }

    bool is_dephasing() const;
    /// Throws std::invalid_argument when p is outside [0, 1] or the target is
    /// present without the monitor model (or missing with it).
    void validate() const;
};

/// Post-unitary half of one step. Dephasing models scale the off-diagonal
/// blocks in place by (1-p); other models leave rho unchanged.
void apply_channel(DensityState &rho, const NoiseSpec &noise);

/// Stochastic unraveling of apply_channel: with probability p measures psi in
/// the model's basis (Born rule) and collapses; otherwise returns psi as is.
void trajectory_collapse(PureState &psi, const NoiseSpec &noise, Rng &rng);

/// Detection probability q and the residual rho' = (1 - Pi) rho (1 - Pi), Pi
/// projecting onto every coin state at `target`. Applied in place.
///
/// With `p` < 1 the check itself happens with probability p:
/// rho' = (1-p) rho + p (1 - Pi) rho (1 - Pi) and q = p tr(Pi rho).
double monitor_target(DensityState &rho, std::size_t target, double p = 1.0);
/// Pure-state counterpart: zeroes the target amplitudes and returns their weight.
double monitor_target(PureState &psi, std::size_t target);

}  // namespace qwalk
