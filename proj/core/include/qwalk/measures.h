#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qwalk/channels.h"
#include "qwalk/evolve.h"
#include "qwalk/graphs.h"
#include "qwalk/hilbert.h"

namespace qwalk {

/// sqrt(sum_x P(x) (x - origin)^2). Requires signed line positions.
double std_dev(const Distribution &dist, std::int64_t origin = 0);

/// Unhalved total variational distance sum_x |P(x) - Q(x)|, in [0, 2].
/// Throws StructuralError unless both share the same label sequence.
double tvd(const Distribution &p, const Distribution &q);

/// Uniform over the line sites x with |x| <= T/sqrt(2) and x = T (mod 2),
/// exactly normalized, labelled -T..T like a line distribution. T = 1 has no
/// such site and throws std::invalid_argument.
Distribution uniform_line_target(int steps);
/// 1/V on every label of `like`.
Distribution uniform_like(const Distribution &like);

/// nu(p, T): TVD between the line walk after T steps and uniform_line_target(T).
double uniformity_distance(double p, int steps, NoiseModel model);

std::vector<double> log_grid(double lo, double hi, std::size_t points);
std::vector<double> linear_grid(double lo, double hi, std::size_t points);

/// Named scalars plus fit residuals, serializable as a CSV row or a text block.
struct FitResult {
    std::string name;
    std::vector<std::pair<std::string, double>> values;
    std::vector<double> residuals;
    std::vector<std::string> warnings;

    /// Throws std::out_of_range for an unknown key.
    double get(std::string_view key) const;
    void set(std::string key, double value);
};

std::string fit_csv_header(const FitResult &fit);
std::string fit_csv_row(const FitResult &fit);
std::string fit_summary(const FitResult &fit);

struct OptimalRate {
    double p_u = 0;
    double nu_min = 0;
    std::vector<double> grid;
    std::vector<double> nu;
    bool refined = false;
    bool multiple_minima = false;

    FitResult fit(int steps, NoiseModel model) const;
};

/// 25-point logarithmic grid over p*T in [0.05, 10], clipped to p <= 1.
std::vector<double> default_rate_grid(int steps);
/// Grid search for the minimum of nu(p, T), followed by one parabolic step in
/// log p around the best grid point (kept only if it improves nu).
OptimalRate find_optimal_rate(int steps, NoiseModel model, std::span<const double> grid);
OptimalRate find_optimal_rate(int steps, NoiseModel model);

struct MixingResult {
    /// Empty when the TVD is still >= epsilon at the horizon.
    std::optional<std::size_t> mixing_time;
    double epsilon = 0;
    std::size_t horizon = 0;
    /// tvd_curve[t - 1] = || time_average(t) - limit ||, t = 1..horizon.
    std::vector<double> tvd_curve;

    bool mixes() const { return mixing_time.has_value(); }
    FitResult fit(std::string name) const;
};

/// 16 N / eps for quantum runs, N^2 / (2 eps) for classical and strongly dephased runs.
std::size_t default_mixing_horizon(int n, double epsilon, bool quantum);

std::vector<double> averaged_tvd_curve(const DistributionSeries &series, const Distribution &limit,
                                       std::size_t horizon);
/// M = 1 + largest t with curve(t) >= epsilon.
MixingResult mixing_time_from_curve(std::vector<double> curve, double epsilon);
/// Mixing time of a series to the uniform distribution. Needs series.size() >= horizon.
MixingResult mixing_time(const DistributionSeries &series, double epsilon, std::size_t horizon);
/// Runs the cycle walk (pure when noise is none, exact density otherwise) for
/// `horizon` steps and measures its mixing time to uniform.
MixingResult mixing_time(int n, const NoiseSpec &noise, double epsilon, std::size_t horizon);

struct HittingCurve {
    /// One-shot: P(target, t). Concurrent: detection probability q(t) in step t.
    std::vector<double> per_step;
    /// Concurrent only: running sum of q.
    std::vector<double> cumulative;
    bool concurrent = false;
};

HittingCurve one_shot_hitting(const DistributionSeries &series, std::size_t target);
/// Leaky evolution with the target projected out after every unitary step.
/// `dephasing` may be none or any dephasing / imperfect-coin model.
HittingCurve concurrent_hitting(const WalkSpec &spec, const NoiseSpec &dephasing, int steps, std::size_t target,
                                MonitorOrder order = MonitorOrder::monitor_then_dephase, const Budget &budget = {});
/// One-shot curve at the exit root of a glued-trees walk.
HittingCurve exit_probability_glued(const WalkSpec &spec, const NoiseSpec &noise, int steps,
                                    const Budget &budget = {});

struct Peak {
    std::size_t step = 0;
    double height = 0;
};

/// First local maximum whose topographic prominence exceeds
/// `min_prominence` * max(curve). Steps where the curve is exactly zero (the
/// structurally unreachable parity on bipartite graphs) are skipped.
std::optional<Peak> first_peak(std::span<const double> curve, double min_prominence = 0.1);

struct DecayFit {
    double rate = 0;  // N + alpha
    double alpha = 0;
    double log_intercept = 0;
    std::vector<double> residuals;

    FitResult fit() const;
};

/// Least squares of ln(height) against p: height = h0 exp(-(N + alpha) p).
DecayFit fit_peak_decay(std::span<const double> rates, std::span<const double> heights, int n);

/// Unbiased classical random walk on the same graph (uniform over real edges),
/// iterated exactly from the start vertex.
DistributionSeries classical_series(const Graph &g, int steps);
MixingResult classical_mixing(int n, double epsilon, std::size_t horizon);
HittingCurve classical_hitting(const Graph &g, int steps, std::size_t target);

void write_tvd_curve_csv(std::ostream &out, const MixingResult &result);
void write_hitting_csv(std::ostream &out, const HittingCurve &curve);

}  // namespace qwalk
