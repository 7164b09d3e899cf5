#include "qwalk/measures.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace qwalk {

double std_dev(const Distribution &dist, std::int64_t origin) {
    if (dist.kind != LabelKind::position) {
        throw std::invalid_argument("standard deviation needs signed line positions");
    }
    double s = 0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const double x = static_cast<double>(dist.labels[i] - origin);
        s += dist.probs[i] * x * x;
    }
    return std::sqrt(s);
}

double tvd(const Distribution &p, const Distribution &q) {
    if (p.labels != q.labels) {
        throw StructuralError("total variational distance needs identical label sets");
    }
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        s += std::abs(p.probs[i] - q.probs[i]);
    }
    return s;
}

Distribution uniform_line_target(int steps) {
    if (steps < 1) {
        throw std::invalid_argument("uniform line target needs T >= 1");
    }
    const double reach = steps / std::numbers::sqrt2;
    Distribution d;
    d.kind = LabelKind::position;
    std::size_t count = 0;
    for (std::int64_t x = -steps; x <= steps; ++x) {
        const bool in = std::abs(static_cast<double>(x)) <= reach && ((x - steps) % 2 == 0);
        d.labels.push_back(x);
        d.probs.push_back(in ? 1.0 : 0.0);
        count += in ? 1 : 0;
    }
    if (count == 0) {
        throw std::invalid_argument("uniform line target is empty for T = " + std::to_string(steps));
    }
    for (auto &p : d.probs) {
        p /= static_cast<double>(count);
    }
    return d;
}

Distribution uniform_like(const Distribution &like) {
    Distribution d = like;
    std::fill(d.probs.begin(), d.probs.end(), 1.0 / static_cast<double>(like.size()));
    return d;
}

double uniformity_distance(double p, int steps, NoiseModel model) {
    const WalkSpec spec = WalkSpec::standard(build_line(steps));
    DistributionSeries series;
    if (p == 0 || model == NoiseModel::none) {
        series = run_pure(spec, steps);
    } else {
        series = run_density(spec, NoiseSpec{model, p, std::nullopt}, steps);
    }
    return tvd(series.steps.back(), uniform_line_target(steps));
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
    if (!(lo > 0) || !(hi >= lo) || points == 0) {
        throw std::invalid_argument("log grid needs 0 < lo <= hi and at least one point");
    }
    if (points == 1) {
        return {lo};
    }
    std::vector<double> g(points);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < points; ++i) {
        g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
    }
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
    if (!(hi >= lo) || points == 0) {
        throw std::invalid_argument("linear grid needs lo <= hi and at least one point");
    }
    if (points == 1) {
        return {lo};
    }
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i) {
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    g.back() = hi;
    return g;
}

double FitResult::get(std::string_view key) const {
    for (const auto &[k, v] : values) {
        if (k == key) {
            return v;
        }
    }
    throw std::out_of_range("fit has no value '" + std::string(key) + "'");
}

void FitResult::set(std::string key, double value) {
    for (auto &[k, v] : values) {
        if (k == key) {
            v = value;
            return;
        }
    }
    values.emplace_back(std::move(key), value);
}

std::string fit_csv_header(const FitResult &fit) {
    std::string h = "name";
    for (const auto &[k, v] : fit.values) {
        h += "," + k;
    }
    h += ",residuals,warnings";
    return h;
}

std::string fit_csv_row(const FitResult &fit) {
    std::string row = fit.name;
    for (const auto &[k, v] : fit.values) {
        row += fmt::format(",{:.17g}", v);
    }
    row += ",";
    for (std::size_t i = 0; i < fit.residuals.size(); ++i) {
        row += fmt::format("{}{:.6g}", i ? ";" : "", fit.residuals[i]);
    }
    row += ",";
    for (std::size_t i = 0; i < fit.warnings.size(); ++i) {
        row += (i ? ";" : "") + fit.warnings[i];
    }
    return row;
}

std::string fit_summary(const FitResult &fit) {
    std::string s = "[" + fit.name + "]\n";
    for (const auto &[k, v] : fit.values) {
        s += fmt::format("  {:<14} {:.6g}\n", k, v);
    }
    if (!fit.residuals.empty()) {
        double rms = 0;
        for (double r : fit.residuals) {
            rms += r * r;
        }
        rms = std::sqrt(rms / static_cast<double>(fit.residuals.size()));
        s += fmt::format("  {:<14} {:.3g} over {} points\n", "residual rms", rms, fit.residuals.size());
    }
    for (const auto &w : fit.warnings) {
        s += "  warning: " + w + "\n";
    }
    return s;
}

FitResult OptimalRate::fit(int steps, NoiseModel model) const {
    FitResult f;
    f.name = fmt::format("optimal_rate/{}/T={}", noise_model_name(model), steps);
    f.set("p_u", p_u);
    f.set("p_u_T", p_u * steps);
    f.set("nu_min", nu_min);
    f.set("grid_points", static_cast<double>(grid.size()));
    f.set("refined", refined ? 1.0 : 0.0);
    if (multiple_minima) {
        f.warnings.push_back("nu(p) has several local minima on the grid");
    }
    return f;
}

std::vector<double> default_rate_grid(int steps) {
    const double t = static_cast<double>(steps);
    const double hi = std::min(1.0, 10.0 / t);
    const double lo = std::min(hi, 0.05 / t);
    return log_grid(lo, hi, 25);
}

OptimalRate find_optimal_rate(int steps, NoiseModel model, std::span<const double> grid) {
    if (grid.empty()) {
        throw std::invalid_argument("rate grid is empty");
    }
    OptimalRate r;
    r.grid.assign(grid.begin(), grid.end());
    r.nu.reserve(grid.size());
    for (double p : grid) {
        r.nu.push_back(uniformity_distance(p, steps, model));
    }
    const auto best = static_cast<std::size_t>(std::min_element(r.nu.begin(), r.nu.end()) - r.nu.begin());
    r.p_u = r.grid[best];
    r.nu_min = r.nu[best];

    std::size_t local_minima = 0;
    for (std::size_t i = 0; i < r.nu.size(); ++i) {
        const bool left = i == 0 || r.nu[i] < r.nu[i - 1];
        const bool right = i + 1 == r.nu.size() || r.nu[i] < r.nu[i + 1];
        local_minima += (left && right) ? 1 : 0;
    }
    r.multiple_minima = local_minima > 1;

    if (best > 0 && best + 1 < r.grid.size() && r.grid[best - 1] > 0) {
        // Vertex of the parabola through the three points around the minimum, in log p.
        const double x0 = std::log(r.grid[best - 1]);
        const double x1 = std::log(r.grid[best]);
        const double x2 = std::log(r.grid[best + 1]);
        const double y0 = r.nu[best - 1];
        const double y1 = r.nu[best];
        const double y2 = r.nu[best + 1];
        const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
        const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
        if (den != 0) {
            const double x = x1 - 0.5 * num / den;
            if (x > x0 && x < x2) {
                const double p = std::exp(x);
                const double nu = uniformity_distance(p, steps, model);
                if (nu < r.nu_min) {
                    r.p_u = p;
                    r.nu_min = nu;
                    r.refined = true;
                }
            }
        }
    }
    return r;
}

OptimalRate find_optimal_rate(int steps, NoiseModel model) {
    const auto grid = default_rate_grid(steps);
    return find_optimal_rate(steps, model, grid);
}

FitResult MixingResult::fit(std::string name) const {
    FitResult f;
    f.name = std::move(name);
    f.set("epsilon", epsilon);
    f.set("horizon", static_cast<double>(horizon));
    f.set("mixes", mixes() ? 1.0 : 0.0);
    f.set("M_epsilon", mixes() ? static_cast<double>(*mixing_time) : std::nan(""));
    if (!tvd_curve.empty()) {
        f.set("final_tvd", tvd_curve.back());
    }
    if (!mixes()) {
        f.warnings.push_back("does not mix within horizon");
    }
    return f;
}

std::size_t default_mixing_horizon(int n, double epsilon, bool quantum) {
    if (!(epsilon > 0)) {
        throw std::invalid_argument("epsilon must be positive");
    }
    const double nn = static_cast<double>(n);
    return static_cast<std::size_t>(std::ceil(quantum ? 16.0 * nn / epsilon : nn * nn / (2.0 * epsilon)));
}

std::vector<double> averaged_tvd_curve(const DistributionSeries &series, const Distribution &limit,
                                       std::size_t horizon) {
    if (series.size() < horizon) {
        throw std::invalid_argument("series holds " + std::to_string(series.size()) + " steps, horizon needs " +
                                    std::to_string(horizon));
    }
    std::vector<double> curve;
    curve.reserve(horizon);
    std::vector<double> running(limit.size(), 0.0);
    for (std::size_t t = 1; t <= horizon; ++t) {
        const auto &p = series[t - 1];
        if (p.labels != limit.labels) {
            throw StructuralError("series and limit distribution have different labels");
        }
        for (std::size_t i = 0; i < running.size(); ++i) {
            running[i] += p.probs[i];
        }
        const double inv = 1.0 / static_cast<double>(t);
        double s = 0;
        for (std::size_t i = 0; i < running.size(); ++i) {
            s += std::abs(running[i] * inv - limit.probs[i]);
        }
        curve.push_back(s);
    }
    return curve;
}

MixingResult mixing_time_from_curve(std::vector<double> curve, double epsilon) {
    if (!(epsilon > 0)) {
        throw std::invalid_argument("epsilon must be positive");
    }
    MixingResult r;
    r.epsilon = epsilon;
    r.horizon = curve.size();
    std::size_t last_bad = 0;
    for (std::size_t t = curve.size(); t >= 1; --t) {
        if (curve[t - 1] >= epsilon) {
            last_bad = t;
            break;
        }
    }
    if (last_bad < curve.size()) {
        r.mixing_time = last_bad + 1;
    }
    r.tvd_curve = std::move(curve);
    return r;
}

MixingResult mixing_time(const DistributionSeries &series, double epsilon, std::size_t horizon) {
    if (series.size() == 0) {
        throw std::invalid_argument("empty series");
    }
    return mixing_time_from_curve(averaged_tvd_curve(series, uniform_like(series[0]), horizon), epsilon);
}

MixingResult mixing_time(int n, const NoiseSpec &noise, double epsilon, std::size_t horizon) {
    if (horizon == 0) {
        throw std::invalid_argument("horizon must be positive");
    }
    const WalkSpec spec = WalkSpec::standard(build_cycle(n));
    const int steps = static_cast<int>(horizon) - 1;
    const DistributionSeries series =
        noise.model == NoiseModel::none || noise.p == 0 ? run_pure(spec, steps) : run_density(spec, noise, steps);
    return mixing_time(series, epsilon, horizon);
}

HittingCurve one_shot_hitting(const DistributionSeries &series, std::size_t target) {
    HittingCurve h;
    h.per_step.reserve(series.size());
    for (const auto &d : series.steps) {
        if (target >= d.size()) {
            throw std::invalid_argument("hitting target out of range");
        }
        h.per_step.push_back(d.probs[target]);
    }
    return h;
}

HittingCurve concurrent_hitting(const WalkSpec &spec, const NoiseSpec &dephasing, int steps, std::size_t target,
                                MonitorOrder order, const Budget &budget) {
    if (dephasing.model == NoiseModel::target_monitor) {
        throw std::invalid_argument("pass the unselective noise separately from the monitored target");
    }
    if (steps < 0) {
        throw std::invalid_argument("step count must be non-negative");
    }
    DensityStepper stepper(spec, dephasing, Monitor{target, 1.0, order}, budget);
    HittingCurve h;
    h.concurrent = true;
    // Monitoring starts after the first step, so q(0) = 0 even when target == start.
    h.per_step.push_back(0.0);
    h.cumulative.push_back(0.0);
    for (int t = 0; t < steps; ++t) {
        const double q = stepper.step();
        h.per_step.push_back(q);
        h.cumulative.push_back(h.cumulative.back() + q);
    }
    return h;
}

HittingCurve exit_probability_glued(const WalkSpec &spec, const NoiseSpec &noise, int steps, const Budget &budget) {
    if (spec.graph.kind() != GraphKind::glued_trees) {
        throw std::invalid_argument("exit probability needs a glued-trees walk");
    }
    const DistributionSeries series = noise.model == NoiseModel::none || noise.p == 0
                                          ? run_pure(spec, steps, budget)
                                          : run_density(spec, noise, steps, budget);
    return one_shot_hitting(series, *spec.graph.target_vertex());
}

std::optional<Peak> first_peak(std::span<const double> curve, double min_prominence) {
    std::vector<std::size_t> idx;
    for (std::size_t t = 0; t < curve.size(); ++t) {
        if (curve[t] != 0.0) {
            idx.push_back(t);
        }
    }
    if (idx.size() < 2) {
        return std::nullopt;
    }
    std::vector<double> x(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        x[i] = curve[idx[i]];
    }
    const double threshold = min_prominence * *std::max_element(x.begin(), x.end());
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && !(x[i] > x[i - 1])) {
            continue;
        }
        // Walk across a plateau; the peak must come back down afterwards.
        std::size_t j = i;
        while (j + 1 < n && x[j + 1] == x[i]) {
            ++j;
        }
        if (j + 1 >= n || !(x[j + 1] < x[i])) {
            continue;
        }
        double left_min = x[i];
        for (std::size_t k = i; k-- > 0;) {
            if (x[k] > x[i]) {
                break;
            }
            left_min = std::min(left_min, x[k]);
        }
        if (i == 0) {
            left_min = 0.0;
        }
        double right_min = x[i];
        for (std::size_t k = j + 1; k < n; ++k) {
            if (x[k] > x[i]) {
                break;
            }
            right_min = std::min(right_min, x[k]);
        }
        const double prominence = x[i] - std::max(left_min, right_min);
        if (prominence > threshold) {
            return Peak{idx[i], x[i]};
        }
    }
    return std::nullopt;
}

FitResult DecayFit::fit() const {
    FitResult f;
    f.name = "peak_decay";
    f.set("rate", rate);
    f.set("alpha", alpha);
    f.set("log_h0", log_intercept);
    f.residuals = residuals;
    return f;
}

DecayFit fit_peak_decay(std::span<const double> rates, std::span<const double> heights, int n) {
    if (rates.size() != heights.size()) {
        throw StructuralError("rates and heights differ in length");
    }
    if (rates.size() < 3) {
        throw std::invalid_argument("peak decay fit needs at least 3 grid points");
    }
    const auto m = static_cast<double>(rates.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> y(rates.size());
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (!(heights[i] > 0)) {
            throw std::invalid_argument("peak heights must be positive for a log-linear fit");
        }
        y[i] = std::log(heights[i]);
        sx += rates[i];
        sy += y[i];
        sxx += rates[i] * rates[i];
        sxy += rates[i] * y[i];
    }
    const double den = m * sxx - sx * sx;
    if (den == 0) {
        throw std::invalid_argument("peak decay fit needs at least two distinct rates");
    }
    const double slope = (m * sxy - sx * sy) / den;
    DecayFit f;
    f.log_intercept = (sy - slope * sx) / m;
    f.rate = -slope;
    f.alpha = f.rate - n;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        f.residuals.push_back(y[i] - (f.log_intercept + slope * rates[i]));
    }
    return f;
}

void write_tvd_curve_csv(std::ostream &out, const MixingResult &result) {
    out << fmt::format("# epsilon={:.17g}\n# horizon={}\n", result.epsilon, result.horizon);
    if (result.mixing_time) {
        out << "# M_epsilon=" << *result.mixing_time << '\n';
    } else {
        out << "# M_epsilon=does_not_mix\n";
    }
    out << "t,tvd\n";
    for (std::size_t t = 1; t <= result.tvd_curve.size(); ++t) {
        out << fmt::format("{},{:.17g}\n", t, result.tvd_curve[t - 1]);
    }
}

void write_hitting_csv(std::ostream &out, const HittingCurve &curve) {
    out << "# mode=" << (curve.concurrent ? "concurrent" : "one_shot") << '\n';
    out << (curve.concurrent ? "t,q,cumulative\n" : "t,probability\n");
    for (std::size_t t = 0; t < curve.per_step.size(); ++t) {
        if (curve.concurrent) {
            out << fmt::format("{},{:.17g},{:.17g}\n", t, curve.per_step[t], curve.cumulative[t]);
        } else {
            out << fmt::format("{},{:.17g}\n", t, curve.per_step[t]);
        }
    }
}

}  // namespace qwalk
