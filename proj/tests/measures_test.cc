#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "qwalk/measures.h"

namespace qwalk {
namespace {

Distribution line_dist(std::vector<double> probs) {
    Distribution d;
    const auto half = static_cast<std::int64_t>(probs.size() / 2);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        d.labels.push_back(static_cast<std::int64_t>(i) - half);
    }
    d.probs = std::move(probs);
    d.kind = LabelKind::position;
    return d;
}

TEST(StdDev, PointMass) { EXPECT_EQ(std_dev(line_dist({0, 1, 0})), 0.0); }

TEST(StdDev, PureWalk) {
    const auto s = run_pure(WalkSpec::standard(build_line(100)), 100);
    EXPECT_NEAR(std_dev(s.steps.back()), std::sqrt(1 - 1 / std::numbers::sqrt2) * 100, 0.005 * 54.12);
}

TEST(StdDev, ClassicalBaseline) {
    const auto s = classical_series(build_line(100), 100);
    EXPECT_NEAR(std_dev(s.steps.back()), 10.0, 1e-10);
}

TEST(StdDev, RejectsVertexLabels) {
    EXPECT_THROW(std_dev(Distribution::over_vertices({1.0})), std::invalid_argument);
}

TEST(Tvd, Basics) {
    const auto p = line_dist({0.5, 0.5, 0});
    const auto q = line_dist({0, 0, 1});
    EXPECT_EQ(tvd(p, p), 0.0);
    EXPECT_NEAR(tvd(p, q), 2.0, 1e-15);
    EXPECT_THROW(tvd(p, Distribution::over_vertices({1, 0})), StructuralError);
}

TEST(UniformLineTarget, ShortWalk) {
    const auto u = uniform_line_target(2);
    for (std::size_t i = 0; i < u.size(); ++i) {
        EXPECT_EQ(u.probs[i], u.labels[i] == 0 ? 1.0 : 0.0);
    }
}

TEST(UniformLineTarget, SupportAtTwoHundred) {
    // Independent count: even x with |x| <= 200/sqrt(2) = 141.42 is -140..140, i.e. 141 sites.
    const auto u = uniform_line_target(200);
    std::size_t count = 0;
    double total = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u.probs[i] > 0) {
            ++count;
            EXPECT_EQ(u.labels[i] % 2, 0);
            EXPECT_LE(std::abs(u.labels[i]), 140);
        }
        total += u.probs[i];
    }
    EXPECT_EQ(count, 141u);
    EXPECT_NEAR(total, 1.0, 1e-14);
    EXPECT_NEAR(1.0 / count, std::numbers::sqrt2 / 200, 1e-4);
}

TEST(UniformLineTarget, NormalizedForManyT) {
    EXPECT_THROW(uniform_line_target(1), std::invalid_argument);
    for (int t = 2; t < 60; ++t) {
        const auto u = uniform_line_target(t);
        double total = 0;
        for (double p : u.probs) {
            total += p;
        }
        EXPECT_NEAR(total, 1.0, 1e-14) << t;
    }
}

TEST(UniformityDistance, ClassicalCrossCheck) {
    const int steps = 40;
    const double nu = uniformity_distance(1.0, steps, NoiseModel::full_dephase);
    const auto classical = classical_series(build_line(steps), steps);
    EXPECT_NEAR(nu, tvd(classical.steps.back(), uniform_line_target(steps)), 1e-10);
}

TEST(OptimalRate, ScalesAsInverseT) {
    const auto a = find_optimal_rate(50, NoiseModel::full_dephase);
    const auto b = find_optimal_rate(100, NoiseModel::full_dephase);
    EXPECT_NEAR(a.p_u * 50 / (b.p_u * 100), 1.0, 0.15);
    EXPECT_LT(b.nu_min, uniformity_distance(0, 100, NoiseModel::none));
}

TEST(OptimalRate, DefaultGrid) {
    const auto g = default_rate_grid(200);
    ASSERT_EQ(g.size(), 25u);
    EXPECT_NEAR(g.front() * 200, 0.05, 1e-12);
    EXPECT_NEAR(g.back() * 200, 10, 1e-12);
    const auto small = default_rate_grid(5);
    EXPECT_LE(small.back(), 1.0);
}

TEST(OptimalRate, EmptyGrid) {
    EXPECT_THROW(find_optimal_rate(10, NoiseModel::full_dephase, std::vector<double>{}), std::invalid_argument);
}

TEST(Grids, Endpoints) {
    const auto l = log_grid(0.01, 1, 3);
    EXPECT_DOUBLE_EQ(l[1], 0.1);
    const auto g = linear_grid(0, 1, 5);
    EXPECT_DOUBLE_EQ(g[2], 0.5);
    EXPECT_THROW(log_grid(0, 1, 3), std::invalid_argument);
}

TEST(MixingTime, FromCurve) {
    const auto r = mixing_time_from_curve({1.0, 0.5, 0.2, 0.05, 0.3, 0.01, 0.001}, 0.1);
    ASSERT_TRUE(r.mixes());
    EXPECT_EQ(*r.mixing_time, 6u);
    EXPECT_EQ(r.horizon, 7u);
}

TEST(MixingTime, NeverSettles) {
    const auto r = mixing_time_from_curve({1.0, 0.5, 0.2}, 0.1);
    EXPECT_FALSE(r.mixes());
}

TEST(MixingTime, OddCycleMixes) {
    const auto r = mixing_time(29, NoiseSpec::none(), 0.01, default_mixing_horizon(29, 0.01, true));
    ASSERT_TRUE(r.mixes());
    for (std::size_t t = *r.mixing_time; t <= r.horizon; ++t) {
        EXPECT_LT(r.tvd_curve[t - 1], 0.01);
    }
}

TEST(MixingTime, EvenCycleDoesNotMix) {
    const auto r = mixing_time(30, NoiseSpec::none(), 0.01, default_mixing_horizon(30, 0.01, true));
    EXPECT_FALSE(r.mixes());
    EXPECT_EQ(r.horizon, 48000u);
}

TEST(MixingTime, ClassicalValue) {
    // Oracle: the N^2 / 16 eps law, loose enough for a single N.
    const auto r = classical_mixing(20, 0.01, default_mixing_horizon(20, 0.01, false));
    ASSERT_TRUE(r.mixes());
    EXPECT_NEAR(static_cast<double>(*r.mixing_time) / 2500.0, 1.0, 0.15);
}

TEST(MixingTime, SerializesResult) {
    const auto r = mixing_time_from_curve({0.5, 0.2, 0.01}, 0.1);
    const auto f = r.fit("cycle");
    EXPECT_EQ(f.get("M_epsilon"), 3.0);
    EXPECT_EQ(fit_csv_header(f), "name,epsilon,horizon,mixes,M_epsilon,final_tvd,residuals,warnings");
    EXPECT_NE(fit_summary(f).find("M_epsilon"), std::string::npos);
    std::ostringstream out;
    write_tvd_curve_csv(out, r);
    EXPECT_NE(out.str().find("# M_epsilon=3\nt,tvd\n1,0.5\n"), std::string::npos);
}

TEST(FitResult, UnknownKey) {
    FitResult f;
    f.set("a", 1);
    f.set("a", 2);
    EXPECT_EQ(f.values.size(), 1u);
    EXPECT_EQ(f.get("a"), 2.0);
    EXPECT_THROW(f.get("b"), std::out_of_range);
}

TEST(OneShot, ZeroAtStart) {
    const Graph g = build_hypercube(5);
    const auto h = one_shot_hitting(run_pure(WalkSpec::standard(g), 10), *g.target_vertex());
    EXPECT_EQ(h.per_step[0], 0.0);
    for (double p : h.per_step) {
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
    }
}

TEST(Concurrent, StartsAfterFirstStep) {
    const Graph g = build_hypercube(4);
    const auto h = concurrent_hitting(WalkSpec::standard(g), NoiseSpec::none(), 5, g.start_vertex());
    EXPECT_EQ(h.per_step[0], 0.0);
    EXPECT_TRUE(h.concurrent);
}

TEST(Concurrent, CumulativeMonotoneAndBounded) {
    const Graph g = build_hypercube(5);
    for (auto noise : {NoiseSpec::none(), NoiseSpec{NoiseModel::coin_dephase, 0.1, std::nullopt},
                       NoiseSpec{NoiseModel::full_dephase, 0.3, std::nullopt}}) {
        const auto h = concurrent_hitting(WalkSpec::standard(g), noise, 40, *g.target_vertex());
        for (std::size_t t = 1; t < h.cumulative.size(); ++t) {
            EXPECT_GE(h.cumulative[t], h.cumulative[t - 1]);
        }
        EXPECT_LE(h.cumulative.back(), 1.0 + 1e-12);
    }
}

TEST(Concurrent, FirstPeakBelowOneShot) {
    const Graph g = build_hypercube(6);
    const WalkSpec spec = WalkSpec::standard(g);
    const auto one = one_shot_hitting(run_pure(spec, 20), *g.target_vertex());
    const auto con = concurrent_hitting(spec, NoiseSpec::none(), 20, *g.target_vertex());
    const auto a = first_peak(one.per_step);
    const auto b = first_peak(con.per_step);
    ASSERT_TRUE(a && b);
    EXPECT_LT(b->height, a->height);
}

TEST(Concurrent, OrderIsConfigurable) {
    // Both orders scale entries by fixed masks, so they commute.
    const Graph g = build_hypercube(4);
    const WalkSpec spec = WalkSpec::standard(g);
    const NoiseSpec noise{NoiseModel::particle_dephase, 0.2, std::nullopt};
    const auto a = concurrent_hitting(spec, noise, 15, *g.target_vertex(), MonitorOrder::monitor_then_dephase);
    const auto b = concurrent_hitting(spec, noise, 15, *g.target_vertex(), MonitorOrder::dephase_then_monitor);
    for (std::size_t t = 0; t < a.per_step.size(); ++t) {
        EXPECT_NEAR(a.per_step[t], b.per_step[t], 1e-14);
    }
}

TEST(FirstPeak, SkipsSmallWiggles) {
    const std::vector<double> curve{0, 0.01, 0.005, 0.5, 0.2, 1.0, 0.1};
    const auto p = first_peak(curve);
    ASSERT_TRUE(p);
    EXPECT_EQ(p->step, 3u);
}

TEST(FirstPeak, IgnoresParityZeros) {
    const std::vector<double> curve{0, 0.1, 0, 0.3, 0, 0.6, 0, 0.2, 0};
    const auto p = first_peak(curve);
    ASSERT_TRUE(p);
    EXPECT_EQ(p->step, 5u);
}

TEST(FirstPeak, NoPeakInMonotoneCurve) {
    const std::vector<double> curve{0.1, 0.2, 0.3};
    EXPECT_FALSE(first_peak(curve));
}

TEST(FirstPeak, NineCube) {
    const Graph g = build_hypercube(9);
    const auto h = one_shot_hitting(run_pure(WalkSpec::standard(g), 24), *g.target_vertex());
    const auto p = first_peak(h.per_step);
    ASSERT_TRUE(p);
    EXPECT_NEAR(static_cast<double>(p->step), 9 * std::numbers::pi / 2, 1.5);
}

TEST(PeakDecay, RecoversExactExponential) {
    const std::vector<double> rates{0, 0.02, 0.05, 0.08, 0.11};
    std::vector<double> heights;
    for (double p : rates) {
        heights.push_back(0.9 * std::exp(-(9 + 1.3) * p));
    }
    const auto f = fit_peak_decay(rates, heights, 9);
    EXPECT_NEAR(f.rate, 10.3, 1e-10);
    EXPECT_NEAR(f.alpha, 1.3, 1e-10);
    EXPECT_NEAR(std::exp(f.log_intercept), 0.9, 1e-10);
    for (double r : f.residuals) {
        EXPECT_NEAR(r, 0.0, 1e-12);
    }
}

TEST(PeakDecay, NeedsThreePoints) {
    const std::vector<double> rates{0, 0.1};
    const std::vector<double> heights{1, 0.5};
    EXPECT_THROW(fit_peak_decay(rates, heights, 9), std::invalid_argument);
}

TEST(Classical, HypercubeHittingIsTiny) {
    const Graph g = build_hypercube(9);
    const auto c = classical_hitting(g, 30, *g.target_vertex());
    const auto q = one_shot_hitting(run_pure(WalkSpec::standard(g), 30), *g.target_vertex());
    double cmax = 0;
    for (double x : c.per_step) {
        cmax = std::max(cmax, x);
    }
    EXPECT_LT(cmax, 0.01 * first_peak(q.per_step)->height);
}

TEST(Classical, LineIsBinomial) {
    const auto s = classical_series(build_line(6), 6);
    const double expect[] = {1, 6, 15, 20, 15, 6, 1};
    for (int k = 0; k <= 6; ++k) {
        const std::size_t v = static_cast<std::size_t>(2 * k - 6 + 6);
        EXPECT_NEAR(s.steps.back().probs[v], expect[k] / 64.0, 1e-15);
    }
}

TEST(Glued, ExitCurveIsOneShotAtRightRoot) {
    const Graph g = build_glued_trees(3, 2);
    const WalkSpec spec = WalkSpec::standard(g);
    const auto h = exit_probability_glued(spec, NoiseSpec::none(), 20);
    const auto s = run_pure(spec, 20);
    for (std::size_t t = 0; t < h.per_step.size(); ++t) {
        EXPECT_EQ(h.per_step[t], s[t].probs[*g.target_vertex()]);
    }
    EXPECT_THROW(exit_probability_glued(WalkSpec::standard(build_cycle(5)), NoiseSpec::none(), 3),
                 std::invalid_argument);
}

}  // namespace
}  // namespace qwalk
