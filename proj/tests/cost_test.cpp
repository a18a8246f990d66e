#include <gtest/gtest.h>

#include "powerprov/cost.hpp"
#include "powerprov/offline.hpp"
#include "support.hpp"

using namespace powerprov;

TEST(Integrate, Examples)
{
    EXPECT_DOUBLE_EQ(integrate(StepSchedule(5.0, 2, {})), 10.0);
    EXPECT_DOUBLE_EQ(integrate(StepSchedule(4.0, 0, {{1.0, 1}, {3.0, 0}})), 2.0);
    EXPECT_DOUBLE_EQ(integrate(StepSchedule(0.0, 3, {})), 0.0);
}

TEST(ToggleCosts, Examples)
{
    const CostModel m{1.0, 2.0, 1.0};
    EXPECT_EQ(toggle_costs(StepSchedule(4.0, 0, {{1.0, 1}, {3.0, 0}}), m), (std::pair{2.0, 1.0}));
    EXPECT_EQ(toggle_costs(StepSchedule(4.0, 2, {}), m), (std::pair{0.0, 0.0}));
    EXPECT_DOUBLE_EQ(toggle_costs(StepSchedule(4.0, 0, {{1.0, 3}}), m).first, 6.0);
}

TEST(ToggleCosts, InvariantUnderRefinement)
{
    const CostModel m{1.0, 2.0, 1.0};
    const StepSchedule coarse(6.0, 1, {{1.0, 3}, {4.0, 0}});
    const StepSchedule fine(6.0, 1, {{0.5, 1}, {1.0, 3}, {2.0, 3}, {4.0, 0}, {5.0, 0}});
    EXPECT_EQ(toggle_costs(coarse, m), toggle_costs(fine, m));
    EXPECT_DOUBLE_EQ(integrate(coarse), integrate(fine));
    EXPECT_EQ(coarse, fine);
}

TEST(StepSchedule, FromChangesNetsSimultaneousChanges)
{
    const auto x = StepSchedule::from_changes(5.0, 1, {{2.0, +1}, {2.0, -1}, {3.0, +2}, {4.0, -1}});
    ASSERT_EQ(x.breakpoints().size(), 2u);
    EXPECT_EQ(x.at(3.5), 3);
    EXPECT_EQ(x.final_value(), 2);
}

TEST(Evaluate, Examples)
{
    const CountFunction one(testkit::make_trace(1, {}, 3));
    EXPECT_DOUBLE_EQ(evaluate(StepSchedule(3.0, 1, {}), one, {1, 0, 0}).total, 3.0);

    const CountFunction dip(testkit::make_trace(1, {{1, -1}, {2, +1}}, 3));
    EXPECT_DOUBLE_EQ(evaluate(StepSchedule(3.0, 1, {}), dip, {1, 0.5, 0}).total, 3.0);
    EXPECT_DOUBLE_EQ(evaluate(StepSchedule(3.0, 1, {}), dip, {1, 0.5, 0}).total,
                     dp_oracle(dip, {1, 3, 3}).cost);

    EXPECT_THROW(evaluate(StepSchedule(3.0, 1, {{0.5, 0}, {2.0, 1}}), dip, {1, 0, 0}), Infeasible);
    EXPECT_THROW(evaluate(StepSchedule(3.0, 0, {{0.5, 1}}), dip, {1, 0, 0}), Infeasible);
    EXPECT_THROW(evaluate(StepSchedule(3.0, 1, {{2.5, 2}}), dip, {1, 0, 0}), Infeasible);
}

TEST(Evaluate, DropAtHorizonIsCharged)
{
    const CountFunction a(testkit::make_trace(0, {{1, +1}, {2, -1}}, 2));
    const auto b = evaluate(StepSchedule(2.0, 0, {{1.0, 1}, {2.0, 0}}), a, {1, 1, 2});
    EXPECT_DOUBLE_EQ(b.turn_off, 2.0);
    EXPECT_DOUBLE_EQ(b.total, 1.0 + 1.0 + 2.0);
}

TEST(Evaluate, AdditiveOverCuts)
{
    const CostModel m{2.0, 1.0, 0.5};
    const StepSchedule x(6.0, 1, {{1.0, 3}, {2.5, 2}, {4.0, 0}, {5.0, 1}});
    const CountFunction a(testkit::make_trace(1, {{1, +1}, {1.5, +1}, {2.5, -1}, {3.5, -1}, {3.75, -1}, {5, +1}}, 6));
    const double whole = evaluate(x, a, m).total;
    for (double cut : {0.75, 2.0, 3.0, 4.5}) {
        const double left = detail::segment_cost(x, 0.0, cut, m);
        const double right = detail::segment_cost(x, cut, 6.0, m);
        EXPECT_NEAR(left + right, whole, 1e-9) << cut;
    }
}

TEST(StaticBenchmark, Examples)
{
    EXPECT_DOUBLE_EQ(static_benchmark(FluidTrace{1.0, {2, 5, 3}}, {1, 0, 0}), 15.0);
    EXPECT_DOUBLE_EQ(static_benchmark(CountFunction(testkit::make_trace(4, {}, 10)), {2, 0, 0}), 80.0);
    EXPECT_DOUBLE_EQ(static_benchmark(CountFunction(testkit::make_trace(0, {}, 10)), {2, 0, 0}), 0.0);
}

TEST(Evaluate, NoFeasibleScheduleBeatsTheOptimum)
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto a = CountFunction(testkit::random_walk(seed));
        const CostModel m = testkit::cost_for(seed);
        const double best = construct_optimal(a, m).total;
        // Peak provisioning with forced boundary drops is always feasible.
        std::vector<std::pair<double, int>> changes;
        if (a.peak() > a.initial() && !a.epochs().empty())
            changes.emplace_back(a.epochs().front().time, a.peak() - a.initial());
        changes.emplace_back(a.horizon(), a.final_level() - a.peak());
        const auto x = StepSchedule::from_changes(a.horizon(), a.initial(), changes);
        EXPECT_GE(evaluate(x, a, m).total, best - 1e-9);
        EXPECT_GE(evaluate(StepSchedule::from_changes(a.horizon(), a.initial(), [&] {
                               std::vector<std::pair<double, int>> c;
                               for (const auto& e : a.epochs())
                                   c.emplace_back(e.time, e.after - e.before);
                               return c;
                           }()),
                           a, m)
                      .total,
                  best - 1e-9);
    }
}
