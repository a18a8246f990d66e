#include <gtest/gtest.h>

#include "powerprov/offline.hpp"
#include "powerprov/segments.hpp"
#include "support.hpp"

using namespace powerprov;

namespace {

// a(0) = 2, departures at 1 and 2, arrivals at 3 and 4, T = 5.
CountFunction four_event()
{
    return CountFunction(testkit::make_trace(2, {{1, -1}, {2, -1}, {3, +1}, {4, +1}}, 5));
}

CountFunction u_dip()
{
    return CountFunction(testkit::make_trace(1, {{1, -1}, {2, +1}}, 3));
}

std::vector<SegmentType> types(const CriticalDecomposition& d)
{
    std::vector<SegmentType> out;
    for (const auto& s : d.segments)
        out.push_back(s.type);
    return out;
}

} // namespace

TEST(Decompose, FourEventTrace)
{
    const auto d = decompose(four_event());
    EXPECT_EQ(d.critical_times, (std::vector<double>{0, 1, 4, 5}));
    EXPECT_EQ(types(d), (std::vector{SegmentType::I, SegmentType::IV, SegmentType::I}));
}

TEST(Decompose, UDip)
{
    const auto d = decompose(u_dip());
    EXPECT_EQ(d.critical_times, (std::vector<double>{0, 1, 2, 3}));
    EXPECT_EQ(types(d), (std::vector{SegmentType::I, SegmentType::III, SegmentType::I}));
}

TEST(Decompose, ConstantTraceIsOneSegment)
{
    const auto d = decompose(CountFunction(testkit::make_trace(3, {}, 7)));
    ASSERT_EQ(d.segments.size(), 1u);
    EXPECT_EQ(d.segments[0].type, SegmentType::I);
    EXPECT_DOUBLE_EQ(d.segments[0].end, 7.0);
}

TEST(Decompose, TrailingDescentIsStepDecreasing)
{
    const CountFunction a(testkit::make_trace(0, {{1, +1}, {2, +1}, {3, -1}, {4, -1}}, 6));
    const auto d = decompose(a);
    EXPECT_EQ(d.critical_times, (std::vector<double>{0, 3, 4, 6}));
    EXPECT_EQ(types(d), (std::vector{SegmentType::I, SegmentType::II, SegmentType::II}));
}

TEST(Classify, Predicates)
{
    const auto a = four_event();
    EXPECT_EQ(classify(a, 1, 4), SegmentType::IV);
    EXPECT_EQ(classify(u_dip(), 1, 2), SegmentType::III);
    const CountFunction rise(testkit::make_trace(0, {{1, +1}, {2, +1}}, 3));
    EXPECT_EQ(classify(rise, 0, 3), SegmentType::I);
    EXPECT_THROW(classify(a, 1, 3), NotACriticalSegment);
    EXPECT_THROW(classify(a, 2, 2), NotACriticalSegment);
}

TEST(PairEpochs, GreedyClosedComparison)
{
    const auto a = four_event();
    const Segment seg{1, 4, SegmentType::IV, 2};
    auto selected = [&](double delta) { return pair_epochs(a, seg, {1.0, delta / 2, delta / 2}); };

    const auto p05 = selected(0.5);
    ASSERT_EQ(p05.pairs.size(), 2u);
    EXPECT_DOUBLE_EQ(p05.pairs[0].departure, 1);
    EXPECT_DOUBLE_EQ(p05.pairs[0].arrival, 4);
    EXPECT_DOUBLE_EQ(p05.pairs[1].departure, 2);
    EXPECT_DOUBLE_EQ(p05.pairs[1].arrival, 3);
    EXPECT_TRUE(p05.selected.empty());

    const auto p1 = selected(1.0);
    ASSERT_EQ(p1.selected.size(), 1u);
    EXPECT_DOUBLE_EQ(p1.selected[0].departure, 2);

    const auto p3 = selected(3.0);
    ASSERT_EQ(p3.selected.size(), 1u);
    EXPECT_DOUBLE_EQ(p3.selected[0].departure, 1);
    EXPECT_DOUBLE_EQ(p3.selected[0].arrival, 4);
}

TEST(PairEpochs, OnlyForCanyons)
{
    EXPECT_THROW(pair_epochs(u_dip(), {1, 2, SegmentType::III, 1}, {}), NotACriticalSegment);
}

TEST(DecomposeProperty, TilesHorizonAndReclassifies)
{
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        testkit::WalkParams p;
        p.initial = static_cast<int>(seed % 4);
        const CountFunction a(testkit::random_walk(seed, p));
        const auto d = decompose(a);
        ASSERT_FALSE(d.segments.empty());
        EXPECT_DOUBLE_EQ(d.segments.front().start, 0.0);
        EXPECT_DOUBLE_EQ(d.segments.back().end, a.horizon());
        for (std::size_t i = 0; i < d.segments.size(); ++i) {
            const auto& s = d.segments[i];
            EXPECT_LT(s.start, s.end);
            if (i > 0) {
                EXPECT_EQ(s.start, d.segments[i - 1].end);
            }
            EXPECT_EQ(classify(a, s.start, s.end), s.type) << "seed " << seed;
        }
    }
}

TEST(DecomposeProperty, OptimumMeetsWorkloadAtCriticalTimes)
{
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        testkit::WalkParams p;
        p.initial = static_cast<int>(seed % 4);
        const CountFunction a(testkit::random_walk(seed, p));
        const auto opt = construct_optimal(a, testkit::cost_for(seed));
        for (double t : opt.decomposition.critical_times)
            EXPECT_EQ(opt.schedule.at(t), a.at(t)) << "seed " << seed << " t " << t;
    }
}

TEST(PairEpochsProperty, SelectedPairsDisjointAndShort)
{
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const CountFunction a(testkit::random_walk(seed));
        const CostModel m = testkit::cost_for(seed);
        for (const auto& s : decompose(a).segments) {
            if (s.type != SegmentType::IV)
                continue;
            const auto pr = pair_epochs(a, s, m);
            for (std::size_t k = 0; k < pr.selected.size(); ++k) {
                EXPECT_LE(m.power * pr.selected[k].gap(), m.beta() + 1e-9);
                EXPECT_GT(pr.selected[k].departure, s.start - 1e-12);
                EXPECT_LT(pr.selected[k].arrival, s.end + 1e-12);
                if (k > 0) {
                    EXPECT_GT(pr.selected[k].departure, pr.selected[k - 1].arrival);
                }
            }
        }
    }
}
