// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "smashlab/grid.hpp"

using namespace smashlab;

namespace {

GridSpec unit_square(double h)
{
    return GridSpec::covering(2, h, {0, 0, 0}, {1, 1, 0});
}

}  // namespace

TEST(GridSpec, CoveringSnapsOutward)
{
    auto g = GridSpec::covering(2, 0.25, {-0.1, 0, 0}, {0.6, 1, 0});
    EXPECT_EQ(g.box().lo[0], -1);
    EXPECT_EQ(g.box().hi[0], 3);
    EXPECT_EQ(g.extent(1), 4);
    EXPECT_EQ(g.size(), 16u);
    EXPECT_DOUBLE_EQ(g.lo()[0], -0.25);
    EXPECT_DOUBLE_EQ(g.hi()[0], 0.75);
}

TEST(GridSpec, IndexRoundTrip)
{
    GridSpec g(3, 0.5, {0, 0, 0}, IndexBox{{-2, 1, 0}, {3, 4, 2}});
    for (std::size_t i = 0; i < g.size(); ++i)
        EXPECT_EQ(g.linear(g.index(i)), i);
    Index k{1, 2, 1};
    EXPECT_EQ(g.cell_at_center(g.center(k)), k);
    EXPECT_THROW(g.cell_at_center({0.1, 0.2, 0.3}), ConfigError);
}

TEST(GridSpec, RejectsBadInput)
{
    EXPECT_THROW(GridSpec(4, 1.0, {}, {}), ConfigError);
    EXPECT_THROW(GridSpec(2, 0.0, {}, {}), ConfigError);
    EXPECT_THROW(GridSpec(2, 1.0, {}, IndexBox{{0, 0, 0}, {0, 3, 1}}), ConfigError);
}

TEST(Mask, FullSquareMeasureIsOne)
{
    Mask m(unit_square(1.0 / 64), true);
    EXPECT_EQ(m.count(), 4096u);
    EXPECT_DOUBLE_EQ(m.measure(), 1.0);
    EXPECT_DOUBLE_EQ(Mask(unit_square(1.0 / 64)).measure(), 0.0);
}

TEST(Mask, BooleanAlgebra)
{
    auto g = unit_square(0.25);
    Mask a(g), b(g);
    a.set(0, true);
    a.set(1, true);
    b.set(1, true);
    b.set(2, true);
    EXPECT_EQ((a | b).count(), 3u);
    EXPECT_EQ((a & b).count(), 1u);
    EXPECT_EQ((a - b).count(), 1u);
    EXPECT_TRUE((a & b).subset_of(a));
    EXPECT_FALSE(a.subset_of(b));
    EXPECT_EQ(symmetric_difference_count(a, b), 2u);
    EXPECT_EQ(difference_count(a, b), 1u);
}

TEST(Mask, RegridAndTight)
{
    auto g = unit_square(0.125);
    Mask m(g);
    m.set(g.linear({3, 4, 0}), true);
    m.set(g.linear({5, 4, 0}), true);
    auto t = m.tight();
    EXPECT_EQ(t.grid().extent(0), 3);
    EXPECT_EQ(t.grid().extent(1), 1);
    EXPECT_EQ(t.count(), 2u);
    EXPECT_EQ(t.regrid(g), m);
    EXPECT_THROW(m.regrid(g.window(IndexBox{{0, 0, 0}, {4, 8, 1}})), OutOfBounds);
    auto t1 = m.tight(2);
    EXPECT_EQ(t1.grid().extent(0), 7);
}

TEST(Mask, ShiftMovesCells)
{
    auto g = unit_square(0.125);
    Mask m(g);
    m.set(g.linear({1, 1, 0}), true);
    auto s = m.shifted({2, 3, 0});
    EXPECT_TRUE(s.at({3, 4, 0}));
    EXPECT_EQ(s.count(), 1u);
}

TEST(Mask, BoundaryCellCount)
{
    auto g = GridSpec(2, 1.0, {}, IndexBox{{0, 0, 0}, {5, 5, 1}});
    Mask m(g);
    m.set(g.linear({2, 2, 0}), true);
    // the cell itself and its four axis neighbours
    EXPECT_EQ(boundary_cell_count(m), 5u);
    Mask full(g, true);
    // outside counts as false: the 16 edge cells
    EXPECT_EQ(boundary_cell_count(full), 16u);
}

TEST(Mask, EssentialComparisons)
{
    auto g = unit_square(0.125);
    Mask a(g), b(g);
    EXPECT_TRUE(essentially_equal(a, b, 0));
    for (std::size_t i = 0; i < 5; ++i)
        b.set(i, true);
    EXPECT_FALSE(essentially_equal(a, b, 4));
    EXPECT_TRUE(essentially_equal(a, b, 5));
    EXPECT_TRUE(essentially_contained(a, b, 0));
    EXPECT_FALSE(essentially_contained(b, a, 4));
    EXPECT_THROW(essentially_equal(a, Mask(unit_square(0.25)), 0), ConfigError);
}

TEST(DensityField, MassAndThreshold)
{
    auto g = unit_square(0.5);
    Mask m(g, true);
    DensityField f(g);
    f.add(m, 2.0);
    EXPECT_DOUBLE_EQ(f.total_mass(), 2.0);
    f[0] = 0.5;
    EXPECT_DOUBLE_EQ(f.max(), 2.0);
    EXPECT_EQ(f.above(1.0).count(), 3u);
    EXPECT_EQ(f.support().count(), 4u);
    auto big = g.window(g.box().expanded(2, 2));
    auto r = f.regrid(big);
    EXPECT_DOUBLE_EQ(r.total_mass(), f.total_mass());
    EXPECT_THROW(r.regrid(g.window(IndexBox{{0, 0, 0}, {1, 1, 1}})), OutOfBounds);
}

TEST(DensityField, IndicatorSum)
{
    auto g = unit_square(0.5);
    std::vector<Mask> ms(2, Mask(g));
    ms[0].set(0, true);
    ms[1].set(0, true);
    ms[1].set(3, true);
    auto f = indicator_sum(ms);
    EXPECT_DOUBLE_EQ(f[0], 2.0);
    EXPECT_DOUBLE_EQ(f[3], 1.0);
    EXPECT_DOUBLE_EQ(f[1], 0.0);
}

TEST(PairwiseSum, MatchesExactOnIntegers)
{
    std::vector<double> v(1000);
    std::iota(v.begin(), v.end(), 1.0);
    EXPECT_DOUBLE_EQ(pairwise_sum(v), 500500.0);
    EXPECT_DOUBLE_EQ(pairwise_sum(std::span<double const>{}), 0.0);
}
