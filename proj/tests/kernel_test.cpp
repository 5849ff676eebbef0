#include "bfkit/kernel.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace bfkit {
namespace {

constexpr VFamily kAllV[] = {VFamily::Abs, VFamily::Frac, VFamily::Quad, VFamily::Exp};

TEST(BuildRings, FirstRingIsAxisNeighbors) {
    const auto hood = build_rings(1, WFamily::power());
    ASSERT_EQ(hood.rings.size(), 1u);
    const std::vector<Offset> expected{{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    EXPECT_EQ(hood.rings[0].offsets, expected);
    EXPECT_DOUBLE_EQ(hood.rings[0].radius, 1.0);
    EXPECT_DOUBLE_EQ(hood.rings[0].weight, 0.5);
}

TEST(BuildRings, CumulativeCountsAndMergedFifthRing) {
    const std::size_t cumulative[] = {4, 8, 12, 20, 28};
    for (int n = 1; n <= 5; ++n) EXPECT_EQ(build_rings(n, WFamily::power()).pixel_count(), cumulative[n - 1]);

    const auto hood = build_rings(5, WFamily::gaussian(2.0));
    const auto& ring5 = hood.rings[4].offsets;
    EXPECT_EQ(ring5.size(), 8u);
    EXPECT_NE(std::find(ring5.begin(), ring5.end(), Offset{3, 0}), ring5.end());
    EXPECT_NE(std::find(ring5.begin(), ring5.end(), Offset{2, 2}), ring5.end());
    EXPECT_DOUBLE_EQ(hood.rings[4].radius, 2.0 * std::sqrt(2.0));
}

TEST(BuildRings, PowerWeightsForThreeRings) {
    const auto hood = build_rings(3, WFamily::power());
    EXPECT_DOUBLE_EQ(hood.rings[0].weight, 0.5);
    EXPECT_NEAR(hood.rings[1].weight, 0.37521, 5e-6);
    EXPECT_DOUBLE_EQ(hood.rings[1].weight, std::pow(2.0, -std::sqrt(2.0)));
    EXPECT_DOUBLE_EQ(hood.rings[2].weight, 0.25);
}

TEST(BuildRings, RejectsSupportOutsideOneToFive) {
    EXPECT_THROW(build_rings(0, WFamily::power()), std::invalid_argument);
    EXPECT_THROW(build_rings(6, WFamily::power()), std::invalid_argument);
}

// Brute-force lattice enumeration: every point with d^2 <= 9 except the
// center and the non-representable 6, 7 must sit in exactly one ring, keyed
// by its squared radius.
TEST(BuildRings, MatchesLatticeEnumeration) {
    const std::map<int, int> ring_of_d2{{1, 0}, {2, 1}, {4, 2}, {5, 3}, {8, 4}, {9, 4}};
    std::map<int, std::set<std::pair<int, int>>> expected;
    for (int dy = -3; dy <= 3; ++dy)
        for (int dx = -3; dx <= 3; ++dx) {
            const int d2 = dx * dx + dy * dy;
            if (d2 == 0 || d2 > 9 || d2 == 6 || d2 == 7) continue;
            expected[ring_of_d2.at(d2)].insert({dx, dy});
        }

    const auto hood = build_rings(5, WFamily::power());
    std::set<std::pair<int, int>> seen;
    const std::size_t sizes[] = {4, 4, 4, 8, 8};
    for (int i = 0; i < 5; ++i) {
        std::set<std::pair<int, int>> got;
        for (const auto& o : hood.rings[i].offsets) {
            got.insert({o.dx, o.dy});
            EXPECT_TRUE(seen.insert({o.dx, o.dy}).second) << "offset in two rings";
        }
        EXPECT_EQ(got, expected[i]) << "ring " << i + 1;
        EXPECT_EQ(hood.rings[i].offsets.size(), sizes[i]);
    }
    EXPECT_FALSE(seen.contains({0, 0}));
}

TEST(EvalV, ClosedFormValues) {
    EXPECT_DOUBLE_EQ(eval_V(VFamily::Frac, 1.0, 1.0), 0.5);
    EXPECT_NEAR(eval_V(VFamily::Frac, 1.40, 1.0), 1.0 / 2.96, 1e-15);
    EXPECT_NEAR(eval_V(VFamily::Frac, 1.40, 1.0), 0.337838, 1e-6);
    EXPECT_NEAR(eval_V(VFamily::Exp, 1.0, 1.0), 0.367879, 1e-6);
    EXPECT_DOUBLE_EQ(eval_V(VFamily::Abs, 2.0, -1.5), 0.25);
    EXPECT_DOUBLE_EQ(eval_V(VFamily::Quad, 1.0, 2.0), 1.0 / 17.0);
}

TEST(EvalV, ZeroScaleOrZeroDifferenceIsOne) {
    for (VFamily v : kAllV) {
        EXPECT_EQ(eval_V(v, 0.0, 1e6), 1.0) << to_string(v);
        EXPECT_EQ(eval_V(v, 3.7, 0.0), 1.0) << to_string(v);
    }
}

// |t x| stays below 20 so exp(-(tx)^2) is still a positive double.
TEST(EvalV, RandomizedAxiomProperties) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> xs(-5.0, 5.0);
    std::uniform_real_distribution<double> ts(0.01, 4.0);
    for (int i = 0; i < 5000; ++i) {
        const double x = xs(gen);
        const double t = ts(gen);
        const double x2 = x * (1.0 + std::fabs(xs(gen)) / 5.0);  // |x2| >= |x|
        const double t2 = t * 1.5;
        for (VFamily v : kAllV) {
            const double val = eval_V(v, t, x);
            if (std::fabs(t * x) > 1e-3) {
                EXPECT_GT(val, 0.0);
                EXPECT_LT(val, 1.0);
            }
            EXPECT_EQ(val, eval_V(v, t, -x));
            EXPECT_LE(eval_V(v, t, x2), val);
            EXPECT_LE(eval_V(v, t2, x), val);
        }
    }
}

TEST(EvalW, PowerAndGaussian) {
    EXPECT_EQ(eval_W(WFamily::power(), 0.0), 1.0);
    EXPECT_DOUBLE_EQ(eval_W(WFamily::power(), 2.0), 0.25);
    EXPECT_NEAR(eval_W(WFamily::gaussian(1.0), 1.0), 0.367879, 1e-6);
    EXPECT_EQ(eval_W(WFamily::gaussian(0.7), 0.0), 1.0);
    EXPECT_THROW(WFamily::gaussian(0.0), std::invalid_argument);
    EXPECT_THROW(WFamily::gaussian(-1.0), std::invalid_argument);
    EXPECT_THROW(eval_W(WFamily::power(), -0.5), std::invalid_argument);
}

std::vector<double> symmetric_grid(int max, double step = 1.0) {
    std::vector<double> g;
    for (int i = -max; i <= max; ++i) g.push_back(i * step);
    return g;
}

TEST(ValidateKernel, FracPassesAllAxioms) {
    const auto grid = symmetric_grid(100);
    const auto report = validate_kernel(VFamily::Frac, 1.0, grid);
    EXPECT_TRUE(report.all());
}

TEST(ValidateKernel, SlowExpFailsVanishingOnly) {
    const auto grid = symmetric_grid(100);
    const auto report = validate_kernel(VFamily::Exp, 0.01, grid);
    EXPECT_TRUE(report.normalization);
    EXPECT_TRUE(report.symmetry);
    EXPECT_TRUE(report.decay);
    EXPECT_FALSE(report.vanishing);
    EXPECT_NEAR(report.tail_value, std::exp(-1.0), 1e-12);
}

TEST(ValidateKernel, AbsIsExactlySymmetric) {
    const auto grid = symmetric_grid(10);
    EXPECT_TRUE(validate_kernel(VFamily::Abs, 1.0, grid).symmetry);
}

TEST(ValidateKernel, ToleranceIsConfigurable) {
    const auto grid = symmetric_grid(100);
    EXPECT_TRUE(validate_kernel(VFamily::Exp, 0.01, grid, 0.5).vanishing);
    EXPECT_THROW(validate_kernel(VFamily::Exp, 1.0, std::vector<double>{}), std::invalid_argument);
}

TEST(KernelSpec, Validation) {
    EXPECT_NO_THROW((KernelSpec{VFamily::Frac, 0.0, WFamily::power(), 1}.validate()));
    EXPECT_THROW((KernelSpec{VFamily::Frac, -0.1, WFamily::power(), 3}.validate()), std::invalid_argument);
    EXPECT_THROW((KernelSpec{VFamily::Frac, 1.0, WFamily::power(), 6}.validate()), std::invalid_argument);
}

TEST(Parsing, FamiliesRoundTrip) {
    for (VFamily v : kAllV) EXPECT_EQ(parse_vfamily(to_string(v)), v);
    EXPECT_EQ(parse_vfamily("FRAC"), VFamily::Frac);
    EXPECT_EQ(parse_wfamily("power"), WFamily::power());
    EXPECT_EQ(parse_wfamily("gauss:1.5"), WFamily::gaussian(1.5));
    EXPECT_THROW(parse_vfamily("gauss"), std::invalid_argument);
    EXPECT_THROW(parse_wfamily("gauss:"), std::invalid_argument);
    EXPECT_THROW(parse_wfamily("gauss:-2"), std::invalid_argument);
}

}  // namespace
}  // namespace bfkit
