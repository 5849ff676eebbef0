#include "bfkit/ctmodel.hpp"

#include "bfkit/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

namespace bfkit {
namespace {

TEST(NoiseModel, LiverProtocolValues) {
    const auto m = DoseNoiseModel::liver_protocol();
    EXPECT_NEAR(noise_sigma(m, 1.0), 63.83, 1e-10);
    EXPECT_NEAR(noise_sigma(m, 0.5), 165.5325, 1e-10);
    EXPECT_NEAR(noise_sigma(m, 0.25), 313.33 / 16 - 673.4 / 4 + 423.9, 1e-10);
    EXPECT_THROW(noise_sigma(m, 0.1), OutOfDomainError);
    EXPECT_THROW(noise_sigma(m, 1.01), OutOfDomainError);
}

TEST(NoiseModel, DecreasingOnDomain) {
    const auto m = DoseNoiseModel::liver_protocol();
    // vertex of the parabola lies past full dose
    EXPECT_GT(-m.b / (2.0 * m.a), m.x_hi);
    double prev = noise_sigma(m, m.x_lo);
    for (double x = 0.26; x <= 1.0; x += 0.01) {
        const double s = noise_sigma(m, x);
        EXPECT_LT(s, prev);
        EXPECT_GT(s, 0.0);
        prev = s;
    }
}

TEST(NoiseModel, Validation) {
    DoseNoiseModel m;
    m.x_lo = 1.0;
    m.x_hi = 0.5;
    EXPECT_THROW(m.validate(), std::invalid_argument);
    DoseNoiseModel neg;
    neg.c = -1000.0;
    EXPECT_THROW(neg.validate(), std::invalid_argument);
}

TEST(NoiseModel, ConfigRoundTrip) {
    DoseNoiseModel m{1.5, -2.0, 40.0, 0.1, 0.9};
    std::stringstream ss;
    write_model(m, ss);
    const auto back = read_model(ss);
    EXPECT_EQ(back.a, m.a);
    EXPECT_EQ(back.b, m.b);
    EXPECT_EQ(back.c, m.c);
    EXPECT_EQ(back.x_lo, m.x_lo);
    EXPECT_EQ(back.x_hi, m.x_hi);
}

TEST(NoiseModel, ConfigParsing) {
    std::istringstream ok("# liver\na = 313.33\nb=-673.4\n\nc=423.9 # intercept\nx_lo=0.25\nx_hi=1\n");
    const auto m = read_model(ok);
    EXPECT_NEAR(noise_sigma(m, 1.0), 63.83, 1e-10);

    std::istringstream missing("a=1\nb=2\n");
    EXPECT_THROW(read_model(missing), FormatError);
    std::istringstream unknown("a=1\nb=2\nc=3\nx_lo=0.1\nx_hi=1\nd=4\n");
    EXPECT_THROW(read_model(unknown), FormatError);
    std::istringstream garbage("a=one\n");
    EXPECT_THROW(read_model(garbage), FormatError);
    EXPECT_THROW(read_model(std::filesystem::path("/nonexistent/model.cfg")), FormatError);
}

TEST(Plan, ScaleIsThresholdOverSigma) {
    const auto m = DoseNoiseModel::liver_protocol();
    const auto full = plan_filter(1.0, m);
    EXPECT_EQ(full.t0, 1.40);
    EXPECT_NEAR(full.t, 1.40 / 63.83, 1e-12);
    EXPECT_NEAR(full.t, 0.0219332602, 1e-9);
    EXPECT_EQ(full.spec.v, VFamily::Frac);
    EXPECT_EQ(full.spec.n, 3);
    ASSERT_TRUE(full.gate);
    EXPECT_EQ(full.gate->lo, -100.0);
    EXPECT_EQ(full.gate->hi, 300.0);

    const auto half = plan_filter(0.5, m);
    EXPECT_NEAR(half.t, 1.40 / 165.5325, 1e-12);
    EXPECT_NEAR(half.t, 0.0084575537, 1e-9);

    PlanOptions exp_opts;
    exp_opts.v = VFamily::Exp;
    EXPECT_NEAR(plan_filter(1.0, m, exp_opts).t, 0.67 / 63.83, 1e-12);

    PlanOptions custom;
    custom.t0 = 2.0;
    custom.gate.reset();
    const auto p = plan_filter(0.5, m, custom);
    EXPECT_NEAR(p.t, 2.0 / 165.5325, 1e-12);
    EXPECT_FALSE(p.config().gate);
    EXPECT_EQ(p.config().spec.t, p.t);

    EXPECT_THROW(plan_filter(0.1, m), OutOfDomainError);
    PlanOptions bad;
    bad.t0 = -1.0;
    EXPECT_THROW(plan_filter(0.5, m, bad), std::invalid_argument);
}

TEST(Plan, PublishedThresholds) {
    EXPECT_EQ(published_threshold(VFamily::Abs), 15.05);
    EXPECT_EQ(published_threshold(VFamily::Frac), 1.40);
    EXPECT_EQ(published_threshold(VFamily::Quad), 0.77);
    EXPECT_EQ(published_threshold(VFamily::Exp), 0.67);
}

TEST(Plan, WritesKeyValueLines) {
    std::ostringstream os;
    write_plan(plan_filter(1.0, DoseNoiseModel::liver_protocol()), os);
    const std::string s = os.str();
    EXPECT_NE(s.find("sigma=63.83\n"), std::string::npos);
    EXPECT_NE(s.find("t0=1.4\n"), std::string::npos);
    EXPECT_NE(s.find("v=frac\n"), std::string::npos);
    EXPECT_NE(s.find("gate=-100:300\n"), std::string::npos);
}

TEST(Phantom, BandLayout) {
    const auto layout = band_layout(30, 10, 3);
    EXPECT_EQ(layout(0, 0), 0);
    EXPECT_EQ(layout(9, 9), 0);
    EXPECT_EQ(layout(10, 0), 1);
    EXPECT_EQ(layout(29, 5), 2);
    EXPECT_THROW(band_layout(30, 10, 0), std::invalid_argument);
}

TEST(Phantom, RegionStatistics) {
    const std::vector<double> dens = {2.24, -108.0, 334.0};
    const auto layout = band_layout(300, 300, 3);
    const Image img = synth_phantom(dens, layout, 60.0, 5);
    for (int r = 0; r < 3; ++r) {
        double s = 0.0, ss = 0.0;
        long n = 0;
        for (int y = 0; y < 300; ++y)
            for (int x = 0; x < 300; ++x)
                if (layout(x, y) == r) {
                    s += img(x, y);
                    ss += double(img(x, y)) * img(x, y);
                    ++n;
                }
        const double mean = s / n;
        EXPECT_NEAR(mean, dens[r], 1.0);
        EXPECT_NEAR(std::sqrt(ss / n - mean * mean), 60.0, 2.0);
    }
    EXPECT_EQ(img, synth_phantom(dens, layout, 60.0, 5));
    EXPECT_NE(img, synth_phantom(dens, layout, 60.0, 6));
    const std::vector<double> two = {1.0, 2.0};
    EXPECT_THROW(synth_phantom(two, layout, 60.0, 5), std::invalid_argument);
    EXPECT_THROW(synth_phantom(dens, layout, -1.0, 5), std::invalid_argument);
}

}  // namespace
}  // namespace bfkit
