#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>

#include "bfkit/filter.hpp"
#include "bfkit/image.hpp"
#include "bfkit/kernel.hpp"

namespace bfkit {

/// Local noise deviation s(x) = a*x^2 + b*x + c as a function of the dose
/// fraction x, valid on [x_lo, x_hi] only.
struct DoseNoiseModel {
    double a = 313.33;
    double b = -673.4;
    double c = 423.9;
    double x_lo = 0.25;
    double x_hi = 1.0;

    /// Liver-protocol phantom calibration (120 kV, 200 mA, 500 ms).
    static DoseNoiseModel liver_protocol() noexcept { return {}; }

    /// Throws std::invalid_argument unless x_lo < x_hi and s(x) > 0 on the
    /// whole interval.
    void validate() const;
};

/// Throws OutOfDomainError outside the model interval (no extrapolation).
double noise_sigma(const DoseNoiseModel& model, double x);

/// Reads `key=value` lines for a, b, c, x_lo, x_hi; `#` starts a comment.
/// Throws FormatError on unknown keys, bad numbers, or missing keys.
DoseNoiseModel read_model(std::istream& in);
DoseNoiseModel read_model(const std::filesystem::path& path);
void write_model(const DoseNoiseModel& model, std::ostream& out);

/// 50% deviation-reduction thresholds t0 for n=3, W(r)=2^-r and normal
/// noise: Abs 15.05, Frac 1.40, Quad 0.77, Exp 0.67.
double published_threshold(VFamily v) noexcept;

struct PlanOptions {
    VFamily v = VFamily::Frac;
    int n = 3;
    WFamily w = WFamily::power();
    /// Defaults to published_threshold(v).
    std::optional<double> t0;
    std::optional<GateRange> gate = GateRange{-100.0, 300.0};
};

struct FilterPlan {
    double dose_fraction = 0.0;
    double sigma = 0.0;
    double t0 = 0.0;
    double t = 0.0;  // t0 / sigma
    KernelSpec spec;
    std::optional<GateRange> gate;

    FilterConfig config() const;
};

/// Dose fraction -> noise deviation -> kernel scale t = t0 / s.
FilterPlan plan_filter(double x, const DoseNoiseModel& model, const PlanOptions& opts = {});

void write_plan(const FilterPlan& plan, std::ostream& out);

/// Region index per pixel for synthetic phantoms.
using RegionLayout = Grid<std::uint8_t>;

/// `regions` equal-width vertical bands.
RegionLayout band_layout(int width, int height, int regions);

/// Piecewise-constant densities plus i.i.d. normal noise of deviation sigma,
/// rounded to 16-bit samples. Throws std::invalid_argument for sigma < 0 or a
/// layout index with no density.
Image synth_phantom(std::span<const double> densities, const RegionLayout& layout, double sigma,
                    std::uint64_t seed);

}  // namespace bfkit
