#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bfkit/image.hpp"
#include "bfkit/kernel.hpp"

namespace bfkit {

/// Zero-mean, unit-deviation noise model Q for local intensity fluctuations.
enum class NoiseDistribution { Normal, Uniform };

std::string_view to_string(NoiseDistribution d) noexcept;
NoiseDistribution parse_distribution(std::string_view name);

/// One Monte-Carlo estimate of the deviation reduction K(t, n).
struct KEstimate {
    double t = 0.0;
    int n = 0;
    double k_hat = 0.0;
    double std_err = 0.0;
    std::int64_t trials = 0;
};

/// Everything that determines a K curve besides the t grid.
struct CurveSetup {
    VFamily v = VFamily::Frac;
    WFamily w = WFamily::power();
    int n = 3;
    NoiseDistribution dist = NoiseDistribution::Normal;
    std::int64_t trials = 20000;
    std::uint64_t seed = 1;

    KernelSpec kernel(double t) const { return KernelSpec{v, t, w, n}; }
};

struct KCurve {
    CurveSetup setup;
    std::vector<KEstimate> points;  // strictly increasing t
};

struct CurveExtrema {
    double k_0 = 0.0;
    std::optional<std::size_t> min_index;
    double t_min = 0.0;
    double k_min = 0.0;
    std::optional<std::size_t> max_index;
    double t_max = 0.0;
    double k_max = 0.0;
    double plateau = 0.0;
    double plateau_err = 0.0;
};

inline constexpr std::int64_t kMinTrials = 100;
inline constexpr std::int64_t kTableTrials = 200000;
inline constexpr std::int64_t kExploratoryTrials = 20000;
/// Contiguous trial batches used for the standard error. Fixed so results do
/// not depend on the thread count.
inline constexpr int kBatches = 64;

/// SplitMix64 as a UniformRandomBitGenerator: cheap to seed per trial.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// i.i.d. samples of t*Q on a (2*half_width+1)^2 grid, deterministic in seed.
RealImage sample_patch(NoiseDistribution dist, double t, int half_width, std::uint64_t seed);

/// Patch half-width that lets every pixel of the n-ring support be filtered
/// from samples inside the patch.
int patch_half_width(int n);

/// Per-trial seed, derived from the run seed and the trial counter only.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) noexcept;

/// Monte-Carlo K(t, n): each trial draws a unit-deviation patch, filters every
/// pixel of N_n(p0) and p0 at scale t, and the ratio of pooled deviations of
/// filtered over original values across all trials is reported. `base.t` is
/// ignored. Throws std::invalid_argument for trials < 100 or t < 0.
KEstimate estimate_K(const KernelSpec& base, double t, NoiseDistribution dist, std::int64_t trials,
                     std::uint64_t seed);

/// One estimate per grid point, all sharing the same random patches.
KCurve compute_curve(const CurveSetup& setup, std::span<const double> t_grid);

struct ThresholdOptions {
    double target = 0.5;
    double t_lo = 0.1;
    double t_hi = 5.0;
    double tol = 0.01;
    int max_iterations = 200;
};

/// Bisection for K(t0) = target on the common-random-number estimate.
/// Throws BracketError when the estimated bracket does not straddle the
/// target and ConvergenceError when max_iterations is exhausted.
double solve_threshold(const CurveSetup& setup, const ThresholdOptions& opts);

inline constexpr int kDefaultSmoothingWindow = 5;

/// Extrema of a K curve after moving-average smoothing. Throws
/// std::invalid_argument for curves shorter than 5 points or an even window.
CurveExtrema find_extrema(const KCurve& curve, int window = kDefaultSmoothingWindow);

/// `t,k_hat,std_err,trials` with 9 significant digits.
void write_curve_csv(const KCurve& curve, std::ostream& os);

}  // namespace bfkit
