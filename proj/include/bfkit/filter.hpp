#pragma once

#include <optional>

#include "bfkit/image.hpp"
#include "bfkit/kernel.hpp"

namespace bfkit {

enum class BorderPolicy {
    Clamp,  // replicate edge pixels
    Skip,   // pixels whose support leaves the image are copied unfiltered
};

/// What the intensity gate is tested against.
enum class GateMode {
    LocalMean,  // mean of the original values over the support and center
    Center,     // the center pixel's original value
};

struct GateRange {
    double lo = -100.0;
    double hi = 300.0;

    bool contains(double v) const noexcept { return v >= lo && v <= hi; }
};

struct FilterConfig {
    KernelSpec spec;
    std::optional<GateRange> gate;
    BorderPolicy border = BorderPolicy::Clamp;
    GateMode gate_mode = GateMode::LocalMean;
    /// The ring support excludes p0; set to add the center with weight
    /// W(0)V(0) = 1.
    bool include_center = false;

    /// Throws std::invalid_argument on a bad kernel or an inverted gate.
    void validate() const;
};

struct LocalStats {
    double mean = 0.0;
    double deviation = 0.0;  // population standard deviation
};

/// Reference bilateral filter: direct sum over the square window around p0
/// with W evaluated per pixel distance. Used as the oracle for the ring form.
/// Throws std::invalid_argument when p0 is out of bounds, or when the
/// support leaves the image under BorderPolicy::Skip.
double filter_pixel_dense(const RealImage& img, PixelCoord p0, const FilterConfig& cfg);

/// Production form: per-ring photometric sums combined with the precomputed
/// radial weights of `rings`. Same error rules as filter_pixel_dense.
double filter_pixel_ringed(const RealImage& img, PixelCoord p0, const RingNeighborhood& rings,
                           const FilterConfig& cfg);

/// Filters every pixel, keeping real values (no rounding).
RealImage filter_image(const RealImage& img, const FilterConfig& cfg);

/// Filters every pixel and rounds half away from zero to 16-bit samples.
Image filter_image(const Image& img, const FilterConfig& cfg);

/// Applies filter_image k times; intermediate passes stay real-valued.
RealImage filter_iterate(const RealImage& img, const FilterConfig& cfg, int k);
Image filter_iterate(const Image& img, const FilterConfig& cfg, int k);

/// Mean and deviation over the ring support plus the center pixel.
LocalStats local_stats(const RealImage& img, PixelCoord p0, const RingNeighborhood& rings,
                       BorderPolicy border = BorderPolicy::Clamp);
LocalStats local_stats(const Image& img, PixelCoord p0, const RingNeighborhood& rings,
                       BorderPolicy border = BorderPolicy::Clamp);

}  // namespace bfkit
