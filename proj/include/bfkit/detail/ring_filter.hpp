#pragma once

#include <cmath>
#include <limits>

#include "bfkit/kernel.hpp"

namespace bfkit::detail {

template <VFamily V>
inline double v_weight(double s) noexcept {
    if constexpr (V == VFamily::Abs) {
        return 1.0 / (1.0 + std::fabs(s));
    } else if constexpr (V == VFamily::Frac) {
        return 1.0 / (1.0 + s * s);
    } else if constexpr (V == VFamily::Quad) {
        const double s2 = s * s;
        return 1.0 / (1.0 + s2 * s2);
    } else {
        return std::exp(-(s * s));
    }
}

// Photometric weights below the smallest normal double count as underflowed.
// Survivors are scaled up so products with small spatial weights stay normal;
// the common factor cancels in num / den.
inline constexpr double kWeightScale = 0x1p600;

inline double scaled_photometric(double v) noexcept {
    return v < std::numeric_limits<double>::min() ? 0.0 : v * kWeightScale;
}

template <VFamily V, typename Sample>
double ring_filter_v(const RingNeighborhood& hood, double t, bool include_center, double center,
                     Sample& sample) {
    double num = include_center ? center * kWeightScale : 0.0;
    double den = include_center ? kWeightScale : 0.0;
    for (const Ring& ring : hood.rings) {
        double ring_num = 0.0;
        double ring_den = 0.0;
        for (const Offset& o : ring.offsets) {
            const double f = sample(o.dx, o.dy);
            const double s = scaled_photometric(v_weight<V>(t * (f - center)));
            ring_num += s * f;
            ring_den += s;
        }
        num += ring.weight * ring_num;
        den += ring.weight * ring_den;
    }
    if (den > 0.0) return num / den;

    // every photometric weight underflowed: linear W-average of the support
    double lin_num = include_center ? center : 0.0;
    double lin_den = include_center ? 1.0 : 0.0;
    for (const Ring& ring : hood.rings) {
        double ring_sum = 0.0;
        for (const Offset& o : ring.offsets) ring_sum += sample(o.dx, o.dy);
        lin_num += ring.weight * ring_sum;
        lin_den += ring.weight * static_cast<double>(ring.offsets.size());
    }
    return lin_num / lin_den;
}

/// Ring-separated bilateral sum around one pixel. `sample(dx, dy)` returns
/// the intensity at the offset.
template <typename Sample>
double ring_filter(const RingNeighborhood& hood, VFamily v, double t, bool include_center, double center,
                   Sample&& sample) {
    switch (v) {
        case VFamily::Abs: return ring_filter_v<VFamily::Abs>(hood, t, include_center, center, sample);
        case VFamily::Frac: return ring_filter_v<VFamily::Frac>(hood, t, include_center, center, sample);
        case VFamily::Quad: return ring_filter_v<VFamily::Quad>(hood, t, include_center, center, sample);
        case VFamily::Exp: return ring_filter_v<VFamily::Exp>(hood, t, include_center, center, sample);
    }
    return center;
}

}  // namespace bfkit::detail
