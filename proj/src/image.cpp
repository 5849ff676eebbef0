#include "bfkit/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bfkit {

RealImage to_real(const Image& img) {
    std::vector<double> px(img.pixels().begin(), img.pixels().end());
    return RealImage(img.width(), img.height(), std::move(px));
}

std::int16_t round_to_sample(double value) noexcept {
    constexpr double lo = std::numeric_limits<std::int16_t>::min();
    constexpr double hi = std::numeric_limits<std::int16_t>::max();
    if (std::isnan(value)) return 0;
    const double r = std::round(value);  // half away from zero
    return static_cast<std::int16_t>(std::clamp(r, lo, hi));
}

Image to_image(const RealImage& img) {
    std::vector<std::int16_t> px(img.size());
    std::ranges::transform(img.pixels(), px.begin(), round_to_sample);
    return Image(img.width(), img.height(), std::move(px));
}

}  // namespace bfkit
