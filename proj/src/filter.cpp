#include "bfkit/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bfkit/detail/ring_filter.hpp"

namespace bfkit {

namespace {

// Largest |dx|, |dy| any support reaches (ring 5 contains (3,0)).
constexpr int kMaxReach = 3;

int support_reach(int n) { return n >= 5 ? 3 : (n >= 3 ? 2 : 1); }

void require_in_bounds(const RealImage& img, PixelCoord p0) {
    if (!img.contains(p0)) throw std::invalid_argument("pixel coordinate out of bounds");
}

bool support_inside(const RealImage& img, PixelCoord p0, int reach) {
    return p0.x - reach >= 0 && p0.y - reach >= 0 && p0.x + reach < img.width() && p0.y + reach < img.height();
}

// Ring index (1-based) of an integer offset by squared radius; 0 when the
// offset is the center or lies on no ring.
int ring_of(int dx, int dy) {
    switch (dx * dx + dy * dy) {
        case 1: return 1;
        case 2: return 2;
        case 4: return 3;
        case 5: return 4;
        case 8:
        case 9: return 5;
        default: return 0;
    }
}

template <typename Fn>
double sample_with_border(const RealImage& img, PixelCoord p0, int reach, BorderPolicy border, Fn&& body) {
    if (border == BorderPolicy::Clamp || support_inside(img, p0, reach)) {
        if (support_inside(img, p0, reach)) {
            const double* c = img.row(p0.y) + p0.x;
            const std::ptrdiff_t stride = img.width();
            return body([c, stride](int dx, int dy) { return c[dy * stride + dx]; });
        }
        const int wmax = img.width() - 1;
        const int hmax = img.height() - 1;
        return body([&img, p0, wmax, hmax](int dx, int dy) {
            return img(std::clamp(p0.x + dx, 0, wmax), std::clamp(p0.y + dy, 0, hmax));
        });
    }
    throw std::invalid_argument("filter support leaves the image under the skip border policy");
}

LocalStats stats_with(const RingNeighborhood& hood, double center, auto&& sample) {
    double sum = center;
    std::size_t count = 1;
    for (const Ring& ring : hood.rings)
        for (const Offset& o : ring.offsets) {
            sum += sample(o.dx, o.dy);
            ++count;
        }
    const double mean = sum / static_cast<double>(count);
    double ss = (center - mean) * (center - mean);
    for (const Ring& ring : hood.rings)
        for (const Offset& o : ring.offsets) {
            const double d = sample(o.dx, o.dy) - mean;
            ss += d * d;
        }
    return {mean, std::sqrt(ss / static_cast<double>(count))};
}

double filter_one(const RealImage& img, PixelCoord p0, const RingNeighborhood& hood, const FilterConfig& cfg) {
    const double center = img(p0.x, p0.y);
    return sample_with_border(img, p0, hood.reach(), cfg.border, [&](auto&& sample) {
        return detail::ring_filter(hood, cfg.spec.v, cfg.spec.t, cfg.include_center, center, sample);
    });
}

}  // namespace

void FilterConfig::validate() const {
    spec.validate();
    if (gate && !(gate->lo <= gate->hi)) throw std::invalid_argument("gate requires lo <= hi");
}

double filter_pixel_dense(const RealImage& img, PixelCoord p0, const FilterConfig& cfg) {
    cfg.validate();
    require_in_bounds(img, p0);
    const double center = img(p0.x, p0.y);
    const KernelSpec& k = cfg.spec;
    return sample_with_border(img, p0, support_reach(k.n), cfg.border, [&](auto&& sample) {
        double num = cfg.include_center ? center * detail::kWeightScale : 0.0;
        double den = cfg.include_center ? detail::kWeightScale : 0.0;
        double lin_num = cfg.include_center ? center : 0.0;
        double lin_den = cfg.include_center ? 1.0 : 0.0;
        for (int dy = -kMaxReach; dy <= kMaxReach; ++dy) {
            for (int dx = -kMaxReach; dx <= kMaxReach; ++dx) {
                const int ring = ring_of(dx, dy);
                if (ring == 0 || ring > k.n) continue;
                const int d2 = dx * dx + dy * dy;
                // radius 3 shares the merged ring's 2*sqrt(2) weight
                const double dist = d2 == 9 ? 2.0 * std::numbers::sqrt2 : std::sqrt(static_cast<double>(d2));
                const double w = eval_W(k.w, dist);
                const double f = sample(dx, dy);
                const double weight = w * detail::scaled_photometric(eval_V(k.v, k.t, f - center));
                num += weight * f;
                den += weight;
                lin_num += w * f;
                lin_den += w;
            }
        }
        return den > 0.0 ? num / den : lin_num / lin_den;
    });
}

double filter_pixel_ringed(const RealImage& img, PixelCoord p0, const RingNeighborhood& rings,
                           const FilterConfig& cfg) {
    cfg.validate();
    require_in_bounds(img, p0);
    return filter_one(img, p0, rings, cfg);
}

RealImage filter_image(const RealImage& img, const FilterConfig& cfg) {
    cfg.validate();
    if (img.empty()) throw std::invalid_argument("filter_image: empty image");
    const RingNeighborhood hood = build_rings(cfg.spec.n, cfg.spec.w);
    const int reach = hood.reach();
    RealImage out(img.width(), img.height());
    const int height = img.height();
    const int width = img.width();

#pragma omp parallel for schedule(static)
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const PixelCoord p{x, y};
            const double original = img(x, y);
            double value = original;
            const bool inside = support_inside(img, p, reach);
            if (cfg.border == BorderPolicy::Clamp || inside) {
                bool in_gate = true;
                if (cfg.gate) {
                    const double probe = cfg.gate_mode == GateMode::Center
                                             ? original
                                             : sample_with_border(img, p, reach, BorderPolicy::Clamp, [&](auto&& s) {
                                                   return stats_with(hood, original, s).mean;
                                               });
                    in_gate = cfg.gate->contains(probe);
                }
                if (in_gate) value = filter_one(img, p, hood, cfg);
            }
            out(x, y) = value;
        }
    }
    return out;
}

Image filter_image(const Image& img, const FilterConfig& cfg) {
    return to_image(filter_image(to_real(img), cfg));
}

RealImage filter_iterate(const RealImage& img, const FilterConfig& cfg, int k) {
    if (k < 0) throw std::invalid_argument("iteration count must be >= 0");
    RealImage current = img;
    for (int i = 0; i < k; ++i) current = filter_image(current, cfg);
    return current;
}

Image filter_iterate(const Image& img, const FilterConfig& cfg, int k) {
    if (k < 0) throw std::invalid_argument("iteration count must be >= 0");
    if (k == 0) return img;
    return to_image(filter_iterate(to_real(img), cfg, k));
}

LocalStats local_stats(const RealImage& img, PixelCoord p0, const RingNeighborhood& rings, BorderPolicy border) {
    require_in_bounds(img, p0);
    const double center = img(p0.x, p0.y);
    const int reach = rings.reach();
    if (border == BorderPolicy::Skip && !support_inside(img, p0, reach)) {
        throw std::invalid_argument("local_stats: support leaves the image under the skip border policy");
    }
    if (support_inside(img, p0, reach)) {
        const double* c = img.row(p0.y) + p0.x;
        const std::ptrdiff_t stride = img.width();
        return stats_with(rings, center, [c, stride](int dx, int dy) { return c[dy * stride + dx]; });
    }
    const int wmax = img.width() - 1;
    const int hmax = img.height() - 1;
    return stats_with(rings, center, [&](int dx, int dy) {
        return img(std::clamp(p0.x + dx, 0, wmax), std::clamp(p0.y + dy, 0, hmax));
    });
}

LocalStats local_stats(const Image& img, PixelCoord p0, const RingNeighborhood& rings, BorderPolicy border) {
    return local_stats(to_real(img), p0, rings, border);
}

}  // namespace bfkit
