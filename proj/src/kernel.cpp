#include "bfkit/kernel.hpp"

#include "bfkit/detail/ring_filter.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bfkit {

namespace {

constexpr double kRingRadius[kMaxSupport] = {
    1.0, std::numbers::sqrt2, 2.0, 2.2360679774997896964, 2.0 * std::numbers::sqrt2};

// Ring ordering: axis neighbors, diagonals, axis at 2, knight moves,
// then the merged (2,2)/(3,0) ring.
const std::vector<Offset> kRingOffsets[kMaxSupport] = {
    {{1, 0}, {-1, 0}, {0, 1}, {0, -1}},
    {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}},
    {{2, 0}, {-2, 0}, {0, 2}, {0, -2}},
    {{2, 1}, {1, 2}, {-1, 2}, {-2, 1}, {-2, -1}, {-1, -2}, {1, -2}, {2, -1}},
    {{2, 2}, {-2, 2}, {-2, -2}, {2, -2}, {3, 0}, {0, 3}, {-3, 0}, {0, -3}},
};

std::string lower(std::string_view s) {
    std::string out(s);
    std::ranges::transform(out, out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

}  // namespace

WFamily WFamily::gaussian(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("Gaussian W requires sigma > 0");
    }
    return WFamily(Kind::Gaussian, sigma);
}

void KernelSpec::validate() const {
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("kernel scale t must be finite and >= 0");
    if (n < 1 || n > kMaxSupport) throw std::invalid_argument("support size n must be within 1..5");
}

std::size_t RingNeighborhood::pixel_count() const noexcept {
    std::size_t count = 0;
    for (const auto& ring : rings) count += ring.offsets.size();
    return count;
}

int RingNeighborhood::reach() const noexcept {
    int r = 0;
    for (const auto& ring : rings)
        for (const auto& o : ring.offsets) r = std::max({r, std::abs(o.dx), std::abs(o.dy)});
    return r;
}

double ring_radius(int ring_index) {
    if (ring_index < 1 || ring_index > kMaxSupport) throw std::invalid_argument("ring index must be within 1..5");
    return kRingRadius[ring_index - 1];
}

RingNeighborhood build_rings(int n, const WFamily& w) {
    if (n < 1 || n > kMaxSupport) throw std::invalid_argument("support size n must be within 1..5");
    RingNeighborhood hood;
    hood.rings.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        hood.rings.push_back(Ring{kRingRadius[i], kRingOffsets[i], eval_W(w, kRingRadius[i])});
    }
    return hood;
}

double eval_V(VFamily v, double t, double x) noexcept {
    const double s = t * x;
    switch (v) {
        case VFamily::Abs: return detail::v_weight<VFamily::Abs>(s);
        case VFamily::Frac: return detail::v_weight<VFamily::Frac>(s);
        case VFamily::Quad: return detail::v_weight<VFamily::Quad>(s);
        case VFamily::Exp: return detail::v_weight<VFamily::Exp>(s);
    }
    return 1.0;
}

double eval_W(const WFamily& w, double r) {
    if (!(r >= 0.0)) throw std::invalid_argument("distance r must be >= 0");
    if (w.kind() == WFamily::Kind::Power) return std::exp2(-r);
    const double u = r / w.sigma();
    return std::exp(-(u * u));
}

AxiomReport validate_kernel(VFamily v, double t, std::span<const double> probe, double vanishing_tolerance) {
    if (probe.empty()) throw std::invalid_argument("validate_kernel: empty probe grid");
    AxiomReport report;
    report.normalization = eval_V(v, t, 0.0) == 1.0;

    report.symmetry = std::ranges::all_of(probe, [&](double x) { return eval_V(v, t, x) == eval_V(v, t, -x); });

    std::vector<double> mags;
    mags.reserve(probe.size());
    for (double x : probe) mags.push_back(std::fabs(x));
    std::ranges::sort(mags);
    report.decay = true;
    for (std::size_t i = 1; i < mags.size(); ++i) {
        if (eval_V(v, t, mags[i]) > eval_V(v, t, mags[i - 1])) {
            report.decay = false;
            break;
        }
    }

    report.tail_value = eval_V(v, t, mags.back());
    report.vanishing = report.tail_value < vanishing_tolerance;
    return report;
}

std::string_view to_string(VFamily v) noexcept {
    switch (v) {
        case VFamily::Abs: return "abs";
        case VFamily::Frac: return "frac";
        case VFamily::Quad: return "quad";
        case VFamily::Exp: return "exp";
    }
    return "?";
}

VFamily parse_vfamily(std::string_view name) {
    const std::string s = lower(name);
    if (s == "abs") return VFamily::Abs;
    if (s == "frac") return VFamily::Frac;
    if (s == "quad") return VFamily::Quad;
    if (s == "exp") return VFamily::Exp;
    throw std::invalid_argument("unknown V family '" + std::string(name) + "' (expected abs|frac|quad|exp)");
}

WFamily parse_wfamily(std::string_view text) {
    const std::string s = lower(text);
    if (s == "power") return WFamily::power();
    constexpr std::string_view prefix = "gauss:";
    if (s.starts_with(prefix)) {
        const std::string_view num = std::string_view(s).substr(prefix.size());
        double sigma = 0.0;
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), sigma);
        if (ec != std::errc{} || ptr != num.data() + num.size()) {
            throw std::invalid_argument("bad Gaussian sigma in '" + std::string(text) + "'");
        }
        return WFamily::gaussian(sigma);
    }
    throw std::invalid_argument("unknown W family '" + std::string(text) + "' (expected power|gauss:<sigma>)");
}

std::string to_string(const WFamily& w) {
    if (w.kind() == WFamily::Kind::Power) return "power";
    std::ostringstream os;
    os << "gauss:" << w.sigma();
    return os.str();
}

}  // namespace bfkit
