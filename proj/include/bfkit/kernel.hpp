#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bfkit {

/// Photometric similarity families V(x), all scaled by t:
///   Abs  1/(1+|tx|)     Frac 1/(1+(tx)^2)
///   Quad 1/(1+(tx)^4)   Exp  exp(-(tx)^2)
enum class VFamily { Abs, Frac, Quad, Exp };

/// Spatial closeness W(r): Power is 2^-r, Gaussian is exp(-(r/sigma)^2).
class WFamily {
public:
    enum class Kind { Power, Gaussian };

    static WFamily power() noexcept { return WFamily(Kind::Power, 0.0); }
    /// Throws std::invalid_argument unless sigma > 0.
    static WFamily gaussian(double sigma);

    Kind kind() const noexcept { return kind_; }
    double sigma() const noexcept { return sigma_; }

    friend bool operator==(const WFamily&, const WFamily&) = default;

private:
    WFamily(Kind kind, double sigma) noexcept : kind_(kind), sigma_(sigma) {}

    Kind kind_;
    double sigma_;
};

inline constexpr int kMaxSupport = 5;

/// Full description of a bilateral filter: V family at scale t, W family,
/// and support size n (number of rings, 1..5).
struct KernelSpec {
    VFamily v = VFamily::Frac;
    double t = 0.0;
    WFamily w = WFamily::power();
    int n = 3;

    /// Throws std::invalid_argument when t < 0 or n is outside 1..5.
    void validate() const;

    KernelSpec with_scale(double scale) const {
        KernelSpec copy = *this;
        copy.t = scale;
        return copy;
    }

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

struct Offset {
    int dx = 0;
    int dy = 0;
    friend bool operator==(const Offset&, const Offset&) = default;
};

struct Ring {
    double radius = 0.0;
    std::vector<Offset> offsets;
    double weight = 0.0;  // W(radius)
};

/// Rings R_1..R_n of integer offsets sharing one radial weight each.
/// Ring 5 merges the sub-rings at radius 2*sqrt(2) and 3 and uses
/// 2*sqrt(2) as its representative radius.
struct RingNeighborhood {
    std::vector<Ring> rings;

    int support_size() const noexcept { return static_cast<int>(rings.size()); }
    /// Number of offsets over all rings (center excluded).
    std::size_t pixel_count() const noexcept;
    /// Largest |dx| or |dy| over all offsets.
    int reach() const noexcept;
};

/// Representative radius of ring i (1-based). Throws for i outside 1..5.
double ring_radius(int ring_index);

/// Throws std::invalid_argument for n outside 1..5.
RingNeighborhood build_rings(int n, const WFamily& w);

double eval_V(VFamily v, double t, double x) noexcept;

/// Throws std::invalid_argument for r < 0.
double eval_W(const WFamily& w, double r);

struct AxiomReport {
    bool normalization = false;  // V(0) == 1
    bool symmetry = false;       // V(x) == V(-x) bit-exactly
    bool decay = false;          // non-increasing in |x|
    bool vanishing = false;      // V(max |x|) < tolerance
    double tail_value = 0.0;     // V at the largest probed |x|

    bool all() const noexcept { return normalization && symmetry && decay && vanishing; }
};

inline constexpr double kDefaultVanishingTolerance = 0.05;

/// Numerically checks the four kernel axioms on a probe grid. Failures are
/// reported, never thrown; only an empty grid is rejected.
AxiomReport validate_kernel(VFamily v, double t, std::span<const double> probe,
                            double vanishing_tolerance = kDefaultVanishingTolerance);

std::string_view to_string(VFamily v) noexcept;
/// Accepts abs, frac, quad, exp (case-insensitive).
VFamily parse_vfamily(std::string_view name);
/// Accepts `power` or `gauss:<sigma>`.
WFamily parse_wfamily(std::string_view text);
std::string to_string(const WFamily& w);

}  // namespace bfkit
