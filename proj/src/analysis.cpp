#include "bfkit/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <locale>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "bfkit/detail/ring_filter.hpp"
#include "bfkit/errors.hpp"

namespace bfkit {

namespace {

std::uint64_t splitmix64(std::uint64_t z) noexcept { return SplitMix64(z)(); }

struct Moments {
    double n = 0.0;
    double sum_f = 0.0;
    double sum_ff = 0.0;
    double sum_h = 0.0;
    double sum_hh = 0.0;

    void add(const Moments& o) noexcept {
        n += o.n;
        sum_f += o.sum_f;
        sum_ff += o.sum_ff;
        sum_h += o.sum_h;
        sum_hh += o.sum_hh;
    }

    // Ratio of pooled deviations, filtered over original.
    double ratio() const noexcept {
        const double var_f = sum_ff / n - (sum_f / n) * (sum_f / n);
        const double var_h = sum_hh / n - (sum_h / n) * (sum_h / n);
        return std::sqrt(std::max(var_h, 0.0) / var_f);
    }
};

struct SupportPoint {
    int dx;
    int dy;
};

std::vector<SupportPoint> support_points(const RingNeighborhood& hood) {
    std::vector<SupportPoint> pts{{0, 0}};
    for (const Ring& ring : hood.rings)
        for (const Offset& o : ring.offsets) pts.push_back({o.dx, o.dy});
    return pts;
}

Moments run_batch(const RingNeighborhood& hood, const std::vector<SupportPoint>& pts, VFamily v, double t,
                  NoiseDistribution dist, int half_width, std::uint64_t seed, std::int64_t first,
                  std::int64_t last) {
    Moments m;
    std::vector<double> original(pts.size());
    for (std::int64_t trial = first; trial < last; ++trial) {
        std::uint64_t s = trial_seed(seed, static_cast<std::uint64_t>(trial));
        RealImage patch = sample_patch(dist, 1.0, half_width, s);
        const double* center = patch.row(half_width) + half_width;
        const std::ptrdiff_t stride = patch.width();

        for (std::size_t i = 0; i < pts.size(); ++i) original[i] = center[pts[i].dy * stride + pts[i].dx];
        // a flat support has no deviation to reduce; redraw (probability 0 for continuous Q)
        while (std::ranges::all_of(original, [&](double f) { return f == original[0]; })) {
            s = splitmix64(s);
            patch = sample_patch(dist, 1.0, half_width, s);
            center = patch.row(half_width) + half_width;
            for (std::size_t i = 0; i < pts.size(); ++i) original[i] = center[pts[i].dy * stride + pts[i].dx];
        }

        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double* c = center + pts[i].dy * stride + pts[i].dx;
            auto sample = [c, stride](int dx, int dy) { return c[dy * stride + dx]; };
            const double h = detail::ring_filter(hood, v, t, false, *c, sample);
            const double f = original[i];
            m.sum_f += f;
            m.sum_ff += f * f;
            m.sum_h += h;
            m.sum_hh += h * h;
        }
        m.n += static_cast<double>(pts.size());
    }
    return m;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::ranges::transform(out, out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

}  // namespace

std::string_view to_string(NoiseDistribution d) noexcept {
    return d == NoiseDistribution::Normal ? "normal" : "uniform";
}

NoiseDistribution parse_distribution(std::string_view name) {
    const std::string s = lower(name);
    if (s == "normal") return NoiseDistribution::Normal;
    if (s == "uniform") return NoiseDistribution::Uniform;
    throw std::invalid_argument("unknown distribution '" + std::string(name) + "' (expected normal|uniform)");
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) noexcept {
    return splitmix64(seed ^ splitmix64(trial + 1));
}

int patch_half_width(int n) { return 2 * static_cast<int>(std::ceil(ring_radius(n))); }

RealImage sample_patch(NoiseDistribution dist, double t, int half_width, std::uint64_t seed) {
    if (half_width < 0) throw std::invalid_argument("half_width must be >= 0");
    if (!(t >= 0.0)) throw std::invalid_argument("scale t must be >= 0");
    const int side = 2 * half_width + 1;
    RealImage patch(side, side);
    SplitMix64 gen(seed);
    if (dist == NoiseDistribution::Normal) {
        std::normal_distribution<double> q(0.0, 1.0);
        for (double& v : patch.pixels()) v = t * q(gen);
    } else {
        constexpr double a = std::numbers::sqrt3;
        std::uniform_real_distribution<double> q(-a, a);
        for (double& v : patch.pixels()) v = t * q(gen);
    }
    return patch;
}

KEstimate estimate_K(const KernelSpec& base, double t, NoiseDistribution dist, std::int64_t trials,
                     std::uint64_t seed) {
    base.with_scale(t).validate();
    if (trials < kMinTrials) throw std::invalid_argument("estimate_K requires at least 100 trials");

    const RingNeighborhood hood = build_rings(base.n, base.w);
    const auto pts = support_points(hood);
    const int half_width = patch_half_width(base.n);

    std::vector<Moments> batches(kBatches);
#pragma omp parallel for schedule(dynamic)
    for (int b = 0; b < kBatches; ++b) {
        const std::int64_t first = trials * b / kBatches;
        const std::int64_t last = trials * (b + 1) / kBatches;
        batches[static_cast<std::size_t>(b)] =
            run_batch(hood, pts, base.v, t, dist, half_width, seed, first, last);
    }

    Moments total;
    double mean_k = 0.0;
    std::vector<double> batch_k(kBatches);
    for (int b = 0; b < kBatches; ++b) {
        total.add(batches[static_cast<std::size_t>(b)]);
        batch_k[static_cast<std::size_t>(b)] = batches[static_cast<std::size_t>(b)].ratio();
        mean_k += batch_k[static_cast<std::size_t>(b)];
    }
    mean_k /= kBatches;
    double ss = 0.0;
    for (double k : batch_k) ss += (k - mean_k) * (k - mean_k);

    KEstimate est;
    est.t = t;
    est.n = base.n;
    est.k_hat = total.ratio();
    est.std_err = std::sqrt(ss / (kBatches - 1)) / std::sqrt(static_cast<double>(kBatches));
    est.trials = trials;
    return est;
}

KCurve compute_curve(const CurveSetup& setup, std::span<const double> t_grid) {
    if (t_grid.empty()) throw std::invalid_argument("compute_curve: empty t grid");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] >= 0.0)) throw std::invalid_argument("compute_curve: t values must be >= 0");
        if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("compute_curve: t grid must be strictly increasing");
    }
    KCurve curve{setup, {}};
    curve.points.reserve(t_grid.size());
    const KernelSpec base = setup.kernel(0.0);
    for (double t : t_grid) curve.points.push_back(estimate_K(base, t, setup.dist, setup.trials, setup.seed));
    return curve;
}

double solve_threshold(const CurveSetup& setup, const ThresholdOptions& opts) {
    if (!(opts.t_lo >= 0.0) || !(opts.t_hi > opts.t_lo))
        throw std::invalid_argument("threshold bracket must satisfy 0 <= lo < hi");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("threshold tolerance must be > 0");

    const KernelSpec base = setup.kernel(0.0);
    auto k_at = [&](double t) { return estimate_K(base, t, setup.dist, setup.trials, setup.seed).k_hat; };

    double lo = opts.t_lo;
    double hi = opts.t_hi;
    const double k_lo = k_at(lo);
    const double k_hi = k_at(hi);
    if (!(k_lo < opts.target && opts.target < k_hi)) {
        std::ostringstream os;
        os << "bracket [" << lo << ", " << hi << "] does not straddle K = " << opts.target << " (K(lo) = " << k_lo
           << ", K(hi) = " << k_hi << ")";
        throw BracketError(os.str());
    }
    int iterations = 0;
    while (hi - lo > opts.tol) {
        if (++iterations > opts.max_iterations) throw ConvergenceError("threshold bisection exceeded iteration limit");
        const double mid = 0.5 * (lo + hi);
        if (k_at(mid) < opts.target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

CurveExtrema find_extrema(const KCurve& curve, int window) {
    const auto& pts = curve.points;
    if (pts.size() < 5) throw std::invalid_argument("find_extrema needs at least 5 curve points");
    if (window < 1 || window % 2 == 0) throw std::invalid_argument("smoothing window must be a positive odd number");

    const std::size_t count = pts.size();
    const std::size_t half = static_cast<std::size_t>(window / 2);
    std::vector<double> smooth(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t a = i >= half ? i - half : 0;
        const std::size_t b = std::min(count - 1, i + half);
        double sum = 0.0;
        for (std::size_t j = a; j <= b; ++j) sum += pts[j].k_hat;
        smooth[i] = sum / static_cast<double>(b - a + 1);
    }

    CurveExtrema ex;
    ex.k_0 = pts.front().k_hat;
    ex.plateau = pts.back().k_hat;
    ex.plateau_err = pts.back().std_err;

    for (std::size_t i = 1; i + 1 < count; ++i) {
        if (smooth[i] < smooth[i - 1] && smooth[i] <= smooth[i + 1]) {
            if (pts[i].k_hat <= ex.k_0) {
                ex.min_index = i;
                ex.t_min = pts[i].t;
                ex.k_min = pts[i].k_hat;
            }
            break;
        }
    }

    std::size_t best = 1;
    for (std::size_t i = 2; i + 1 < count; ++i)
        if (smooth[i] > smooth[best]) best = i;
    if (smooth[best] > smooth[best - 1] && smooth[best] > smooth[best + 1] && pts[best].k_hat > ex.plateau) {
        ex.max_index = best;
        ex.t_max = pts[best].t;
        ex.k_max = pts[best].k_hat;
    }
    return ex;
}

void write_curve_csv(const KCurve& curve, std::ostream& os) {
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf.precision(9);
    buf << "t,k_hat,std_err,trials\n";
    for (const auto& p : curve.points) buf << p.t << ',' << p.k_hat << ',' << p.std_err << ',' << p.trials << '\n';
    os << buf.str();
}

}  // namespace bfkit
