#include "bfkit/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <locale>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "bfkit/errors.hpp"

namespace bfkit {

namespace {

constexpr double kRankThreshold = 1e-10;

template <typename Fn>
RealImage window_map(const Image& img, int half, Fn&& reduce) {
    if (half < 0) throw std::invalid_argument("window half-size must be >= 0");
    RealImage out(img.width(), img.height());
    const int wmax = img.width() - 1;
    const int hmax = img.height() - 1;
    const int side = 2 * half + 1;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < img.height(); ++y) {
        std::vector<double> window(static_cast<std::size_t>(side * side));
        for (int x = 0; x < img.width(); ++x) {
            std::size_t k = 0;
            for (int dy = -half; dy <= half; ++dy)
                for (int dx = -half; dx <= half; ++dx)
                    window[k++] = img(std::clamp(x + dx, 0, wmax), std::clamp(y + dy, 0, hmax));
            out(x, y) = reduce(window);
        }
    }
    return out;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double pop_std(const std::vector<double>& v) {
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size()));
}

void require_same_size(const Image& a, const Image& b) {
    if (a.width() != b.width() || a.height() != b.height())
        throw std::invalid_argument("high- and low-dose images must have identical dimensions");
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

double r_squared(double ss_res, double ss_tot, double scale) {
    if (ss_tot <= std::numeric_limits<double>::min()) {
        // constant data: a perfect fit explains everything there is
        return ss_res <= 1e-18 * std::max(1.0, scale) ? 1.0 : 0.0;
    }
    return std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
}

}  // namespace

double PolyFit::operator()(double x) const noexcept {
    double y = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) y = y * x + *it;
    return y;
}

RealImage local_std_map(const Image& img, int half) { return window_map(img, half, pop_std); }

RealImage local_mean_map(const Image& img, int half) { return window_map(img, half, mean_of); }

std::vector<KPoint> empirical_K_points(const Image& high, const Image& low, int half, double floor) {
    require_same_size(high, low);
    const RealImage s_high = local_std_map(high, half);
    const RealImage s_low = local_std_map(low, half);
    std::vector<KPoint> points;
    points.reserve(low.size());
    for (std::size_t i = 0; i < low.size(); ++i) {
        const double sl = s_low.pixels()[i];
        if (sl > floor) points.push_back({sl, s_high.pixels()[i] / sl});
    }
    return points;
}

PolyFit fit_polynomial(std::span<const Point2> points, int degree) {
    if (degree < 0) throw std::invalid_argument("polynomial degree must be >= 0");
    const auto count = static_cast<Eigen::Index>(points.size());
    const int cols = degree + 1;
    if (count <= degree) throw DegenerateFitError("polynomial fit needs more points than its degree");

    // fit in a centred, scaled variable for conditioning
    double center = 0.0;
    for (const auto& p : points) center += p.x;
    center /= static_cast<double>(count);
    double scale = 0.0;
    for (const auto& p : points) scale = std::max(scale, std::fabs(p.x - center));
    if (degree > 0 && !(scale > 0.0)) throw DegenerateFitError("polynomial fit needs distinct x values");
    if (!(scale > 0.0)) scale = 1.0;

    Eigen::MatrixXd design(count, cols);
    Eigen::VectorXd y(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        const double u = (points[static_cast<std::size_t>(i)].x - center) / scale;
        double power = 1.0;
        for (int j = 0; j < cols; ++j) {
            design(i, j) = power;
            power *= u;
        }
        y(i) = points[static_cast<std::size_t>(i)].y;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(kRankThreshold);
    if (qr.rank() < cols) throw DegenerateFitError("polynomial design matrix is rank deficient");
    const Eigen::VectorXd beta = qr.solve(y);

    const Eigen::VectorXd resid = y - design * beta;
    const double mean_y = y.mean();
    const double ss_res = resid.squaredNorm();
    const double ss_tot = (y.array() - mean_y).square().sum();

    // expand sum_k beta_k ((x - c)/s)^k into powers of x
    PolyFit fit;
    fit.degree = degree;
    fit.coefficients.assign(static_cast<std::size_t>(cols), 0.0);
    for (int k = 0; k < cols; ++k) {
        const double bk = beta(k) / std::pow(scale, k);
        for (int j = 0; j <= k; ++j)
            fit.coefficients[static_cast<std::size_t>(j)] += bk * binomial(k, j) * std::pow(-center, k - j);
    }
    fit.r_squared = r_squared(ss_res, ss_tot, y.squaredNorm());
    fit.point_count = points.size();
    return fit;
}

double two_sided_p(double t_statistic, double dof) {
    if (std::isnan(t_statistic)) return 1.0;
    if (std::isinf(t_statistic)) return 0.0;
    boost::math::students_t_distribution<double> dist(dof);
    return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t_statistic))), 0.0, 1.0);
}

RegressionReport ols(std::span<const double> y, const std::vector<std::vector<double>>& predictors,
                     const std::vector<std::string>& names) {
    if (predictors.size() != names.size()) throw std::invalid_argument("ols: one name per predictor required");
    const auto count = static_cast<Eigen::Index>(y.size());
    const auto cols = static_cast<Eigen::Index>(predictors.size() + 1);
    for (const auto& col : predictors)
        if (col.size() != y.size()) throw std::invalid_argument("ols: predictor length differs from response");
    if (count <= cols) throw DegenerateFitError("ols: not enough samples for the number of predictors");

    Eigen::MatrixXd design(count, cols);
    Eigen::VectorXd resp(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        design(i, 0) = 1.0;
        for (Eigen::Index j = 1; j < cols; ++j)
            design(i, j) = predictors[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i)];
        resp(i) = y[static_cast<std::size_t>(i)];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(kRankThreshold);
    if (qr.rank() < cols) throw DegenerateFitError("ols: predictors are collinear");
    const Eigen::VectorXd beta = qr.solve(resp);
    const Eigen::VectorXd resid = resp - design * beta;
    const double dof = static_cast<double>(count - cols);
    const double sigma2 = resid.squaredNorm() / dof;

    // (X'X)^-1 = P R^-1 R^-T P'
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(cols, cols).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(cols, cols));
    const Eigen::MatrixXd cov_perm = r_inv * r_inv.transpose();
    const Eigen::MatrixXd cov = qr.colsPermutation() * cov_perm * qr.colsPermutation().transpose();

    auto make = [&](Eigen::Index j, std::string name) {
        Coefficient c;
        c.name = std::move(name);
        c.estimate = beta(j);
        c.std_error = std::sqrt(std::max(sigma2 * cov(j, j), 0.0));
        if (c.std_error > 0.0) {
            c.t_statistic = c.estimate / c.std_error;
        } else {
            c.t_statistic = c.estimate == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), c.estimate);
        }
        c.p_value = c.estimate == 0.0 && c.std_error == 0.0 ? 1.0 : two_sided_p(c.t_statistic, dof);
        return c;
    };

    RegressionReport report;
    report.intercept = make(0, "intercept");
    for (Eigen::Index j = 1; j < cols; ++j) report.predictors.push_back(make(j, names[static_cast<std::size_t>(j - 1)]));
    report.sample_count = y.size();
    const double ss_tot = (resp.array() - resp.mean()).square().sum();
    report.r_squared = r_squared(resid.squaredNorm(), ss_tot, resp.squaredNorm());
    return report;
}

RegressionReport regress_noise(const Image& high, const Image& low, int half) {
    require_same_size(high, low);
    const RealImage s_high = local_std_map(high, half);
    const RealImage s_low = local_std_map(low, half);
    const RealImage f_a = local_mean_map(low, half);

    std::vector<double> y;
    std::vector<std::vector<double>> xs(2);
    for (std::size_t i = 0; i < low.size(); ++i) {
        if (s_low.pixels()[i] <= kLowStdFloor) continue;
        y.push_back(s_high.pixels()[i]);
        xs[0].push_back(s_low.pixels()[i]);
        xs[1].push_back(f_a.pixels()[i]);
    }
    if (y.size() < 30) throw std::invalid_argument("regress_noise needs at least 30 usable pixels");
    return ols(y, xs, {"s_L", "f_a"});
}

Histogram noise_histogram(std::span<const double> values, double lo, double hi, int bins) {
    if (bins < 1 || !(hi > lo)) throw std::invalid_argument("histogram needs bins >= 1 and hi > lo");
    if (values.empty()) throw std::invalid_argument("histogram of no values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());

    Histogram h{lo, (hi - lo) / bins, std::vector<std::size_t>(static_cast<std::size_t>(bins), 0)};
    for (double v : values) {
        const double c = v - mean;
        if (c < lo || c >= hi) continue;
        auto bin = static_cast<std::size_t>((c - lo) / h.bin_width);
        h.counts[std::min(bin, h.counts.size() - 1)]++;
    }
    return h;
}

void write_points_csv(std::span<const KPoint> points, std::ostream& os) {
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf.precision(9);
    buf << "t,ratio\n";
    for (const auto& p : points) buf << p.t << ',' << p.ratio << '\n';
    os << buf.str();
}

void write_histogram_csv(const Histogram& h, std::ostream& os) {
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf.precision(9);
    buf << "bin_lo,bin_hi,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double a = h.lo + h.bin_width * static_cast<double>(i);
        buf << a << ',' << a + h.bin_width << ',' << h.counts[i] << '\n';
    }
    os << buf.str();
}

void write_calibration_report(const PolyFit& fit, const RegressionReport& reg, std::ostream& os) {
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf.precision(9);
    buf << "# empirical K trend fit (" << fit.point_count << " points)\n";
    buf << "degree";
    for (int j = 0; j <= fit.degree; ++j) buf << ",c" << j;
    buf << ",r_squared\n" << fit.degree;
    for (double c : fit.coefficients) buf << ',' << c;
    buf << ',' << fit.r_squared << "\n\n";

    buf << "# regression of s_H on s_L and f_a (" << reg.sample_count << " pixels, r_squared " << reg.r_squared
        << ")\n";
    buf << "term,estimate,std_error,t_statistic,p_value\n";
    auto row = [&](const Coefficient& c) {
        buf << c.name << ',' << c.estimate << ',' << c.std_error << ',' << c.t_statistic << ',' << c.p_value << '\n';
    };
    row(reg.intercept);
    for (const auto& c : reg.predictors) row(c);
    os << buf.str();
}

}  // namespace bfkit
