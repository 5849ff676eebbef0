#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bfkit/image.hpp"

namespace bfkit {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Empirical deviation reduction at one pixel: t is the low-dose local
/// deviation, ratio = s_high / s_low.
struct KPoint {
    double t = 0.0;
    double ratio = 0.0;
};

struct PolyFit {
    int degree = 0;
    std::vector<double> coefficients;  // ascending powers
    double r_squared = 0.0;
    std::size_t point_count = 0;

    double operator()(double x) const noexcept;
};

struct Coefficient {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    double t_statistic = 0.0;
    double p_value = 1.0;
};

struct RegressionReport {
    Coefficient intercept;
    std::vector<Coefficient> predictors;
    std::size_t sample_count = 0;
    double r_squared = 0.0;
};

inline constexpr int kDefaultWindowHalf = 2;
inline constexpr int kDefaultTrendDegree = 4;
inline constexpr double kLowStdFloor = 1e-6;

/// Population standard deviation over the (2*half+1)^2 window, edges
/// replicated.
RealImage local_std_map(const Image& img, int half);

/// Window mean with the same border rule as local_std_map.
RealImage local_mean_map(const Image& img, int half);

/// One point per pixel with s_low above `floor`. Throws
/// std::invalid_argument when the images differ in size.
std::vector<KPoint> empirical_K_points(const Image& high, const Image& low, int half,
                                       double floor = kLowStdFloor);

/// Least-squares polynomial of the given degree. Throws DegenerateFitError
/// when the design matrix is rank deficient (too few or coincident x).
PolyFit fit_polynomial(std::span<const Point2> points, int degree);

/// Ordinary least squares of y on an intercept plus the named predictors,
/// with two-sided p-values from Student's t with (count - p - 1) degrees of
/// freedom. Throws DegenerateFitError for collinear predictors.
RegressionReport ols(std::span<const double> y, const std::vector<std::vector<double>>& predictors,
                     const std::vector<std::string>& names);

/// s_high regressed on s_low and the low-dose local mean f_a. Needs at least
/// 30 pixels with s_low above the floor.
RegressionReport regress_noise(const Image& high, const Image& low, int half);

/// Two-sided p-value of a t statistic with `dof` degrees of freedom.
double two_sided_p(double t_statistic, double dof);

struct Histogram {
    double lo = 0.0;
    double bin_width = 1.0;
    std::vector<std::size_t> counts;
};

/// Fixed-width histogram of mean-removed values, for noise-shape inspection.
Histogram noise_histogram(std::span<const double> values, double lo, double hi, int bins);

void write_points_csv(std::span<const KPoint> points, std::ostream& os);
void write_histogram_csv(const Histogram& h, std::ostream& os);
/// Plain-text report: fit summary block and regression table.
void write_calibration_report(const PolyFit& fit, const RegressionReport& reg, std::ostream& os);

}  // namespace bfkit
