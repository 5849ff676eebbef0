#include "bfkit/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <locale>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bfkit/analysis.hpp"
#include "bfkit/calibrate.hpp"
#include "bfkit/ctmodel.hpp"
#include "bfkit/errors.hpp"
#include "bfkit/filter.hpp"
#include "bfkit/io.hpp"

namespace bfkit {

namespace {

// Malformed option values; reported with exit code 1.
class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_number(std::string_view text, std::string_view what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
        throw UsageError(std::string(what) + ": '" + std::string(text) + "' is not a number");
    return v;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto at = text.find(sep, start);
        parts.emplace_back(text.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
        if (at == std::string_view::npos) break;
        start = at + 1;
    }
    return parts;
}

std::pair<double, double> parse_pair(const std::string& text, std::string_view what) {
    const auto parts = split(text, ':');
    if (parts.size() != 2) throw UsageError(std::string(what) + " expects lo:hi, got '" + text + "'");
    const double lo = parse_number(parts[0], what);
    const double hi = parse_number(parts[1], what);
    if (!(lo <= hi)) throw UsageError(std::string(what) + " requires lo <= hi");
    return {lo, hi};
}

std::vector<double> parse_grid(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError("--t-grid expects lo:hi:step, got '" + text + "'");
    const double lo = parse_number(parts[0], "--t-grid");
    const double hi = parse_number(parts[1], "--t-grid");
    const double step = parse_number(parts[2], "--t-grid");
    if (!(step > 0.0) || !(hi >= lo) || lo < 0.0) throw UsageError("--t-grid needs 0 <= lo <= hi and step > 0");
    std::vector<double> grid;
    for (long long i = 0;; ++i) {
        const double t = lo + static_cast<double>(i) * step;
        if (t > hi + 1e-9 * step) break;
        grid.push_back(t);
    }
    return grid;
}

std::pair<int, int> parse_size(const std::string& text) {
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos) throw UsageError("--size expects WxH, got '" + text + "'");
    const double w = parse_number(std::string_view(text).substr(0, x), "--size");
    const double h = parse_number(std::string_view(text).substr(x + 1), "--size");
    if (w < 1 || h < 1 || w != std::floor(w) || h != std::floor(h) || w > 1e5 || h > 1e5)
        throw UsageError("--size needs positive integer dimensions");
    return {static_cast<int>(w), static_cast<int>(h)};
}

template <typename Fn>
auto as_usage(Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

std::string format_number(double v, int precision) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(precision);
    os << v;
    return os.str();
}

void write_text(const std::string& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    body(out);
    if (!out) throw FormatError("write failed for " + path);
}

struct KernelArgs {
    std::string v = "frac";
    int n = 3;
    std::string w = "power";

    void add_to(CLI::App* cmd, bool v_required) {
        auto* opt = cmd->add_option("--v", v, "photometric family: abs|frac|quad|exp");
        if (v_required) opt->required();
        cmd->add_option("--n", n, "support size (rings), 1..5")->check(CLI::Range(1, 5));
        cmd->add_option("--w", w, "spatial family: power|gauss:<sigma>");
    }
    VFamily vfamily() const { return as_usage([&] { return parse_vfamily(v); }); }
    WFamily wfamily() const { return as_usage([&] { return parse_wfamily(w); }); }
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Ring-separated bilateral filtering, K(t) analysis and CT dose planning", "bfkit"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = runtime default)")->check(CLI::NonNegativeNumber);

    std::function<void()> action;

    // filter
    auto* filter_cmd = app.add_subcommand("filter", "apply the bilateral filter to an image");
    KernelArgs filter_kernel;
    std::string filter_in;
    std::string filter_out;
    double filter_t = 0.0;
    std::string filter_gate;
    std::string filter_gate_mode = "mean";
    std::string filter_border = "clamp";
    int filter_iterations = 1;
    bool filter_center = false;
    filter_cmd->add_option("--in", filter_in, "input image (.raw or .pgm)")->required();
    filter_cmd->add_option("--out", filter_out, "output image (.raw or .pgm)")->required();
    filter_kernel.add_to(filter_cmd, true);
    filter_cmd->add_option("--t", filter_t, "photometric scale t (1/intensity)")->required()->check(
        CLI::NonNegativeNumber);
    filter_cmd->add_option("--gate", filter_gate, "only filter where the gate test lies in lo:hi");
    filter_cmd->add_option("--gate-mode", filter_gate_mode, "gate test: mean (support mean) | center")
        ->check(CLI::IsMember({"mean", "center"}));
    filter_cmd->add_option("--iterate", filter_iterations, "number of passes")->check(CLI::NonNegativeNumber);
    filter_cmd->add_option("--border", filter_border, "clamp | skip")->check(CLI::IsMember({"clamp", "skip"}));
    filter_cmd->add_flag("--include-center", filter_center, "add the center pixel to the support with weight 1");
    filter_cmd->callback([&] {
        action = [&] {
            FilterConfig cfg;
            cfg.spec = KernelSpec{filter_kernel.vfamily(), filter_t, filter_kernel.wfamily(), filter_kernel.n};
            if (!filter_gate.empty()) {
                const auto [lo, hi] = parse_pair(filter_gate, "--gate");
                cfg.gate = GateRange{lo, hi};
            }
            cfg.gate_mode = filter_gate_mode == "center" ? GateMode::Center : GateMode::LocalMean;
            cfg.border = filter_border == "skip" ? BorderPolicy::Skip : BorderPolicy::Clamp;
            cfg.include_center = filter_center;
            as_usage([&] {
                cfg.validate();
                return 0;
            });
            const Image img = read_image(filter_in);
            write_image(filter_iterate(img, cfg, filter_iterations), filter_out);
        };
    });

    // curve
    auto* curve_cmd = app.add_subcommand("curve", "Monte-Carlo K(t) curve as CSV");
    KernelArgs curve_kernel;
    std::string curve_dist = "normal";
    std::string curve_grid;
    std::int64_t curve_trials = kExploratoryTrials;
    std::uint64_t curve_seed = 1;
    std::string curve_out;
    curve_kernel.add_to(curve_cmd, true);
    curve_cmd->add_option("--dist", curve_dist, "noise distribution: normal|uniform");
    curve_cmd->add_option("--t-grid", curve_grid, "lo:hi:step")->required();
    curve_cmd->add_option("--trials", curve_trials, "trials per point")->check(CLI::Range(kMinTrials, INT64_MAX));
    curve_cmd->add_option("--seed", curve_seed, "random seed");
    curve_cmd->add_option("--out", curve_out, "CSV path (default: standard output)");
    curve_cmd->callback([&] {
        action = [&] {
            CurveSetup setup{curve_kernel.vfamily(), curve_kernel.wfamily(), curve_kernel.n,
                             as_usage([&] { return parse_distribution(curve_dist); }), curve_trials, curve_seed};
            const auto grid = parse_grid(curve_grid);
            const KCurve curve = compute_curve(setup, grid);
            if (curve_out.empty()) {
                write_curve_csv(curve, out);
            } else {
                write_text(curve_out, [&](std::ostream& os) { write_curve_csv(curve, os); });
            }
        };
    });

    // threshold
    auto* thr_cmd = app.add_subcommand("threshold", "solve K(t0) = target by bisection");
    KernelArgs thr_kernel;
    std::string thr_dist = "normal";
    double thr_target = 0.5;
    std::string thr_bracket = "0.1:5";
    double thr_tol = 0.01;
    std::int64_t thr_trials = kTableTrials;
    std::uint64_t thr_seed = 1;
    thr_kernel.add_to(thr_cmd, true);
    thr_cmd->add_option("--dist", thr_dist, "noise distribution: normal|uniform");
    thr_cmd->add_option("--target", thr_target, "target ratio K(t0)");
    thr_cmd->add_option("--bracket", thr_bracket, "lo:hi search interval for t0");
    thr_cmd->add_option("--tol", thr_tol, "final bracket width")->check(CLI::PositiveNumber);
    thr_cmd->add_option("--trials", thr_trials, "trials per probe")->check(CLI::Range(kMinTrials, INT64_MAX));
    thr_cmd->add_option("--seed", thr_seed, "random seed");
    thr_cmd->callback([&] {
        action = [&] {
            CurveSetup setup{thr_kernel.vfamily(), thr_kernel.wfamily(), thr_kernel.n,
                             as_usage([&] { return parse_distribution(thr_dist); }), thr_trials, thr_seed};
            const auto [lo, hi] = parse_pair(thr_bracket, "--bracket");
            ThresholdOptions opts;
            opts.target = thr_target;
            opts.t_lo = lo;
            opts.t_hi = hi;
            opts.tol = thr_tol;
            out << format_number(solve_threshold(setup, opts), 6) << '\n';
        };
    });

    // plan
    auto* plan_cmd = app.add_subcommand("plan", "dose fraction -> noise sigma -> filter scale t = t0 / sigma");
    KernelArgs plan_kernel;
    double plan_x = 0.0;
    std::string plan_model;
    std::optional<double> plan_t0;
    bool plan_solve = false;
    std::int64_t plan_trials = kTableTrials;
    std::uint64_t plan_seed = 1;
    std::string plan_bracket;
    std::string plan_gate = "-100:300";
    bool plan_no_gate = false;
    bool plan_apply = false;
    std::string plan_in;
    std::string plan_out;
    plan_cmd->add_option("--dose-fraction", plan_x, "tube current as a fraction of the full protocol")->required();
    plan_cmd->add_option("--model", plan_model, "dose/noise model config (key=value lines)");
    plan_kernel.add_to(plan_cmd, false);
    plan_cmd->add_option("--t0", plan_t0, "50% threshold (default: published value for --v)")
        ->check(CLI::PositiveNumber);
    plan_cmd->add_flag("--solve-t0", plan_solve, "solve t0 by Monte Carlo instead of using the published value");
    plan_cmd->add_option("--trials", plan_trials, "trials per probe for --solve-t0")
        ->check(CLI::Range(kMinTrials, INT64_MAX));
    plan_cmd->add_option("--seed", plan_seed, "random seed for --solve-t0");
    plan_cmd->add_option("--bracket", plan_bracket, "lo:hi bracket for --solve-t0");
    plan_cmd->add_option("--gate", plan_gate, "intensity gate lo:hi");
    plan_cmd->add_flag("--no-gate", plan_no_gate, "filter every pixel");
    plan_cmd->add_flag("--apply", plan_apply, "filter --in into --out with the plan");
    plan_cmd->add_option("--in", plan_in, "input image for --apply");
    plan_cmd->add_option("--out", plan_out, "output image for --apply");
    plan_cmd->callback([&] {
        action = [&] {
            if (plan_apply && (plan_in.empty() || plan_out.empty())) throw UsageError("--apply needs --in and --out");
            const DoseNoiseModel model =
                plan_model.empty() ? DoseNoiseModel::liver_protocol() : read_model(std::filesystem::path(plan_model));
            PlanOptions opts;
            opts.v = plan_kernel.vfamily();
            opts.n = plan_kernel.n;
            opts.w = plan_kernel.wfamily();
            opts.t0 = plan_t0;
            if (plan_no_gate) {
                opts.gate.reset();
            } else {
                const auto [lo, hi] = parse_pair(plan_gate, "--gate");
                opts.gate = GateRange{lo, hi};
            }
            if (plan_solve) {
                CurveSetup setup{opts.v, opts.w, opts.n, NoiseDistribution::Normal, plan_trials, plan_seed};
                ThresholdOptions topt;
                if (!plan_bracket.empty()) {
                    std::tie(topt.t_lo, topt.t_hi) = parse_pair(plan_bracket, "--bracket");
                } else if (opts.v == VFamily::Abs) {
                    topt.t_lo = 1.0;
                    topt.t_hi = 50.0;
                }
                opts.t0 = solve_threshold(setup, topt);
            }
            const FilterPlan plan = plan_filter(plan_x, model, opts);
            write_plan(plan, out);
            if (plan_apply) write_image(filter_image(read_image(plan_in), plan.config()), plan_out);
        };
    });

    // calibrate
    auto* cal_cmd = app.add_subcommand("calibrate", "empirical K(t) and noise regression from a dose pair");
    std::string cal_high;
    std::string cal_low;
    int cal_window = kDefaultWindowHalf;
    int cal_degree = kDefaultTrendDegree;
    std::string cal_out;
    std::string cal_points;
    cal_cmd->add_option("--high", cal_high, "high-dose image")->required();
    cal_cmd->add_option("--low", cal_low, "low-dose image")->required();
    cal_cmd->add_option("--window", cal_window, "local window half-size")->check(CLI::Range(1, 50));
    cal_cmd->add_option("--degree", cal_degree, "trend polynomial degree")->check(CLI::Range(0, 12));
    cal_cmd->add_option("--out", cal_out, "report path")->required();
    cal_cmd->add_option("--points", cal_points, "optional CSV of the t,ratio scatter");
    cal_cmd->callback([&] {
        action = [&] {
            const Image high = read_image(cal_high);
            const Image low = read_image(cal_low);
            const auto pts = empirical_K_points(high, low, cal_window);
            std::vector<Point2> xy;
            xy.reserve(pts.size());
            for (const auto& p : pts) xy.push_back({p.t, p.ratio});
            const PolyFit fit = fit_polynomial(xy, cal_degree);
            const RegressionReport reg = regress_noise(high, low, cal_window);
            write_text(cal_out, [&](std::ostream& os) { write_calibration_report(fit, reg, os); });
            if (!cal_points.empty()) write_text(cal_points, [&](std::ostream& os) { write_points_csv(pts, os); });
        };
    });

    // phantom
    auto* ph_cmd = app.add_subcommand("phantom", "synthetic banded phantom with normal noise");
    std::string ph_densities;
    double ph_sigma = 0.0;
    std::string ph_size = "256x256";
    std::uint64_t ph_seed = 1;
    std::string ph_out;
    ph_cmd->add_option("--densities", ph_densities, "comma-separated band densities (HU)")->required();
    ph_cmd->add_option("--sigma", ph_sigma, "noise deviation (HU)")->required()->check(CLI::NonNegativeNumber);
    ph_cmd->add_option("--size", ph_size, "WxH");
    ph_cmd->add_option("--seed", ph_seed, "random seed");
    ph_cmd->add_option("--out", ph_out, "output image")->required();
    ph_cmd->callback([&] {
        action = [&] {
            std::vector<double> densities;
            for (const auto& part : split(ph_densities, ',')) densities.push_back(parse_number(part, "--densities"));
            const auto [w, h] = parse_size(ph_size);
            const int bands = static_cast<int>(densities.size());
            const RegionLayout layout = as_usage([&] { return band_layout(w, h, bands); });
            write_image(synth_phantom(densities, layout, ph_sigma, ph_seed), ph_out);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "bfkit: " << e.what() << '\n';
        return kExitUsage;
    }

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    try {
        if (action) action();
        return kExitOk;
    } catch (const UsageError& e) {
        err << "bfkit: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericalError& e) {
        err << "bfkit: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "bfkit: " << e.what() << '\n';
        return kExitData;
    }
}

}  // namespace bfkit
