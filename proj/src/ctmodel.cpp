#include "bfkit/ctmodel.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <locale>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "bfkit/errors.hpp"

namespace bfkit {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double evaluate(const DoseNoiseModel& m, double x) noexcept { return (m.a * x + m.b) * x + m.c; }

}  // namespace

void DoseNoiseModel::validate() const {
    if (!(x_lo < x_hi)) throw std::invalid_argument("dose model requires x_lo < x_hi");
    // a quadratic's minimum on an interval is at an endpoint or the vertex
    double lowest = std::min(evaluate(*this, x_lo), evaluate(*this, x_hi));
    if (a > 0.0) {
        const double vertex = -b / (2.0 * a);
        if (vertex > x_lo && vertex < x_hi) lowest = std::min(lowest, evaluate(*this, vertex));
    }
    if (!(lowest > 0.0)) throw std::invalid_argument("dose model must predict a positive sigma on its interval");
}

double noise_sigma(const DoseNoiseModel& model, double x) {
    if (!(x >= model.x_lo && x <= model.x_hi)) {
        std::ostringstream os;
        os << "dose fraction " << x << " is outside the model domain [" << model.x_lo << ", " << model.x_hi << "]";
        throw OutOfDomainError(os.str());
    }
    return evaluate(model, x);
}

DoseNoiseModel read_model(std::istream& in) {
    std::map<std::string, double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw FormatError("model config line " + std::to_string(line_no) + ": expected key=value");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string val = trim(std::string_view(body).substr(eq + 1));
        if (key != "a" && key != "b" && key != "c" && key != "x_lo" && key != "x_hi")
            throw FormatError("model config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        double parsed = 0.0;
        auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), parsed);
        if (ec != std::errc{} || ptr != val.data() + val.size())
            throw FormatError("model config line " + std::to_string(line_no) + ": bad number '" + val + "'");
        values[key] = parsed;
    }
    for (const char* key : {"a", "b", "c", "x_lo", "x_hi"})
        if (!values.contains(key)) throw FormatError(std::string("model config is missing '") + key + "'");

    DoseNoiseModel m{values["a"], values["b"], values["c"], values["x_lo"], values["x_hi"]};
    try {
        m.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("model config: ") + e.what());
    }
    return m;
}

DoseNoiseModel read_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open model config " + path.string());
    return read_model(in);
}

void write_model(const DoseNoiseModel& model, std::ostream& out) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << "a=" << model.a << "\nb=" << model.b << "\nc=" << model.c << "\nx_lo=" << model.x_lo
       << "\nx_hi=" << model.x_hi << '\n';
    out << os.str();
}

double published_threshold(VFamily v) noexcept {
    switch (v) {
        case VFamily::Abs: return 15.05;
        case VFamily::Frac: return 1.40;
        case VFamily::Quad: return 0.77;
        case VFamily::Exp: return 0.67;
    }
    return 1.40;
}

FilterConfig FilterPlan::config() const {
    FilterConfig cfg;
    cfg.spec = spec;
    cfg.gate = gate;
    return cfg;
}

FilterPlan plan_filter(double x, const DoseNoiseModel& model, const PlanOptions& opts) {
    const double t0 = opts.t0.value_or(published_threshold(opts.v));
    if (!(t0 > 0.0)) throw std::invalid_argument("threshold t0 must be > 0");
    FilterPlan plan;
    plan.dose_fraction = x;
    plan.sigma = noise_sigma(model, x);
    plan.t0 = t0;
    plan.t = t0 / plan.sigma;
    plan.spec = KernelSpec{opts.v, plan.t, opts.w, opts.n};
    plan.spec.validate();
    plan.gate = opts.gate;
    return plan;
}

void write_plan(const FilterPlan& plan, std::ostream& out) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(9);
    os << "dose_fraction=" << plan.dose_fraction << '\n'
       << "sigma=" << plan.sigma << '\n'
       << "t0=" << plan.t0 << '\n'
       << "t=" << plan.t << '\n'
       << "v=" << to_string(plan.spec.v) << '\n'
       << "n=" << plan.spec.n << '\n'
       << "w=" << to_string(plan.spec.w) << '\n';
    if (plan.gate) {
        os << "gate=" << plan.gate->lo << ':' << plan.gate->hi << '\n';
    } else {
        os << "gate=none\n";
    }
    out << os.str();
}

RegionLayout band_layout(int width, int height, int regions) {
    if (regions < 1 || regions > 255) throw std::invalid_argument("band_layout: regions must be within 1..255");
    RegionLayout layout(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            layout(x, y) = static_cast<std::uint8_t>(static_cast<long long>(x) * regions / width);
    return layout;
}

Image synth_phantom(std::span<const double> densities, const RegionLayout& layout, double sigma,
                    std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("phantom sigma must be >= 0");
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    Image img(layout.width(), layout.height());
    for (int y = 0; y < layout.height(); ++y) {
        for (int x = 0; x < layout.width(); ++x) {
            const std::size_t region = layout(x, y);
            if (region >= densities.size()) throw std::invalid_argument("phantom layout refers to a missing density");
            img(x, y) = round_to_sample(densities[region] + sigma * noise(gen));
        }
    }
    return img;
}

}  // namespace bfkit
