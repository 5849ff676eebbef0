#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace bfkit {

struct PixelCoord {
    int x = 0;
    int y = 0;
};

/// Row-major 2-D grid. `Image` holds stored HU samples, `RealImage` the
/// unrounded values that flow between filter passes.
template <typename T>
class Grid {
public:
    using value_type = T;

    Grid() = default;

    Grid(int width, int height, T fill = T{})
        : width_(checked(width)), height_(checked(height)),
          pixels_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}

    Grid(int width, int height, std::vector<T> pixels)
        : width_(checked(width)), height_(checked(height)), pixels_(std::move(pixels)) {
        if (pixels_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
            throw std::invalid_argument("Grid: pixel count does not match width*height");
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return pixels_.size(); }
    bool empty() const noexcept { return pixels_.empty(); }

    bool contains(PixelCoord p) const noexcept {
        return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_;
    }

    T& operator()(int x, int y) noexcept { return pixels_[index(x, y)]; }
    const T& operator()(int x, int y) const noexcept { return pixels_[index(x, y)]; }

    T& at(int x, int y) {
        if (!contains({x, y})) throw std::out_of_range("Grid::at: pixel out of bounds");
        return (*this)(x, y);
    }
    const T& at(int x, int y) const {
        if (!contains({x, y})) throw std::out_of_range("Grid::at: pixel out of bounds");
        return (*this)(x, y);
    }

    std::span<T> pixels() noexcept { return pixels_; }
    std::span<const T> pixels() const noexcept { return pixels_; }
    T* row(int y) noexcept { return pixels_.data() + static_cast<std::size_t>(y) * width_; }
    const T* row(int y) const noexcept { return pixels_.data() + static_cast<std::size_t>(y) * width_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    static int checked(int v) {
        if (v <= 0) throw std::invalid_argument("Grid: width and height must be positive");
        return v;
    }
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> pixels_;
};

using Image = Grid<std::int16_t>;
using RealImage = Grid<double>;

RealImage to_real(const Image& img);

/// Rounds half away from zero and saturates to the signed 16-bit range.
std::int16_t round_to_sample(double value) noexcept;

Image to_image(const RealImage& img);

}  // namespace bfkit
