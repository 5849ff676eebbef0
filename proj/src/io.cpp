#include "bfkit/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "bfkit/errors.hpp"

namespace bfkit {

namespace {

std::string extension_of(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::ranges::transform(ext, ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spill(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("write failed for " + path.string());
}

class PgmHeaderReader {
public:
    explicit PgmHeaderReader(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

    std::size_t pos() const noexcept { return pos_; }
    std::size_t token_start() const noexcept { return token_start_; }

    void expect_magic() {
        if (bytes_.size() < 2 || bytes_[0] != 'P' || bytes_[1] != '5')
            throw FormatError("not a binary PGM (expected magic P5)", 0);
        pos_ = 2;
    }

    long long next_int(const char* what) {
        skip_space_and_comments();
        const std::size_t start = token_start_ = pos_;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) ++pos_;
        if (start == pos_) throw FormatError(std::string("PGM header: expected ") + what, start);
        if (pos_ - start > 9) throw FormatError(std::string("PGM header: ") + what + " too large", start);
        long long v = 0;
        for (std::size_t i = start; i < pos_; ++i) v = v * 10 + (bytes_[i] - '0');
        return v;
    }

    void single_space() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
            throw FormatError("PGM header: expected whitespace before raster", pos_);
        ++pos_;
    }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    const std::vector<unsigned char>& bytes_;
    std::size_t pos_ = 0;
    std::size_t token_start_ = 0;
};

Image read_pgm(const std::filesystem::path& path) {
    const auto bytes = slurp(path);
    PgmHeaderReader hdr(bytes);
    hdr.expect_magic();
    const long long width = hdr.next_int("width");
    const long long height = hdr.next_int("height");
    const long long maxval = hdr.next_int("maxval");
    const std::size_t maxval_at = hdr.token_start();
    if (width <= 0 || height <= 0) throw FormatError("PGM header: width and height must be positive");
    if (maxval < 256 || maxval > 65535)
        throw FormatError("only 16-bit PGM is supported (maxval " + std::to_string(maxval) + ")", maxval_at);
    hdr.single_space();

    const std::size_t data_at = hdr.pos();
    const std::size_t expected = static_cast<std::size_t>(width * height) * 2;
    if (bytes.size() - data_at != expected) {
        throw FormatError("PGM raster holds " + std::to_string(bytes.size() - data_at) + " bytes, expected " +
                              std::to_string(expected),
                          data_at);
    }
    Image img(static_cast<int>(width), static_cast<int>(height));
    auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        const std::size_t at = data_at + 2 * i;
        const unsigned v = (static_cast<unsigned>(bytes[at]) << 8) | bytes[at + 1];
        if (v > static_cast<unsigned>(maxval)) throw FormatError("PGM sample exceeds maxval", at);
        if (v > 32767u) throw FormatError("PGM sample above 32767 does not fit a signed 16-bit image", at);
        px[i] = static_cast<std::int16_t>(v);
    }
    return img;
}

void write_pgm(const Image& img, const std::filesystem::path& path) {
    const auto px = img.pixels();
    if (std::ranges::any_of(px, [](std::int16_t v) { return v < 0; }))
        throw RangeError("PGM cannot store negative samples; write a .raw image instead");
    std::string header = "P5\n" + std::to_string(img.width()) + ' ' + std::to_string(img.height()) + "\n65535\n";
    std::vector<unsigned char> bytes(header.begin(), header.end());
    bytes.reserve(bytes.size() + px.size() * 2);
    for (std::int16_t v : px) {
        const auto u = static_cast<std::uint16_t>(v);
        bytes.push_back(static_cast<unsigned char>(u >> 8));
        bytes.push_back(static_cast<unsigned char>(u & 0xFF));
    }
    spill(path, bytes);
}

int parse_meta_int(const std::string& value, const std::string& key, const std::filesystem::path& meta) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size() || v <= 0)
        throw FormatError("sidecar " + meta.string() + ": bad " + key + " '" + value + "'");
    return v;
}

Image read_raw(const std::filesystem::path& path) {
    const auto meta = sidecar_path(path);
    std::ifstream in(meta);
    if (!in) throw FormatError("missing sidecar " + meta.string() + " for raw image " + path.string());
    int width = 0;
    int height = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }),
                   line.end());
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("sidecar " + meta.string() + ": expected key=value");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "width") {
            width = parse_meta_int(value, key, meta);
        } else if (key == "height") {
            height = parse_meta_int(value, key, meta);
        } else {
            throw FormatError("sidecar " + meta.string() + ": unknown key '" + key + "'");
        }
    }
    if (width == 0 || height == 0) throw FormatError("sidecar " + meta.string() + " must define width and height");

    const auto bytes = slurp(path);
    const std::size_t expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 2;
    if (bytes.size() != expected) {
        throw FormatError("raw payload holds " + std::to_string(bytes.size()) + " bytes, expected " +
                              std::to_string(expected),
                          std::min(bytes.size(), expected));
    }
    Image img(width, height);
    auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        const auto u = static_cast<std::uint16_t>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
        px[i] = static_cast<std::int16_t>(u);
    }
    return img;
}

void write_raw(const Image& img, const std::filesystem::path& path) {
    const auto px = img.pixels();
    std::vector<unsigned char> bytes;
    bytes.reserve(px.size() * 2);
    for (std::int16_t v : px) {
        const auto u = static_cast<std::uint16_t>(v);
        bytes.push_back(static_cast<unsigned char>(u & 0xFF));
        bytes.push_back(static_cast<unsigned char>(u >> 8));
    }
    spill(path, bytes);
    std::ofstream meta(sidecar_path(path), std::ios::trunc);
    if (!meta) throw FormatError("cannot write sidecar " + sidecar_path(path).string());
    meta << "width=" << img.width() << "\nheight=" << img.height() << '\n';
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& raw_path) {
    auto meta = raw_path;
    meta.replace_extension(".meta");
    return meta;
}

Image read_image(const std::filesystem::path& path) {
    const std::string ext = extension_of(path);
    if (ext == ".pgm") return read_pgm(path);
    if (ext == ".raw") return read_raw(path);
    throw FormatError("unknown image extension '" + ext + "' (expected .pgm or .raw)");
}

void write_image(const Image& img, const std::filesystem::path& path) {
    const std::string ext = extension_of(path);
    if (ext == ".pgm") return write_pgm(img, path);
    if (ext == ".raw") return write_raw(img, path);
    throw FormatError("unknown image extension '" + ext + "' (expected .pgm or .raw)");
}

}  // namespace bfkit
