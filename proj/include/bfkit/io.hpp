#pragma once

#include <filesystem>

#include "bfkit/image.hpp"

namespace bfkit {

/// Reads `.pgm` (binary P5, 16-bit big-endian samples, values 0..32767) or
/// `.raw` (signed 16-bit little-endian, row-major) with a `.meta` sidecar
/// holding `width=<int>` and `height=<int>` lines. Throws FormatError.
Image read_image(const std::filesystem::path& path);

/// Writes by extension, as read_image reads. Negative samples cannot be
/// stored in PGM and raise RangeError. Throws FormatError for unknown
/// extensions or unwritable paths.
void write_image(const Image& img, const std::filesystem::path& path);

/// Sidecar path used for a `.raw` payload.
std::filesystem::path sidecar_path(const std::filesystem::path& raw_path);

}  // namespace bfkit
