#pragma once

#include <cstdint>
#include <filesystem>
#include <span>

#include "cloudcast/image.hpp"
#include "cloudcast/mask.hpp"

namespace cloudcast {

/// Reads an 8-bit PNG (any colour type, converted to RGB) or a binary PPM (P6, maxval 255).
/// Samples map to [0, 1] by division by 255. Throws IoError on unreadable or corrupt files.
Image read_image(const std::filesystem::path& path);

/// Writes 8-bit RGB (3-channel) or greyscale (1-channel). Samples are clamped to
/// [0, 1] and rounded to the nearest 8-bit value. Output bytes depend only on the pixels.
void write_png(const std::filesystem::path& path, const Image& image);
void write_ppm(const std::filesystem::path& path, const Image& image);

/// 1-bit greyscale PNG, set pixels white.
void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask);

/// Reads any supported image as a mask: pixels whose mean RGB is >= 0.5 are set.
BinaryMask read_mask(const std::filesystem::path& path);

/// 8-bit quantization used by every encoder.
std::uint8_t quantize8(double sample);

// Raw encoders shared by the mask and flow-map writers.
void write_png_rgb8(const std::filesystem::path& path, int width, int height,
                    std::span<const std::uint8_t> interleaved_rgb);
void write_png_gray1(const std::filesystem::path& path, int width, int height,
                     std::span<const std::uint8_t> bits);

}  // namespace cloudcast
