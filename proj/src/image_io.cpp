#include "cloudcast/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "cloudcast/error.hpp"

namespace cloudcast {

namespace fs = std::filesystem;

namespace {

std::vector<unsigned char> slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Image from_interleaved(int width, int height, const std::vector<unsigned char>& rgb) {
    Image img(width, height, 3);
    const std::size_t n = img.plane_size();
    for (int c = 0; c < 3; ++c) {
        auto plane = img.plane(c);
        for (std::size_t i = 0; i < n; ++i) plane[i] = rgb[3 * i + c] / 255.0;
    }
    return img;
}

Image decode_png(const fs::path& path, const std::vector<unsigned char>& bytes) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw IoError("corrupt PNG " + path.string() + ": " + image.message);
    }
    image.format = PNG_FORMAT_RGB;
    std::vector<unsigned char> rgb(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, rgb.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw IoError("corrupt PNG " + path.string() + ": " + msg);
    }
    const int w = static_cast<int>(image.width);
    const int h = static_cast<int>(image.height);
    if (w < 2 || h < 2) throw IoError("image too small: " + path.string());
    return from_interleaved(w, h, rgb);
}

// Binary PPM: "P6" <ws> width <ws> height <ws> maxval <single ws> data.
Image decode_ppm(const fs::path& path, const std::vector<unsigned char>& bytes) {
    std::size_t pos = 2;
    auto next_int = [&]() -> long {
        for (;;) {
            while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
            if (pos < bytes.size() && bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
                continue;
            }
            break;
        }
        long value = 0;
        const std::size_t start = pos;
        while (pos < bytes.size() && std::isdigit(bytes[pos]) && pos - start < 9) {
            value = value * 10 + (bytes[pos++] - '0');
        }
        if (pos == start) throw IoError("malformed PPM header in " + path.string());
        return value;
    };
    const long w = next_int();
    const long h = next_int();
    const long maxval = next_int();
    if (maxval != 255) throw IoError("only 8-bit PPM is supported: " + path.string());
    if (w < 2 || h < 2) throw IoError("image too small: " + path.string());
    ++pos;  // single whitespace before the raster
    const std::size_t need = static_cast<std::size_t>(w) * h * 3;
    if (bytes.size() < pos + need) throw IoError("truncated PPM " + path.string());
    std::vector<unsigned char> rgb(bytes.begin() + pos, bytes.begin() + pos + need);
    return from_interleaved(static_cast<int>(w), static_cast<int>(h), rgb);
}

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};

// Full libpng write path; the simplified API cannot emit 1-bit greyscale.
// Kept free of objects with destructors between setjmp and any longjmp.
bool write_png_raw(std::FILE* fp, int width, int height, int bit_depth, int color_type,
                   png_bytepp rows) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) return false;
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return false;
    }
    png_init_io(png, fp);
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

void write_png_rows(const fs::path& path, int width, int height, int bit_depth, int color_type,
                    std::vector<unsigned char>& packed, std::size_t row_bytes) {
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) rows[y] = packed.data() + y * row_bytes;
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw IoError("cannot write " + path.string());
    if (!write_png_raw(fp.get(), width, height, bit_depth, color_type, rows.data())) {
        throw IoError("PNG encoding failed for " + path.string());
    }
    if (std::fflush(fp.get()) != 0) throw IoError("cannot write " + path.string());
}

}  // namespace

std::uint8_t quantize8(double sample) {
    const double c = std::clamp(sample, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

Image read_image(const fs::path& path) {
    const auto bytes = slurp(path);
    static constexpr unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (bytes.size() >= 8 && std::equal(png_sig, png_sig + 8, bytes.begin())) {
        return decode_png(path, bytes);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') return decode_ppm(path, bytes);
    throw IoError("unrecognised image format: " + path.string());
}

void write_png_rgb8(const fs::path& path, int width, int height,
                    std::span<const std::uint8_t> interleaved_rgb) {
    std::vector<unsigned char> packed(interleaved_rgb.begin(), interleaved_rgb.end());
    write_png_rows(path, width, height, 8, PNG_COLOR_TYPE_RGB, packed,
                   static_cast<std::size_t>(width) * 3);
}

void write_png_gray1(const fs::path& path, int width, int height,
                     std::span<const std::uint8_t> bits) {
    const std::size_t row_bytes = (static_cast<std::size_t>(width) + 7) / 8;
    std::vector<unsigned char> packed(row_bytes * height, 0);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (bits[static_cast<std::size_t>(y) * width + x]) {
                packed[y * row_bytes + x / 8] |= static_cast<unsigned char>(0x80u >> (x % 8));
            }
        }
    }
    write_png_rows(path, width, height, 1, PNG_COLOR_TYPE_GRAY, packed, row_bytes);
}

void write_png(const fs::path& path, const Image& image) {
    const int w = image.width();
    const int h = image.height();
    const std::size_t n = image.plane_size();
    if (image.channels() == 1) {
        std::vector<unsigned char> gray(n);
        auto p = image.plane(0);
        for (std::size_t i = 0; i < n; ++i) gray[i] = quantize8(p[i]);
        write_png_rows(path, w, h, 8, PNG_COLOR_TYPE_GRAY, gray, static_cast<std::size_t>(w));
        return;
    }
    std::vector<std::uint8_t> rgb(n * 3);
    for (int c = 0; c < 3; ++c) {
        auto p = image.plane(c);
        for (std::size_t i = 0; i < n; ++i) rgb[3 * i + c] = quantize8(p[i]);
    }
    write_png_rgb8(path, w, h, rgb);
}

void write_mask_png(const fs::path& path, const BinaryMask& mask) {
    write_png_gray1(path, mask.width(), mask.height(), mask.bits());
}

BinaryMask read_mask(const fs::path& path) {
    const Image img = read_image(path);
    BinaryMask mask(img.width(), img.height());
    for (std::size_t i = 0; i < img.plane_size(); ++i) {
        const double mean = (img.plane(0)[i] + img.plane(1)[i] + img.plane(2)[i]) / 3.0;
        mask.bits()[i] = mean >= 0.5 ? 1 : 0;
    }
    return mask;
}

void write_ppm(const fs::path& path, const Image& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P6\n" << image.width() << ' ' << image.height() << "\n255\n";
    const std::size_t n = image.plane_size();
    std::vector<char> rgb(n * 3);
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < 3; ++c) {
            const int src = image.channels() == 3 ? c : 0;
            rgb[3 * i + c] = static_cast<char>(quantize8(image.plane(src)[i]));
        }
    }
    out.write(rgb.data(), static_cast<std::streamsize>(rgb.size()));
    if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace cloudcast
