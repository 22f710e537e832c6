#include "cloudcast/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cloudcast/error.hpp"

namespace cloudcast {

namespace {

void check_dims(int width, int height) {
    if (width < 2 || height < 2) {
        throw InvalidInput("raster must be at least 2x2, got " + std::to_string(width) + "x" +
                           std::to_string(height));
    }
}

void check_finite(std::span<const double> data) {
    if (!std::all_of(data.begin(), data.end(), [](double s) { return std::isfinite(s); })) {
        throw InvalidInput("raster contains non-finite samples");
    }
}

}  // namespace

ScalarField::ScalarField(int width, int height, double fill) : width_(width), height_(height) {
    check_dims(width, height);
    if (!std::isfinite(fill)) throw InvalidInput("non-finite fill value");
    data_.assign(static_cast<std::size_t>(width) * height, fill);
}

ScalarField::ScalarField(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * height) {
        throw InvalidInput("field data length " + std::to_string(data_.size()) +
                           " does not match " + std::to_string(width) + "x" +
                           std::to_string(height));
    }
    check_finite(data_);
}

ScalarField ScalarField::transposed() const {
    ScalarField out(height_, width_);
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x) out(y, x) = (*this)(x, y);
    return out;
}

Image::Image(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
    check_dims(width, height);
    if (channels != 1 && channels != 3) {
        throw InvalidInput("image must have 1 or 3 channels, got " + std::to_string(channels));
    }
    if (!std::isfinite(fill)) throw InvalidInput("non-finite fill value");
    data_.assign(plane_size() * channels, fill);
}

Image::Image(int width, int height, int channels, std::vector<double> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    check_dims(width, height);
    if (channels != 1 && channels != 3) {
        throw InvalidInput("image must have 1 or 3 channels, got " + std::to_string(channels));
    }
    if (data_.size() != plane_size() * channels) {
        throw InvalidInput("image data length does not match width x height x channels");
    }
    check_finite(data_);
}

ScalarField Image::channel(int c) const {
    if (c < 0 || c >= channels_) throw InvalidInput("channel index out of range");
    auto p = plane(c);
    return ScalarField(width_, height_, std::vector<double>(p.begin(), p.end()));
}

void Image::set_channel(int c, const ScalarField& field) {
    if (c < 0 || c >= channels_) throw InvalidInput("channel index out of range");
    if (field.width() != width_ || field.height() != height_) {
        throw InvalidInput("channel dimensions do not match image");
    }
    std::copy(field.data().begin(), field.data().end(), plane(c).begin());
}

}  // namespace cloudcast
