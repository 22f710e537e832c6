#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cloudcast {

/// Single-channel raster of finite doubles, row-major.
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(int width, int height, double fill = 0.0);
    ScalarField(int width, int height, std::vector<double> data);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(int x, int y) { return data_[index(x, y)]; }
    double operator()(int x, int y) const { return data_[index(x, y)]; }

    double* row(int y) { return data_.data() + static_cast<std::size_t>(y) * width_; }
    const double* row(int y) const { return data_.data() + static_cast<std::size_t>(y) * width_; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    bool same_shape(const ScalarField& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    ScalarField transposed() const;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// Planar multi-channel raster (1 or 3 channels). RGB images are stored R, G, B
/// with nominal sample range [0, 1].
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels, double fill = 0.0);
    Image(int width, int height, int channels, std::vector<double> data);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    std::size_t plane_size() const { return static_cast<std::size_t>(width_) * height_; }

    double& at(int c, int x, int y) { return data_[index(c, x, y)]; }
    double at(int c, int x, int y) const { return data_[index(c, x, y)]; }

    std::span<double> plane(int c) { return {data_.data() + c * plane_size(), plane_size()}; }
    std::span<const double> plane(int c) const {
        return {data_.data() + c * plane_size(), plane_size()};
    }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    ScalarField channel(int c) const;
    void set_channel(int c, const ScalarField& field);

    bool same_shape(const Image& other) const {
        return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
    }

private:
    std::size_t index(int c, int x, int y) const {
        return c * plane_size() + static_cast<std::size_t>(y) * width_ + x;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

}  // namespace cloudcast
