#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cloudcast {

/// One bit of information per pixel, stored as 0/1 bytes. Sky/cloud masks store
/// sky as set (exported white); region-of-interest masks store "included" as set.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false);
    BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return bits_.size(); }

    bool operator()(int x, int y) const { return bits_[index(x, y)] != 0; }
    void set(int x, int y, bool value) { bits_[index(x, y)] = value ? 1 : 0; }

    std::span<const std::uint8_t> bits() const { return bits_; }
    std::span<std::uint8_t> bits() { return bits_; }

    std::size_t count() const;
    BinaryMask complement() const;

    bool same_shape(const BinaryMask& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }
    bool operator==(const BinaryMask&) const = default;

private:
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

}  // namespace cloudcast
