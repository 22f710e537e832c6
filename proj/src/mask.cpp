#include "cloudcast/mask.hpp"

#include <algorithm>
#include <string>

#include "cloudcast/error.hpp"

namespace cloudcast {

BinaryMask::BinaryMask(int width, int height, bool fill)
    : width_(width), height_(height), bits_(static_cast<std::size_t>(width) * height, fill) {
    if (width < 1 || height < 1) throw InvalidInput("mask dimensions must be positive");
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
    if (width < 1 || height < 1) throw InvalidInput("mask dimensions must be positive");
    if (bits_.size() != static_cast<std::size_t>(width) * height) {
        throw InvalidInput("mask length " + std::to_string(bits_.size()) + " does not match " +
                           std::to_string(width) + "x" + std::to_string(height));
    }
    for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

BinaryMask BinaryMask::complement() const {
    BinaryMask out = *this;
    for (auto& b : out.bits_) b ^= 1;
    return out;
}

}  // namespace cloudcast
