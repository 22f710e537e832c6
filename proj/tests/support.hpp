#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <string>

#include <unistd.h>

#include "cloudcast/image.hpp"
#include "cloudcast/synthetic.hpp"

namespace testing_support {

inline cloudcast::ScalarField make_field(int w, int h, const std::function<double(int, int)>& fn) {
    cloudcast::ScalarField f(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) f(x, y) = fn(x, y);
    return f;
}

inline cloudcast::ScalarField random_field(int w, int h, std::uint64_t seed, double lo = -1.0,
                                           double hi = 1.0) {
    cloudcast::Xorshift64Star rng(seed);
    cloudcast::ScalarField f(w, h);
    for (auto& v : f.data()) v = rng.uniform(lo, hi);
    return f;
}

inline double blob(double x, double y, double cx, double cy, double s) {
    const double dx = x - cx, dy = y - cy;
    return std::exp(-(dx * dx + dy * dy) / (2 * s * s));
}

inline double max_abs_diff(const cloudcast::ScalarField& a, const cloudcast::ScalarField& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("cloudcast_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace testing_support
