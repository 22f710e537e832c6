#include "cloudcast/flow_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "cloudcast/error.hpp"
#include "cloudcast/image_io.hpp"

namespace cloudcast {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'N', 'F', 'L', 'O'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
    return v;
}

// Piecewise-linear blue -> cyan -> yellow -> red.
void colour_map(double t, std::uint8_t rgb[3]) {
    static constexpr double stops[4][3] = {
        {0.0, 0.0, 0.6}, {0.0, 0.8, 1.0}, {1.0, 0.9, 0.0}, {0.8, 0.0, 0.0}};
    t = std::clamp(t, 0.0, 1.0) * 3.0;
    const int i = std::min(static_cast<int>(t), 2);
    const double f = t - i;
    for (int c = 0; c < 3; ++c) {
        rgb[c] = quantize8(stops[i][c] + f * (stops[i + 1][c] - stops[i][c]));
    }
}

void write_map(const fs::path& path, const ScalarField& f, const ComponentRange& r) {
    std::vector<std::uint8_t> rgb(f.size() * 3);
    const double span = r.max - r.min;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double t = span > 0.0 ? (f.data()[i] - r.min) / span : 0.5;
        colour_map(t, &rgb[3 * i]);
    }
    write_png_rgb8(path, f.width(), f.height(), rgb);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

std::vector<std::uint8_t> encode_nflo(const FlowField& flow) {
    std::vector<std::uint8_t> out;
    out.reserve(12 + flow.u.size() * 8);
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, static_cast<std::uint32_t>(flow.width()));
    put_u32(out, static_cast<std::uint32_t>(flow.height()));
    for (const ScalarField* c : {&flow.u, &flow.v}) {
        for (double s : c->data()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(s)));
    }
    return out;
}

FlowField decode_nflo(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 12 || !std::equal(kMagic, kMagic + 4, bytes.begin())) {
        throw IoError("not an NFLO stream");
    }
    const std::uint32_t w = get_u32(bytes, 4);
    const std::uint32_t h = get_u32(bytes, 8);
    if (w < 2 || h < 2 || w > (1u << 15) || h > (1u << 15)) {
        throw IoError("NFLO stream has invalid dimensions " + std::to_string(w) + "x" +
                      std::to_string(h));
    }
    const std::size_t n = static_cast<std::size_t>(w) * h;
    if (bytes.size() != 12 + n * 8) {
        throw IoError("NFLO stream length " + std::to_string(bytes.size()) + " does not match " +
                      std::to_string(w) + "x" + std::to_string(h));
    }
    std::vector<double> u(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = std::bit_cast<float>(get_u32(bytes, 12 + 4 * i));
        v[i] = std::bit_cast<float>(get_u32(bytes, 12 + 4 * (n + i)));
    }
    try {
        return FlowField(ScalarField(static_cast<int>(w), static_cast<int>(h), std::move(u)),
                         ScalarField(static_cast<int>(w), static_cast<int>(h), std::move(v)));
    } catch (const InvalidInput& e) {
        throw IoError(std::string("NFLO stream: ") + e.what());
    }
}

void write_nflo(const fs::path& path, const FlowField& flow) {
    const auto bytes = encode_nflo(flow);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("cannot write " + path.string());
}

FlowField read_nflo(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                          std::istreambuf_iterator<char>()};
    return decode_nflo(bytes);
}

ComponentRange component_range(const ScalarField& f) {
    std::vector<double> s(f.data().begin(), f.data().end());
    ComponentRange r;
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    r.min = *lo;
    r.max = *hi;
    const std::size_t mid = s.size() / 2;
    std::nth_element(s.begin(), s.begin() + mid, s.end());
    r.median = s[mid];
    if (s.size() % 2 == 0) {
        r.median = 0.5 * (r.median + *std::max_element(s.begin(), s.begin() + mid));
    }
    return r;
}

void write_velocity_maps(const fs::path& prefix, const VelocityField& velocity) {
    const ComponentRange ru = component_range(velocity.u);
    const ComponentRange rv = component_range(velocity.v);
    write_map(prefix.string() + "_u.png", velocity.u, ru);
    write_map(prefix.string() + "_v.png", velocity.v, rv);

    const fs::path sidecar = prefix.string() + "_velocity.txt";
    std::ofstream out(sidecar, std::ios::binary);
    if (!out) throw IoError("cannot write " + sidecar.string());
    out << "# colour map: blue (min) -> cyan -> yellow -> red (max), linear\n"
        << "unit = px/min\n"
        << "u_min = " << fmt(ru.min) << "\nu_max = " << fmt(ru.max)
        << "\nu_median = " << fmt(ru.median) << "\n"
        << "v_min = " << fmt(rv.min) << "\nv_max = " << fmt(rv.max)
        << "\nv_median = " << fmt(rv.median) << "\n";
    if (!out) throw IoError("cannot write " + sidecar.string());
}

}  // namespace cloudcast
