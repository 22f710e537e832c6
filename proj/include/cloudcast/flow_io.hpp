#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cloudcast/flow.hpp"

namespace cloudcast {

/// NFLO layout: "NFLO", u32 width, u32 height (little endian), then width*height
/// little-endian f32 u samples followed by the v samples, both row-major.
std::vector<std::uint8_t> encode_nflo(const FlowField& flow);
FlowField decode_nflo(std::span<const std::uint8_t> bytes);

void write_nflo(const std::filesystem::path& path, const FlowField& flow);
FlowField read_nflo(const std::filesystem::path& path);

struct ComponentRange {
    double min = 0.0;
    double max = 0.0;
    double median = 0.0;
};

ComponentRange component_range(const ScalarField& f);

/// Writes <prefix>_u.png and <prefix>_v.png (linear blue-cyan-yellow-red colour
/// map spanning each component's own min..max) and <prefix>_velocity.txt with
/// the ranges as key=value lines.
void write_velocity_maps(const std::filesystem::path& prefix, const VelocityField& velocity);

}  // namespace cloudcast
