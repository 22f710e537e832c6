#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "cloudcast/segmentation.hpp"

namespace cloudcast {

/// "lead_minutes,accuracy,n_frames" then one row per lead time, accuracy to 6 decimals.
std::string report_csv(const AccuracyReport& report);

/// Line chart of accuracy (percent) against lead time (minutes); one polyline
/// vertex per report row.
std::string report_svg(const AccuracyReport& report);

void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace cloudcast
