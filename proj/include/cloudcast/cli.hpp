#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cloudcast/flow.hpp"
#include "cloudcast/segmentation.hpp"
#include "cloudcast/synthetic.hpp"

namespace cloudcast {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitInvalidInput = 2, kExitIoFailure = 3 };

struct RunConfig {
    std::filesystem::path input_dir = ".";
    std::string filename_pattern = "*.png";
    double frame_interval = 2.0;  // minutes
    FlowParams flow;
    int max_lead_steps = 5;
    std::optional<std::filesystem::path> roi_mask;
    std::filesystem::path output_dir = ".";
    SegmentParams segmentation;
    bool write_flows = false;

    void validate() const;
};

/// Applies key=value text on top of `config`. Keys: input_dir, pattern, interval,
/// steps, method (hs|lk|clg), alpha, window_sigma, iterations, pyramid_levels,
/// pyramid_scale, pyramid_min_dim, warps_per_level, lk_threshold, data_scale, roi,
/// out, fallback_threshold, write_flows.
void apply_config_text(RunConfig& config, std::string_view text);

FlowMethod parse_method(std::string_view name);

/// First run of exactly 14 digits in `filename`, read as YYYYMMDDhhmmss UTC.
std::optional<std::int64_t> parse_filename_timestamp(std::string_view filename);
std::string format_timestamp(std::int64_t seconds);

/// Shell-style match supporting '*' and '?'.
bool glob_match(std::string_view pattern, std::string_view name);

struct SourceFrame {
    std::filesystem::path file;
    TimedFrame frame;
};

struct IngestResult {
    std::vector<std::vector<SourceFrame>> runs;  // each run sorted by time
    std::vector<std::string> warnings;            // one per skipped file
};

/// Loads every matching file, orders by timestamp and splits into runs wherever
/// consecutive frames are more than 1.5 intervals apart. Unreadable files and
/// names without a timestamp are skipped with a warning. Throws InvalidInput if
/// nothing matches the pattern.
IngestResult ingest(const std::filesystem::path& dir, const std::string& pattern,
                    double frame_interval_minutes);

/// "<base>_pred+<minutes>min"
std::string prediction_stem(const std::string& base, double lead_minutes);

struct FlowCommandResult {
    FlowField flow;
    VelocityField velocity;
    std::vector<std::filesystem::path> written;
};

FlowCommandResult cmd_flow(const std::filesystem::path& first, const std::filesystem::path& second,
                           const RunConfig& config);

/// Cascades from the last two frames of the most recent run; writes predicted
/// frames and their masks (and flows when requested). Returns the files written.
std::vector<std::filesystem::path> cmd_predict(const RunConfig& config, std::ostream& log);

/// Writes accuracy.csv and accuracy.svg into the output directory.
AccuracyReport cmd_evaluate(const RunConfig& config, std::ostream& log);

/// Writes synth_<timestamp>.png frames plus truth/mask_<timestamp>.png and
/// truth/flow_<timestamp>.nflo (flow from that frame to the next).
std::vector<std::filesystem::path> cmd_synth(const SceneSpec& spec,
                                             const std::filesystem::path& out_dir,
                                             double frame_interval_minutes);

/// Full command-line entry point; never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cloudcast
