#include "cloudcast/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "cloudcast/config.hpp"
#include "cloudcast/error.hpp"
#include "cloudcast/flow_io.hpp"
#include "cloudcast/image_io.hpp"
#include "cloudcast/image_ops.hpp"
#include "cloudcast/prediction.hpp"
#include "cloudcast/report.hpp"
#include "cloudcast/simd.hpp"

namespace cloudcast {

namespace fs = std::filesystem;

namespace {

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    throw InvalidInput("'" + key + "' expects true/false, got '" + value + "'");
}

std::string format_minutes(double minutes) {
    char buf[32];
    if (std::abs(minutes - std::round(minutes)) < 1e-9) {
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(std::llround(minutes)));
    } else {
        std::snprintf(buf, sizeof buf, "%g", minutes);
    }
    return buf;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

std::vector<TimedFrame> timed_frames(std::vector<SourceFrame>& run) {
    std::vector<TimedFrame> out;
    out.reserve(run.size());
    for (auto& f : run) out.push_back(std::move(f.frame));
    return out;
}

constexpr std::int64_t kSynthBaseTime = 1577836800;  // 2020-01-01 00:00:00 UTC

}  // namespace

void RunConfig::validate() const {
    if (!(frame_interval > 0.0) || !std::isfinite(frame_interval)) {
        throw InvalidInput("frame interval must be > 0 minutes");
    }
    if (max_lead_steps < 1) throw InvalidInput("steps must be >= 1");
    flow.validate();
}

FlowMethod parse_method(std::string_view name) {
    if (name == "hs" || name == "horn_schunck") return FlowMethod::horn_schunck;
    if (name == "lk" || name == "lucas_kanade") return FlowMethod::lucas_kanade;
    if (name == "clg") return FlowMethod::clg;
    throw InvalidInput("unknown flow method '" + std::string(name) + "' (expected hs, lk or clg)");
}

void apply_config_text(RunConfig& c, std::string_view text) {
    for (const auto& [key, value] : parse_key_values(text)) {
        if (key == "input_dir") c.input_dir = value;
        else if (key == "pattern") c.filename_pattern = value;
        else if (key == "interval") c.frame_interval = parse_double(key, value);
        else if (key == "steps") c.max_lead_steps = static_cast<int>(parse_integer(key, value));
        else if (key == "method") c.flow.method = parse_method(value);
        else if (key == "alpha") c.flow.alpha = parse_double(key, value);
        else if (key == "window_sigma") c.flow.window_sigma = parse_double(key, value);
        else if (key == "iterations") c.flow.iterations = static_cast<int>(parse_integer(key, value));
        else if (key == "pyramid_levels") c.flow.pyramid_levels = static_cast<int>(parse_integer(key, value));
        else if (key == "pyramid_scale") c.flow.pyramid_scale = parse_double(key, value);
        else if (key == "pyramid_min_dim") c.flow.pyramid_min_dim = static_cast<int>(parse_integer(key, value));
        else if (key == "warps_per_level") c.flow.warps_per_level = static_cast<int>(parse_integer(key, value));
        else if (key == "lk_threshold") c.flow.lk_threshold = parse_double(key, value);
        else if (key == "data_scale") c.flow.data_scale = parse_double(key, value);
        else if (key == "roi") c.roi_mask = value.empty() ? std::nullopt : std::optional<fs::path>(value);
        else if (key == "out") c.output_dir = value;
        else if (key == "fallback_threshold") c.segmentation.fallback_threshold = parse_double(key, value);
        else if (key == "write_flows") c.write_flows = parse_bool(key, value);
        else throw InvalidInput("unknown config key '" + key + "'");
    }
}

std::optional<std::int64_t> parse_filename_timestamp(std::string_view name) {
    using namespace std::chrono;
    for (std::size_t i = 0; i < name.size();) {
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < name.size() && std::isdigit(static_cast<unsigned char>(name[j]))) ++j;
        if (j - i == 14) {
            auto field = [&](std::size_t at, std::size_t len) {
                int v = 0;
                for (std::size_t k = at; k < at + len; ++k) v = v * 10 + (name[k] - '0');
                return v;
            };
            const year_month_day ymd{year{field(i, 4)}, month{static_cast<unsigned>(field(i + 4, 2))},
                                     day{static_cast<unsigned>(field(i + 6, 2))}};
            const int hh = field(i + 8, 2);
            const int mm = field(i + 10, 2);
            const int ss = field(i + 12, 2);
            if (!ymd.ok() || hh > 23 || mm > 59 || ss > 59) return std::nullopt;
            const auto t = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
            return duration_cast<seconds>(t.time_since_epoch()).count();
        }
        i = j;
    }
    return std::nullopt;
}

std::string format_timestamp(std::int64_t t) {
    using namespace std::chrono;
    const sys_seconds tp{seconds{t}};
    const auto dp = floor<days>(tp);
    const year_month_day ymd{dp};
    const hh_mm_ss hms{tp - dp};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d%02u%02u%02lld%02lld%02lld", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long long>(hms.hours().count()),
                  static_cast<long long>(hms.minutes().count()),
                  static_cast<long long>(hms.seconds().count()));
    return buf;
}

bool glob_match(std::string_view pattern, std::string_view name) {
    std::size_t p = 0, n = 0, star = std::string_view::npos, mark = 0;
    while (n < name.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
            ++p;
            ++n;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = n;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            n = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

IngestResult ingest(const fs::path& dir, const std::string& pattern, double frame_interval_minutes) {
    if (!(frame_interval_minutes > 0.0)) throw InvalidInput("frame interval must be > 0");
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError("cannot read directory " + dir.string());

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && glob_match(pattern, entry.path().filename().string())) {
            files.push_back(entry.path());
        }
    }
    if (ec) throw IoError("cannot read directory " + dir.string() + ": " + ec.message());
    if (files.empty()) {
        throw InvalidInput("no files matching '" + pattern + "' in " + dir.string());
    }
    std::sort(files.begin(), files.end());

    IngestResult result;
    std::vector<SourceFrame> frames;
    for (const auto& file : files) {
        const auto ts = parse_filename_timestamp(file.filename().string());
        if (!ts) {
            result.warnings.push_back("skipping " + file.string() +
                                      ": no YYYYMMDDhhmmss timestamp in the name");
            continue;
        }
        try {
            frames.push_back({file, {*ts, read_image(file)}});
        } catch (const IoError& e) {
            result.warnings.push_back("skipping " + file.string() + ": " + e.what());
        }
    }
    std::stable_sort(frames.begin(), frames.end(), [](const SourceFrame& a, const SourceFrame& b) {
        return a.frame.timestamp < b.frame.timestamp;
    });

    const double max_gap = 1.5 * frame_interval_minutes * 60.0;
    for (auto& f : frames) {
        if (!result.runs.empty()) {
            const auto& last = result.runs.back().back();
            if (f.frame.timestamp == last.frame.timestamp) {
                result.warnings.push_back("skipping " + f.file.string() +
                                          ": duplicate timestamp of " + last.file.string());
                continue;
            }
            if (static_cast<double>(f.frame.timestamp - last.frame.timestamp) <= max_gap) {
                result.runs.back().push_back(std::move(f));
                continue;
            }
        }
        result.runs.emplace_back();
        result.runs.back().push_back(std::move(f));
    }
    return result;
}

std::string prediction_stem(const std::string& base, double lead_minutes) {
    return base + "_pred+" + format_minutes(lead_minutes) + "min";
}

FlowCommandResult cmd_flow(const fs::path& first, const fs::path& second, const RunConfig& config) {
    config.validate();
    const Image a = read_image(first);
    const Image b = read_image(second);
    if (a.width() != b.width() || a.height() != b.height()) {
        throw InvalidInput("frame sizes differ: " + first.string() + " is " +
                           std::to_string(a.width()) + "x" + std::to_string(a.height()) + ", " +
                           second.string() + " is " + std::to_string(b.width()) + "x" +
                           std::to_string(b.height()));
    }
    FlowCommandResult r;
    r.flow = pyramid_flow(ratio_channel(a), ratio_channel(b), config.flow);
    r.velocity = to_velocity(r.flow, config.frame_interval);

    ensure_dir(config.output_dir);
    const fs::path prefix = config.output_dir / second.stem();
    const fs::path nflo = prefix.string() + "_flow.nflo";
    write_nflo(nflo, r.flow);
    write_velocity_maps(prefix, r.velocity);
    r.written = {nflo, prefix.string() + "_u.png", prefix.string() + "_v.png",
                 prefix.string() + "_velocity.txt"};
    return r;
}

std::vector<fs::path> cmd_predict(const RunConfig& config, std::ostream& log) {
    config.validate();
    IngestResult in = ingest(config.input_dir, config.filename_pattern, config.frame_interval);
    for (const auto& w : in.warnings) log << "warning: " << w << '\n';
    if (in.runs.empty() || in.runs.back().size() < 2) {
        throw InvalidInput("prediction needs at least 2 consecutive frames, found " +
                           std::to_string(in.runs.empty() ? 0 : in.runs.back().size()));
    }
    const auto& run = in.runs.back();
    const SourceFrame& prev = run[run.size() - 2];
    const SourceFrame& cur = run.back();
    const Forecast fc = cascade_predict(prev.frame.image, cur.frame.image, config.max_lead_steps,
                                        config.flow, cur.frame.timestamp, config.frame_interval);

    ensure_dir(config.output_dir);
    const std::string base = cur.file.stem().string();
    std::vector<fs::path> written;
    for (std::size_t k = 0; k < fc.frames.size(); ++k) {
        const std::string stem = prediction_stem(base, (k + 1) * config.frame_interval);
        const fs::path frame_path = config.output_dir / (stem + ".png");
        const fs::path mask_path = config.output_dir / (stem + "_mask.png");
        write_png(frame_path, fc.frames[k]);
        write_mask_png(mask_path, segment(fc.frames[k], config.segmentation));
        written.push_back(frame_path);
        written.push_back(mask_path);
        if (config.write_flows) {
            const fs::path flow_path = config.output_dir / (stem + ".nflo");
            write_nflo(flow_path, fc.flows[k]);
            written.push_back(flow_path);
        }
    }
    return written;
}

AccuracyReport cmd_evaluate(const RunConfig& config, std::ostream& log) {
    config.validate();
    IngestResult in = ingest(config.input_dir, config.filename_pattern, config.frame_interval);
    for (const auto& w : in.warnings) log << "warning: " << w << '\n';

    std::optional<BinaryMask> roi;
    if (config.roi_mask) roi = read_mask(*config.roi_mask);

    EvaluateOptions options;
    options.segmentation = config.segmentation;
    options.roi = roi ? &*roi : nullptr;
    options.frame_interval_minutes = config.frame_interval;

    const std::size_t needed = static_cast<std::size_t>(config.max_lead_steps) + 2;
    std::vector<AccuracyReport> reports;
    for (auto& run : in.runs) {
        if (run.size() < needed) {
            log << "warning: skipping run of " << run.size() << " frame(s) starting at "
                << run.front().file.string() << ": fewer than " << needed << '\n';
            continue;
        }
        const std::vector<TimedFrame> frames = timed_frames(run);
        reports.push_back(evaluate_sequence(frames, config.max_lead_steps, config.flow, options));
    }
    if (reports.empty()) {
        throw InvalidInput("evaluation with " + std::to_string(config.max_lead_steps) +
                           " lead steps needs at least " + std::to_string(needed) +
                           " consecutive frames");
    }
    const AccuracyReport report = merge_reports(reports);
    ensure_dir(config.output_dir);
    write_text_file(config.output_dir / "accuracy.csv", report_csv(report));
    write_text_file(config.output_dir / "accuracy.svg", report_svg(report));
    return report;
}

std::vector<fs::path> cmd_synth(const SceneSpec& spec, const fs::path& out_dir,
                                double frame_interval_minutes) {
    if (!(frame_interval_minutes > 0.0)) throw InvalidInput("frame interval must be > 0");
    const SyntheticSequence seq = generate(spec);
    const fs::path truth = out_dir / "truth";
    ensure_dir(truth);
    std::vector<fs::path> written;
    for (std::size_t k = 0; k < seq.frames.size(); ++k) {
        const auto t = kSynthBaseTime +
                       static_cast<std::int64_t>(std::llround(k * frame_interval_minutes * 60.0));
        const std::string ts = format_timestamp(t);
        const fs::path frame = out_dir / ("synth_" + ts + ".png");
        const fs::path mask = truth / ("mask_" + ts + ".png");
        write_png(frame, seq.frames[k]);
        write_mask_png(mask, seq.true_masks[k]);
        written.push_back(frame);
        written.push_back(mask);
        if (k < seq.true_flow.size()) {
            const fs::path flow = truth / ("flow_" + ts + ".nflo");
            write_nflo(flow, seq.true_flow[k]);
            written.push_back(flow);
        }
    }
    return written;
}

namespace {

// Flags shared by flow, predict and evaluate. Values are applied only when given,
// on top of defaults and the --config file.
struct RunFlags {
    std::string config, out, method, roi, pattern, simd;
    double interval = 0, alpha = 0, window_sigma = 0, pyramid_scale = 0;
    int steps = 0, iterations = 0, levels = 0, warps = 0;
    bool write_flows = false;
    std::map<std::string, CLI::Option*> opts;

    void attach(CLI::App* sub) {
        opts["config"] = sub->add_option("--config", config, "key=value configuration file");
        opts["out"] = sub->add_option("--out", out, "Output directory");
        opts["interval"] = sub->add_option("--interval", interval, "Frame interval in minutes");
        opts["steps"] = sub->add_option("--steps", steps, "Number of lead steps");
        opts["method"] = sub->add_option("--method", method, "Flow solver")
                             ->check(CLI::IsMember({"hs", "lk", "clg"}));
        opts["alpha"] = sub->add_option("--alpha", alpha, "Smoothness weight");
        opts["window_sigma"] =
            sub->add_option("--window-sigma", window_sigma, "Structure tensor integration scale");
        opts["iterations"] = sub->add_option("--iterations", iterations, "Jacobi sweeps per warp");
        opts["levels"] = sub->add_option("--pyramid-levels", levels, "Maximum pyramid levels (0 = auto)");
        opts["pyramid_scale"] = sub->add_option("--pyramid-scale", pyramid_scale, "Pyramid scale factor");
        opts["warps"] = sub->add_option("--warps", warps, "Warps per pyramid level");
        opts["roi"] = sub->add_option("--roi", roi, "Region-of-interest mask PNG (white = scored)");
        opts["pattern"] = sub->add_option("--pattern", pattern, "Filename glob (default *.png)");
        opts["write_flows"] = sub->add_flag("--write-flows", write_flows, "Also write NFLO flows");
        opts["simd"] = sub->add_option("--simd", simd, "Kernel backend")
                           ->check(CLI::IsMember({"scalar", "avx2"}));
    }

    bool given(const char* name) const { return opts.at(name)->count() > 0; }

    RunConfig build() const {
        RunConfig c;
        if (given("config")) apply_config_text(c, read_text_file(config));
        if (given("out")) c.output_dir = out;
        if (given("interval")) c.frame_interval = interval;
        if (given("steps")) c.max_lead_steps = steps;
        if (given("method")) c.flow.method = parse_method(method);
        if (given("alpha")) c.flow.alpha = alpha;
        if (given("window_sigma")) c.flow.window_sigma = window_sigma;
        if (given("iterations")) c.flow.iterations = iterations;
        if (given("levels")) c.flow.pyramid_levels = levels;
        if (given("pyramid_scale")) c.flow.pyramid_scale = pyramid_scale;
        if (given("warps")) c.flow.warps_per_level = warps;
        if (given("roi")) c.roi_mask = roi;
        if (given("pattern")) c.filename_pattern = pattern;
        if (given("write_flows")) c.write_flows = write_flows;
        if (given("simd")) set_backend(simd == "avx2" ? SimdBackend::avx2 : SimdBackend::scalar);
        c.validate();
        return c;
    }
};

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Short-term cloud motion prediction from sky-camera image sequences", "cloudcast"};
    app.require_subcommand(1);

    auto* flow_cmd = app.add_subcommand("flow", "Estimate flow between two frames");
    RunFlags flow_flags;
    flow_flags.attach(flow_cmd);
    std::vector<std::string> flow_inputs;
    flow_cmd->add_option("frames", flow_inputs, "Earlier and later frame")->required()->expected(2);

    auto* predict_cmd = app.add_subcommand("predict", "Extrapolate future frames from a sequence");
    RunFlags predict_flags;
    predict_flags.attach(predict_cmd);
    std::string predict_dir;
    predict_cmd->add_option("input_dir", predict_dir, "Directory of timestamped frames");

    auto* eval_cmd = app.add_subcommand("evaluate", "Score cascaded predictions against later frames");
    RunFlags eval_flags;
    eval_flags.attach(eval_cmd);
    std::string eval_dir;
    eval_cmd->add_option("input_dir", eval_dir, "Directory of timestamped frames");

    auto* synth_cmd = app.add_subcommand("synth", "Render a synthetic cloud sequence with ground truth");
    std::string synth_config, synth_out = ".";
    double synth_interval = 2.0;
    SceneSpec scene;
    std::map<std::string, CLI::Option*> so;
    so["config"] = synth_cmd->add_option("--config", synth_config, "SceneSpec key=value file");
    synth_cmd->add_option("--out", synth_out, "Output directory");
    synth_cmd->add_option("--interval", synth_interval, "Frame interval in minutes");
    so["width"] = synth_cmd->add_option("--width", scene.width);
    so["height"] = synth_cmd->add_option("--height", scene.height);
    so["frames"] = synth_cmd->add_option("--frames", scene.n_frames);
    so["vx"] = synth_cmd->add_option("--vx", scene.velocity_x, "Velocity, px/frame");
    so["vy"] = synth_cmd->add_option("--vy", scene.velocity_y, "Velocity, px/frame");
    so["deformation"] = synth_cmd->add_option("--deformation", scene.deformation_rate);
    so["blobs"] = synth_cmd->add_option("--blobs", scene.n_blobs);
    so["blob_scale"] = synth_cmd->add_option("--blob-scale", scene.blob_scale);
    so["noise"] = synth_cmd->add_option("--noise", scene.noise_sigma);
    so["seed"] = synth_cmd->add_option("--seed", scene.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalidInput;
    }

    try {
        if (flow_cmd->parsed()) {
            const RunConfig config = flow_flags.build();
            const auto r = cmd_flow(flow_inputs[0], flow_inputs[1], config);
            const auto ru = component_range(r.velocity.u);
            const auto rv = component_range(r.velocity.v);
            out << "median velocity: u = " << fixed(ru.median, 4) << " px/min, v = "
                << fixed(rv.median, 4) << " px/min\n";
            for (const auto& p : r.written) out << "wrote " << p.string() << '\n';
        } else if (predict_cmd->parsed()) {
            RunConfig config = predict_flags.build();
            if (!predict_dir.empty()) config.input_dir = predict_dir;
            for (const auto& p : cmd_predict(config, err)) out << "wrote " << p.string() << '\n';
        } else if (eval_cmd->parsed()) {
            RunConfig config = eval_flags.build();
            if (!eval_dir.empty()) config.input_dir = eval_dir;
            const AccuracyReport report = cmd_evaluate(config, err);
            out << report_csv(report);
        } else if (synth_cmd->parsed()) {
            SceneSpec spec;
            if (so["config"]->count()) spec = parse_scene_spec(read_text_file(synth_config));
            // Flags override the file.
            if (so["width"]->count()) spec.width = scene.width;
            if (so["height"]->count()) spec.height = scene.height;
            if (so["frames"]->count()) spec.n_frames = scene.n_frames;
            if (so["vx"]->count()) spec.velocity_x = scene.velocity_x;
            if (so["vy"]->count()) spec.velocity_y = scene.velocity_y;
            if (so["deformation"]->count()) spec.deformation_rate = scene.deformation_rate;
            if (so["blobs"]->count()) spec.n_blobs = scene.n_blobs;
            if (so["blob_scale"]->count()) spec.blob_scale = scene.blob_scale;
            if (so["noise"]->count()) spec.noise_sigma = scene.noise_sigma;
            if (so["seed"]->count()) spec.seed = scene.seed;
            const auto written = cmd_synth(spec, synth_out, synth_interval);
            out << "wrote " << written.size() << " files to " << synth_out << '\n';
        }
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidInput;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIoFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitIoFailure;
    }
    return kExitOk;
}

}  // namespace cloudcast
