#include "cloudcast/segmentation.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "cloudcast/error.hpp"
#include "cloudcast/image_ops.hpp"
#include "cloudcast/prediction.hpp"

namespace cloudcast {

namespace {

int ratio_bin(double r, int bins) {
    const int b = static_cast<int>(std::floor((r + 1.0) * 0.5 * bins));
    return std::clamp(b, 0, bins - 1);
}

std::string describe_time(std::int64_t t) { return std::to_string(t) + " s"; }

}  // namespace

RatioThreshold ratio_threshold(const ScalarField& ratio, const SegmentParams& params) {
    if (params.bins < 2) throw InvalidInput("segmentation needs at least 2 histogram bins");
    const int bins = params.bins;
    std::vector<double> hist(bins, 0.0);
    for (double r : ratio.data()) hist[ratio_bin(r, bins)] += 1.0;
    const double total = static_cast<double>(ratio.size());

    auto centre = [&](int b) { return -1.0 + (b + 0.5) * 2.0 / bins; };
    double sum_all = 0.0;
    for (int b = 0; b < bins; ++b) sum_all += hist[b] * centre(b);

    // Cut t separates bins [0, t) (cloud) from [t, bins) (sky).
    double best = -1.0;
    int first = -1;
    int last = -1;
    double w0 = 0.0;
    double s0 = 0.0;
    for (int t = 1; t < bins; ++t) {
        w0 += hist[t - 1];
        s0 += hist[t - 1] * centre(t - 1);
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double p0 = w0 / total;
        const double p1 = w1 / total;
        const double d = s0 / w0 - (sum_all - s0) / w1;
        const double var = p0 * p1 * d * d;
        if (var > best) {
            best = var;
            first = last = t;
        } else if (var == best && last == t - 1) {
            last = t;
        }
    }

    RatioThreshold out;
    out.between_class_variance = std::max(best, 0.0);
    if (first < 0 || best < params.unimodal_tolerance) {
        out.unimodal = true;
        out.value = params.fallback_threshold;
        return out;
    }
    const int cut = (first + last) / 2;
    out.value = -1.0 + 2.0 * cut / bins;
    return out;
}

BinaryMask segment_ratio(const ScalarField& ratio, const SegmentParams& params) {
    const RatioThreshold th = ratio_threshold(ratio, params);
    BinaryMask mask(ratio.width(), ratio.height());
    auto bits = mask.bits();
    if (th.unimodal) {
        const double mean =
            std::accumulate(ratio.data().begin(), ratio.data().end(), 0.0) / ratio.size();
        std::fill(bits.begin(), bits.end(), mean >= params.fallback_threshold ? 1 : 0);
        return mask;
    }
    // Classify by histogram bin so that labels agree exactly with the histogram split.
    const int cut = static_cast<int>(std::lround((th.value + 1.0) * 0.5 * params.bins));
    for (std::size_t i = 0; i < bits.size(); ++i) {
        bits[i] = ratio_bin(ratio.data()[i], params.bins) >= cut ? 1 : 0;
    }
    return mask;
}

BinaryMask segment(const Image& img, const SegmentParams& params) {
    if (img.channels() != 3) {
        throw InvalidInput("segmentation needs an RGB image, got " +
                           std::to_string(img.channels()) + " channel(s)");
    }
    return segment_ratio(ratio_channel(img), params);
}

double accuracy(const BinaryMask& predicted, const BinaryMask& actual, const BinaryMask* roi) {
    if (!predicted.same_shape(actual)) {
        throw InvalidInput("accuracy: mask sizes differ (" + std::to_string(predicted.width()) +
                           "x" + std::to_string(predicted.height()) + " vs " +
                           std::to_string(actual.width()) + "x" +
                           std::to_string(actual.height()) + ")");
    }
    if (roi && !roi->same_shape(actual)) throw InvalidInput("accuracy: ROI size differs");
    std::size_t agree = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (roi && !roi->bits()[i]) continue;
        ++n;
        if (predicted.bits()[i] == actual.bits()[i]) ++agree;
    }
    if (n == 0) throw InvalidInput("accuracy: empty region of interest");
    return static_cast<double>(agree) / static_cast<double>(n);
}

AccuracyReport evaluate_sequence(std::span<const TimedFrame> frames, int max_lead_steps,
                                 const FlowParams& params, const EvaluateOptions& options) {
    if (max_lead_steps < 1) throw InvalidInput("max_lead_steps must be >= 1");
    const std::size_t needed = static_cast<std::size_t>(max_lead_steps) + 2;
    if (frames.size() < needed) {
        throw InvalidInput("evaluation with " + std::to_string(max_lead_steps) +
                           " lead steps needs at least " + std::to_string(needed) +
                           " frames, got " + std::to_string(frames.size()));
    }
    params.validate();

    const double nominal =
        options.frame_interval_minutes > 0.0
            ? options.frame_interval_minutes * 60.0
            : static_cast<double>(frames.back().timestamp - frames.front().timestamp) /
                  static_cast<double>(frames.size() - 1);
    if (!(nominal > 0.0)) throw InvalidInput("frame timestamps must increase");
    for (std::size_t i = 1; i < frames.size(); ++i) {
        const double gap = static_cast<double>(frames[i].timestamp - frames[i - 1].timestamp);
        if (std::abs(gap - nominal) > 0.1 * nominal) {
            throw InvalidInput("irregular frame spacing between frame " + std::to_string(i - 1) +
                               " (" + describe_time(frames[i - 1].timestamp) + ") and frame " +
                               std::to_string(i) + " (" + describe_time(frames[i].timestamp) +
                               "): " + std::to_string(gap) + " s apart, expected " +
                               std::to_string(nominal) + " s +/-10%");
        }
    }

    std::vector<BinaryMask> actual;
    actual.reserve(frames.size());
    for (const auto& f : frames) actual.push_back(segment(f.image, options.segmentation));

    const double interval_minutes = nominal / 60.0;
    std::vector<double> sums(max_lead_steps, 0.0);
    int anchors = 0;
    for (std::size_t i = 1; i + max_lead_steps < frames.size(); ++i) {
        const Forecast fc = cascade_predict(frames[i - 1].image, frames[i].image, max_lead_steps,
                                            params, frames[i].timestamp, interval_minutes);
        for (int k = 0; k < max_lead_steps; ++k) {
            const BinaryMask predicted = segment(fc.frames[k], options.segmentation);
            sums[k] += accuracy(predicted, actual[i + k + 1], options.roi);
        }
        ++anchors;
    }

    AccuracyReport report;
    for (int k = 0; k < max_lead_steps; ++k) {
        report.rows.push_back({(k + 1) * interval_minutes, sums[k] / anchors, anchors});
    }
    return report;
}

AccuracyReport merge_reports(std::span<const AccuracyReport> reports) {
    if (reports.empty()) throw InvalidInput("no reports to merge");
    AccuracyReport out = reports.front();
    for (auto& row : out.rows) row.accuracy *= row.n_frames;
    for (std::size_t r = 1; r < reports.size(); ++r) {
        if (reports[r].rows.size() != out.rows.size()) {
            throw InvalidInput("cannot merge reports with different lead times");
        }
        for (std::size_t k = 0; k < out.rows.size(); ++k) {
            const auto& row = reports[r].rows[k];
            if (std::abs(row.lead_minutes - out.rows[k].lead_minutes) > 1e-9) {
                throw InvalidInput("cannot merge reports with different lead times");
            }
            out.rows[k].accuracy += row.accuracy * row.n_frames;
            out.rows[k].n_frames += row.n_frames;
        }
    }
    for (auto& row : out.rows) row.accuracy /= row.n_frames;
    return out;
}

}  // namespace cloudcast
