#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cloudcast/flow.hpp"
#include "cloudcast/image.hpp"
#include "cloudcast/mask.hpp"

namespace cloudcast {

struct SegmentParams {
    int bins = 256;  // histogram over [-1, 1]
    /// Below this maximal between-class variance the histogram counts as unimodal.
    double unimodal_tolerance = 1e-6;
    /// Unimodal frames are all sky when their mean ratio is >= this value, else all cloud.
    double fallback_threshold = 0.25;
};

struct RatioThreshold {
    double value = 0.0;  // pixels with ratio >= value are sky
    double between_class_variance = 0.0;
    bool unimodal = false;
};

/// Between-class-variance (Otsu) threshold of the ratio histogram. When several
/// cut points share the maximal variance (empty bins between two modes), the
/// middle of the first such run is used.
RatioThreshold ratio_threshold(const ScalarField& ratio, const SegmentParams& params = {});

/// Sky/cloud mask of an RGB frame; sky = set. Low ratio (whiter, redder) is cloud.
BinaryMask segment(const Image& img, const SegmentParams& params = {});
BinaryMask segment_ratio(const ScalarField& ratio, const SegmentParams& params = {});

/// Fraction of pixels (within `roi`, if given) whose labels agree.
double accuracy(const BinaryMask& predicted, const BinaryMask& actual,
                const BinaryMask* roi = nullptr);

struct AccuracyRow {
    double lead_minutes = 0.0;
    double accuracy = 0.0;
    int n_frames = 0;  // anchors averaged into this row
};

struct AccuracyReport {
    std::vector<AccuracyRow> rows;  // strictly increasing lead time
    std::string method = "ratio-otsu";
};

struct TimedFrame {
    std::int64_t timestamp = 0;  // seconds since the epoch, UTC
    Image image;
};

struct EvaluateOptions {
    SegmentParams segmentation;
    const BinaryMask* roi = nullptr;
    /// Nominal spacing; 0 infers it from the first and last timestamps.
    double frame_interval_minutes = 0.0;
};

/// For every anchor i with a predecessor and max_lead_steps actual successors,
/// cascades predictions from (frames[i-1], frames[i]) and scores step k against
/// the segmented frames[i+k]. Accuracies are averaged uniformly over anchors.
AccuracyReport evaluate_sequence(std::span<const TimedFrame> frames, int max_lead_steps,
                                 const FlowParams& params, const EvaluateOptions& options = {});

/// Anchor-weighted combination of reports with identical lead times, in argument order.
AccuracyReport merge_reports(std::span<const AccuracyReport> reports);

}  // namespace cloudcast
