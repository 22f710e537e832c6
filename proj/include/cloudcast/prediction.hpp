#pragma once

#include <cstdint>
#include <vector>

#include "cloudcast/flow.hpp"
#include "cloudcast/image.hpp"

namespace cloudcast {

/// Backward warp of every channel: out(x, y) = img(x - u(x, y), y - v(x, y)),
/// bilinear with clamped (replicate-border) lookup.
Image warp_image(const Image& img, const FlowField& flow);

struct Prediction {
    Image frame;
    FlowField flow;  // prev -> cur displacement, reused for cur -> next
};

/// Estimates flow on the ratio channels of the two frames and advances
/// `frame_cur` by one frame interval under a constant-velocity assumption.
Prediction predict_next(const Image& frame_prev, const Image& frame_cur, const FlowParams& params);

struct Forecast {
    std::int64_t base_time = 0;     // seconds since the epoch, UTC (time of frame_cur)
    double frame_interval = 2.0;    // minutes
    std::vector<Image> frames;      // frames[k] is at base_time + (k + 1) * interval
    std::vector<FlowField> flows;   // flow used to produce frames[k]
};

/// Step 1 predicts from (prev, cur); step k >= 2 predicts from the two most recent
/// frames, actual or predicted. Flow is re-estimated at every step.
Forecast cascade_predict(const Image& frame_prev, const Image& frame_cur, int steps,
                         const FlowParams& params, std::int64_t base_time = 0,
                         double frame_interval_minutes = 2.0);

}  // namespace cloudcast
