#include "cloudcast/prediction.hpp"

#include <string>

#include "cloudcast/error.hpp"
#include "cloudcast/image_ops.hpp"
#include "kernels/kernels.hpp"

namespace cloudcast {

Image warp_image(const Image& img, const FlowField& flow) {
    if (img.width() != flow.width() || img.height() != flow.height()) {
        throw InvalidInput("warp: image is " + std::to_string(img.width()) + "x" +
                           std::to_string(img.height()) + " but flow is " +
                           std::to_string(flow.width()) + "x" + std::to_string(flow.height()));
    }
    Image out(img.width(), img.height(), img.channels());
    const auto& k = detail::active_kernels();
    for (int c = 0; c < img.channels(); ++c) {
        k.warp_plane(img.plane(c).data(), flow.u.data().data(), flow.v.data().data(), -1.0,
                     out.plane(c).data(), img.width(), img.height());
    }
    return out;
}

Prediction predict_next(const Image& frame_prev, const Image& frame_cur,
                        const FlowParams& params) {
    if (frame_prev.channels() != 3 || frame_cur.channels() != 3) {
        throw InvalidInput("prediction needs RGB frames");
    }
    if (!frame_prev.same_shape(frame_cur)) {
        throw InvalidInput("frame sizes differ (" + std::to_string(frame_prev.width()) + "x" +
                           std::to_string(frame_prev.height()) + " vs " +
                           std::to_string(frame_cur.width()) + "x" +
                           std::to_string(frame_cur.height()) + ")");
    }
    FlowField flow = pyramid_flow(ratio_channel(frame_prev), ratio_channel(frame_cur), params);
    Image next = warp_image(frame_cur, flow);
    return {std::move(next), std::move(flow)};
}

Forecast cascade_predict(const Image& frame_prev, const Image& frame_cur, int steps,
                         const FlowParams& params, std::int64_t base_time,
                         double frame_interval_minutes) {
    if (steps < 1) throw InvalidInput("cascade needs at least one step");
    if (!(frame_interval_minutes > 0.0)) throw InvalidInput("frame interval must be > 0");
    Forecast fc;
    fc.base_time = base_time;
    fc.frame_interval = frame_interval_minutes;
    fc.frames.reserve(steps);
    fc.flows.reserve(steps);
    for (int k = 0; k < steps; ++k) {
        const Image& older = (k == 0) ? frame_prev : (k == 1 ? frame_cur : fc.frames[k - 2]);
        const Image& newer = (k == 0) ? frame_cur : fc.frames[k - 1];
        Prediction p = predict_next(older, newer, params);
        fc.frames.push_back(std::move(p.frame));
        fc.flows.push_back(std::move(p.flow));
    }
    return fc;
}

}  // namespace cloudcast
