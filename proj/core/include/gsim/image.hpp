// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cassert>
#include <vector>

namespace gsim {

// Row-major float image, C interleaved channels per pixel.
template <int C>
struct Image {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    Image() = default;
    Image(int w, int h, float fill = 0.0f)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h * C, fill) {}

    float* px(int x, int y) { return data.data() + (static_cast<std::size_t>(y) * width + x) * C; }
    const float* px(int x, int y) const {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * C;
    }
    float& at(int x, int y, int c = 0) { return px(x, y)[c]; }
    float at(int x, int y, int c = 0) const { return px(x, y)[c]; }

    bool empty() const { return data.empty(); }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

using Image1 = Image<1>;
using Image3 = Image<3>;

// RGB + alpha-composited depth + accumulated alpha for one camera frame.
// depth is meters, 0 where nothing rendered.
struct RenderTarget {
    Image3 rgb;
    Image1 depth;
    Image1 accum_alpha;

    RenderTarget() = default;
    RenderTarget(int w, int h) : rgb(w, h), depth(w, h), accum_alpha(w, h) {}
};

}  // namespace gsim
