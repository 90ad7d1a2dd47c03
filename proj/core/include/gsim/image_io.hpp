// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "gsim/image.hpp"

namespace gsim {

// Linear <-> sRGB transfer functions (scalar, [0,1]).
double linear_to_srgb(double v);
double srgb_to_linear(double v);

// 8-bit RGB PNG. With srgb_encode the values pass through linear_to_srgb
// before quantization (used for render output); without it they are written
// as-is (used by the augmentation pipeline).
void write_png_rgb8(const std::string& path, const Image3& image, bool srgb_encode);

// Reads an 8/16-bit gray/RGB/RGBA PNG as RGB floats in [0,1] (no transfer
// function applied).
Image3 read_png_rgb(const std::string& path);

// 8-bit grayscale PNG of values in [0,1] (no transfer function).
void write_png_gray8(const std::string& path, const Image1& image);

// 16-bit grayscale PNG storing round(value * scale) per pixel, clamped to
// [0, 65535]; scale 1000 turns meters into millimeters.
void write_png_gray16(const std::string& path, const Image1& image, double scale);

// Grayscale float PFM ("Pf"), scale -1.0 (little-endian), rows bottom-up.
void write_pfm(const std::string& path, const Image1& image);

}  // namespace gsim
