// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include "gsim/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include <png.h>

#include "gsim/errors.hpp"

namespace gsim {

double linear_to_srgb(double v) {
    v = std::clamp(v, 0.0, 1.0);
    return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double srgb_to_linear(double v) {
    v = std::clamp(v, 0.0, 1.0);
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_to_exception(png_structp, png_const_charp msg) {
    throw io_error(std::string("libpng: ") + msg);
}
void png_warning_silencer(png_structp, png_const_charp) {}

std::uint8_t quantize8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v * 255.0), 0l, 255l));
}

void write_png(const std::string& path, int width, int height, int bit_depth,
               int color_type, const std::vector<png_bytep>& rows) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw io_error("cannot open '" + path + "' for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                              png_error_to_exception, png_warning_silencer);
    if (!png) throw io_error("libpng: create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw io_error("libpng: create_info_struct failed");
    }
    try {
        png_init_io(png, fp.get());
        png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
                     PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        png_write_image(png, const_cast<png_bytepp>(rows.data()));
        png_write_end(png, nullptr);
    } catch (...) {
        png_destroy_write_struct(&png, &info);
        throw;
    }
    png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_png_rgb8(const std::string& path, const Image3& image, bool srgb_encode) {
    if (image.empty()) throw validation_error("write_png_rgb8: empty image");
    std::vector<std::uint8_t> bytes(image.pixel_count() * 3);
    for (std::size_t i = 0; i < image.pixel_count() * 3; ++i) {
        const double v = image.data[i];
        bytes[i] = quantize8(srgb_encode ? linear_to_srgb(v) : std::clamp(v, 0.0, 1.0));
    }
    std::vector<png_bytep> rows(image.height);
    for (int y = 0; y < image.height; ++y)
        rows[y] = bytes.data() + static_cast<std::size_t>(y) * image.width * 3;
    write_png(path, image.width, image.height, 8, PNG_COLOR_TYPE_RGB, rows);
}

void write_png_gray8(const std::string& path, const Image1& image) {
    if (image.empty()) throw validation_error("write_png_gray8: empty image");
    std::vector<std::uint8_t> bytes(image.pixel_count());
    for (std::size_t i = 0; i < image.pixel_count(); ++i)
        bytes[i] = quantize8(std::clamp(static_cast<double>(image.data[i]), 0.0, 1.0));
    std::vector<png_bytep> rows(image.height);
    for (int y = 0; y < image.height; ++y)
        rows[y] = bytes.data() + static_cast<std::size_t>(y) * image.width;
    write_png(path, image.width, image.height, 8, PNG_COLOR_TYPE_GRAY, rows);
}

void write_png_gray16(const std::string& path, const Image1& image, double scale) {
    if (image.empty()) throw validation_error("write_png_gray16: empty image");
    std::vector<std::uint8_t> bytes(image.pixel_count() * 2);
    for (std::size_t i = 0; i < image.pixel_count(); ++i) {
        const long v = std::clamp(std::lround(image.data[i] * scale), 0l, 65535l);
        bytes[i * 2] = static_cast<std::uint8_t>(v >> 8);  // PNG is big-endian
        bytes[i * 2 + 1] = static_cast<std::uint8_t>(v & 0xff);
    }
    std::vector<png_bytep> rows(image.height);
    for (int y = 0; y < image.height; ++y)
        rows[y] = bytes.data() + static_cast<std::size_t>(y) * image.width * 2;
    write_png(path, image.width, image.height, 16, PNG_COLOR_TYPE_GRAY, rows);
}

Image3 read_png_rgb(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw io_error("cannot open PNG '" + path + "'");
    png_byte magic[8];
    if (std::fread(magic, 1, 8, fp.get()) != 8 || png_sig_cmp(magic, 0, 8))
        throw format_error("'" + path + "' is not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                             png_error_to_exception, png_warning_silencer);
    if (!png) throw io_error("libpng: create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw io_error("libpng: create_info_struct failed");
    }
    Image3 image;
    try {
        png_init_io(png, fp.get());
        png_set_sig_bytes(png, 8);
        png_read_info(png, info);

        // Normalize anything to 8-bit RGB.
        png_set_expand(png);
        if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
        png_set_strip_alpha(png);
        if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY ||
            png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY_ALPHA)
            png_set_gray_to_rgb(png);
        png_read_update_info(png, info);

        const int width = static_cast<int>(png_get_image_width(png, info));
        const int height = static_cast<int>(png_get_image_height(png, info));
        const std::size_t rowbytes = png_get_rowbytes(png, info);
        if (rowbytes != static_cast<std::size_t>(width) * 3)
            throw format_error("'" + path + "': unexpected row size after conversion");

        std::vector<std::uint8_t> bytes(static_cast<std::size_t>(height) * rowbytes);
        std::vector<png_bytep> rows(height);
        for (int y = 0; y < height; ++y) rows[y] = bytes.data() + y * rowbytes;
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);

        image = Image3(width, height);
        for (std::size_t i = 0; i < image.data.size(); ++i)
            image.data[i] = static_cast<float>(bytes[i] / 255.0);
    } catch (...) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw;
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return image;
}

void write_pfm(const std::string& path, const Image1& image) {
    if (image.empty()) throw validation_error("write_pfm: empty image");
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw io_error("cannot open '" + path + "' for writing");
    std::fprintf(fp.get(), "Pf\n%d %d\n-1.0\n", image.width, image.height);
    // Negative scale marks little-endian; rows are stored bottom-up.
    for (int y = image.height - 1; y >= 0; --y) {
        const float* row = image.px(0, y);
        if (std::fwrite(row, sizeof(float), image.width, fp.get()) !=
            static_cast<std::size_t>(image.width))
            throw io_error("write failed for '" + path + "'");
    }
}

}  // namespace gsim
