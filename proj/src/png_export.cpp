/*
 * Copyright 2026 The echokit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "echokit/echogram.hpp"
#include "echokit/error.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>

namespace echokit {

namespace {

// Hue runs from blue (lateral 0) to red (lateral 1); value follows intensity.
void hsv_to_rgb(double hue, double value, std::uint8_t* rgb) {
    const double c = value;
    const double h = hue / 60.0;
    const double x = c * (1.0 - std::fabs(std::fmod(h, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (h < 1) { r = c; g = x; }
    else if (h < 2) { r = x; g = c; }
    else if (h < 3) { g = c; b = x; }
    else if (h < 4) { g = x; b = c; }
    else if (h < 5) { r = x; b = c; }
    else { r = c; b = x; }
    rgb[0] = static_cast<std::uint8_t>(std::lround(r * 255));
    rgb[1] = static_cast<std::uint8_t>(std::lround(g * 255));
    rgb[2] = static_cast<std::uint8_t>(std::lround(b * 255));
}

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};

} // namespace

void export_png(const Echogram& echogram, const std::filesystem::path& path) {
    echogram.validate();
    if (echogram.width == 0 || echogram.height == 0)
        fail(ErrorCode::Argument, "cannot render an empty echogram");

    // Row 0 (nearest range) is drawn at the bottom, like a sonar display.
    std::vector<std::uint8_t> rgb(std::size_t(echogram.width) * echogram.height * 3, 0);
    for (std::uint32_t r = 0; r < echogram.height; ++r) {
        const std::uint32_t y = echogram.height - 1 - r;
        for (std::uint32_t c = 0; c < echogram.width; ++c) {
            const std::uint8_t v = echogram.intensity_at(r, c);
            if (v == 0) continue;
            const double hue = 240.0 * (1.0 - echogram.lateral_at(r, c).value());
            hsv_to_rgb(hue, v / 255.0, &rgb[(std::size_t(y) * echogram.width + c) * 3]);
        }
    }

    std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.string().c_str(), "wb"));
    if (!file) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(ErrorCode::Io, "libpng initialisation failed");
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(ErrorCode::Io, "PNG encoding failed for '" + path.string() + "'");
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, echogram.width, echogram.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::uint32_t y = 0; y < echogram.height; ++y)
        png_write_row(png, &rgb[std::size_t(y) * echogram.width * 3]);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace echokit
