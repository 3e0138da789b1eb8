#include "genbench/toy/image_codec.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <string>

#include <fmt/format.h>

#include "genbench/util/error.hpp"

namespace genbench::toy {
namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept {
        if (f != nullptr) {
            std::fclose(f);
        }
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void put_int64(GrayImage& img, std::size_t offset, std::int64_t v) {
    const auto u = static_cast<std::uint64_t>(v);
    for (std::size_t i = 0; i < 8; ++i) {
        img[offset + i] = static_cast<std::uint8_t>((u >> (8 * (7 - i))) & 0xffu);
    }
}

std::int64_t get_int64(const GrayImage& img, std::size_t offset) {
    std::uint64_t u = 0;
    for (std::size_t i = 0; i < 8; ++i) {
        u = (u << 8) | img[offset + i];
    }
    return static_cast<std::int64_t>(u);
}

std::int64_t to_fixed(double v) {
    const double scaled = std::round(v * kFixedPointScale);
    if (!std::isfinite(scaled) || std::abs(scaled) >= 9.2e18) {
        throw InvalidInput(fmt::format("toy image: coordinate {} out of encodable range", v));
    }
    return static_cast<std::int64_t>(scaled);
}

}  // namespace

GrayImage encode_sample(const Vec2& point) {
    GrayImage img{};
    put_int64(img, 0, to_fixed(point[0]));
    put_int64(img, 8, to_fixed(point[1]));

    auto to_pixel = [](double v, int lo, int hi) {
        const double clamped = std::clamp(v, -8.0, 8.0);
        return lo + static_cast<int>(std::lround((clamped + 8.0) / 16.0 * (hi - lo)));
    };
    const int cx = to_pixel(point[0], 1, kImageSide - 2);
    const int cy = to_pixel(-point[1], 3, kImageSide - 2);
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            img[static_cast<std::size_t>((cy + dy) * kImageSide + (cx + dx))] = 255;
        }
    }
    return img;
}

namespace {

// libpng reports through callbacks; keep the message for the exception instead of stderr.
void on_png_error(png_structp png, png_const_charp msg) {
    *static_cast<std::string*>(png_get_error_ptr(png)) = msg;
    png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

}  // namespace

Vec2 decode_sample(const GrayImage& image) {
    return {static_cast<double>(get_int64(image, 0)) / kFixedPointScale,
            static_cast<double>(get_int64(image, 8)) / kFixedPointScale};
}

void write_png(const std::filesystem::path& path, const GrayImage& image) {
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) {
        throw IoError(fmt::format("cannot write {}", path.string()));
    }
    std::string png_message;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &png_message, on_png_error, on_png_warning);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (png == nullptr || info == nullptr) {
        png_destroy_write_struct(&png, &info);
        throw RuntimeFailure("libpng: cannot allocate writer");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError(fmt::format("libpng: failed writing {}: {}", path.string(), png_message));
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, kImageSide, kImageSide, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int r = 0; r < kImageSide; ++r) {
        png_write_row(png, const_cast<png_bytep>(image.data() + r * kImageSide));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

GrayImage read_png(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) {
        throw IoError(fmt::format("cannot read {}", path.string()));
    }
    std::string png_message;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &png_message, on_png_error, on_png_warning);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (png == nullptr || info == nullptr) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw RuntimeFailure("libpng: cannot allocate reader");
    }
    GrayImage img{};
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw InvalidInput(fmt::format("{}: not a readable PNG ({})", path.string(), png_message));
    }
    png_init_io(png, file.get());
    png_read_info(png, info);
    if (png_get_image_width(png, info) != kImageSide || png_get_image_height(png, info) != kImageSide ||
        png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY || png_get_bit_depth(png, info) != 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw InvalidInput(fmt::format("{}: not a 32x32 8-bit grayscale toy image", path.string()));
    }
    for (int r = 0; r < kImageSide; ++r) {
        png_read_row(png, img.data() + r * kImageSide, nullptr);
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

}  // namespace genbench::toy
