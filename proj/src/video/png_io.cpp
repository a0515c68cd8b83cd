#include "nightbench/video/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>

#include "nightbench/core/error.hpp"

namespace nightbench {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_fn(png_structp png, png_const_charp) { longjmp(png_jmpbuf(png), 1); }
void png_warning_fn(png_structp, png_const_charp) {}

void validate(const PngImage& image) {
    if (image.width < 1 || image.height < 1) throw ValidationError("png: empty image");
    if (image.channels != 1 && image.channels != 3) throw ValidationError("png: channels must be 1 or 3");
    if (image.bit_depth != 8 && image.bit_depth != 16) throw ValidationError("png: bit depth must be 8 or 16");
    if (image.samples.size() != static_cast<std::size_t>(image.width) * image.height * image.channels) {
        throw ValidationError("png: sample count does not match dimensions");
    }
}

std::vector<png_byte> pack_rows(const PngImage& image) {
    const std::size_t bytes_per_sample = image.bit_depth == 16 ? 2 : 1;
    std::vector<png_byte> buffer(image.samples.size() * bytes_per_sample);
    for (std::size_t i = 0; i < image.samples.size(); ++i) {
        const std::uint16_t v = image.samples[i];
        if (bytes_per_sample == 2) {
            buffer[2 * i] = static_cast<png_byte>(v >> 8);
            buffer[2 * i + 1] = static_cast<png_byte>(v & 0xff);
        } else {
            buffer[i] = static_cast<png_byte>(v);
        }
    }
    return buffer;
}

// Writes through an already configured png_struct. Returns false on libpng error.
bool write_with(png_structp png, png_infop info, const PngImage& image) {
    std::vector<png_byte> buffer = pack_rows(image);
    const std::size_t stride = buffer.size() / static_cast<std::size_t>(image.height);
    std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
    for (int y = 0; y < image.height; ++y) rows[static_cast<std::size_t>(y)] = buffer.data() + stride * static_cast<std::size_t>(y);

    if (setjmp(png_jmpbuf(png))) return false;
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), image.bit_depth,
                 image.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    return true;
}

void append_bytes(png_structp png, png_bytep data, png_size_t length) {
    auto* out = static_cast<std::vector<unsigned char>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + length);
}

void flush_noop(png_structp) {}

}  // namespace

PngImage read_png(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) throw IoError("cannot open " + path.string());

    png_byte header[8];
    if (std::fread(header, 1, 8, file.get()) != 8 || png_sig_cmp(header, 0, 8) != 0) {
        throw IoError("not a PNG file: " + path.string());
    }

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng allocation failed for " + path.string());
    }

    PngImage image;
    std::vector<png_byte> buffer;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("corrupt PNG: " + path.string());
    }

    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const int color_type = png_get_color_type(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
        bit_depth = 8;
    }
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
        bit_depth = 8;
    }
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    image.width = static_cast<int>(png_get_image_width(png, info));
    image.height = static_cast<int>(png_get_image_height(png, info));
    image.channels = static_cast<int>(png_get_channels(png, info));
    image.bit_depth = bit_depth;

    const std::size_t stride = png_get_rowbytes(png, info);
    buffer.resize(stride * static_cast<std::size_t>(image.height));
    rows.resize(static_cast<std::size_t>(image.height));
    for (int y = 0; y < image.height; ++y) rows[static_cast<std::size_t>(y)] = buffer.data() + stride * static_cast<std::size_t>(y);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    if (image.channels != 1 && image.channels != 3) throw IoError("unsupported PNG channel layout: " + path.string());

    const std::size_t count = static_cast<std::size_t>(image.width) * image.height * image.channels;
    image.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        image.samples[i] = bit_depth == 16 ? static_cast<std::uint16_t>((buffer[2 * i] << 8) | buffer[2 * i + 1]) : buffer[i];
    }
    return image;
}

void write_png(const std::filesystem::path& path, const PngImage& image) {
    validate(image);
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) throw IoError("cannot write " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng allocation failed for " + path.string());
    }
    png_init_io(png, file.get());
    const bool ok = write_with(png, info, image);
    png_destroy_write_struct(&png, &info);
    if (!ok) throw IoError("failed to encode PNG: " + path.string());
}

std::vector<unsigned char> encode_png(const PngImage& image) {
    validate(image);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng allocation failed");
    }
    std::vector<unsigned char> out;
    png_set_write_fn(png, &out, append_bytes, flush_noop);
    const bool ok = write_with(png, info, image);
    png_destroy_write_struct(&png, &info);
    if (!ok) throw IoError("failed to encode PNG to memory");
    return out;
}

}  // namespace nightbench
