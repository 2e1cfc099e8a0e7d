#pragma once

// PNG/JPEG decoding and PNG encoding on top of libpng and libjpeg.

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "imfkit/error.hpp"
#include "imfkit/image.hpp"

namespace imfkit {

namespace detail {

inline Image deinterleave(int width, int height, int channels,
                          const std::vector<std::uint8_t>& buf) {
  std::vector<ChannelPlane> planes(channels, ChannelPlane(width, height));
  const std::size_t n = static_cast<std::size_t>(width) * height;
  for (int c = 0; c < channels; ++c) {
    auto dst = planes[c].pixels();
    for (std::size_t i = 0; i < n; ++i) dst[i] = buf[i * channels + c];
  }
  return Image(std::move(planes));
}

inline std::vector<std::uint8_t> interleave(const Image& img) {
  const int channels = img.channels();
  const std::size_t n = img.pixel_count();
  std::vector<std::uint8_t> buf(n * channels);
  for (int c = 0; c < channels; ++c) {
    auto src = img.channel(c).pixels();
    for (std::size_t i = 0; i < n; ++i) buf[i * channels + c] = src[i];
  }
  return buf;
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

inline Image decode_png(const std::vector<std::uint8_t>& bytes,
                        const std::string& name) {
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size()))
    throw IoError("decode failure: " + name + ": " + png.message);
  if (png.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&png);
    throw IoError("unsupported depth: " + name + " has more than 8 bits per channel");
  }
  const int channels = (png.format & PNG_FORMAT_FLAG_COLOR) ? 3 : 1;
  png.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buf.data(), 0, nullptr)) {
    std::string msg = png.message;
    png_image_free(&png);
    throw IoError("decode failure: " + name + ": " + msg);
  }
  return deinterleave(static_cast<int>(png.width), static_cast<int>(png.height),
                      channels, buf);
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

inline Image decode_jpeg(const std::vector<std::uint8_t>& bytes,
                         const std::string& name) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager jerr;
  cinfo.err = jpeg_std_error(&jerr.base);
  jerr.base.error_exit = jpeg_error_exit;
  jerr.message[0] = '\0';
  std::vector<std::uint8_t> buf;
  int width = 0;
  int height = 0;
  int channels = 0;
  bool bad_depth = false;
  if (setjmp(jerr.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw IoError("decode failure: " + name + ": " + jerr.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  if (cinfo.data_precision != 8) {
    bad_depth = true;
  } else {
    channels = cinfo.jpeg_color_space == JCS_GRAYSCALE ? 1 : 3;
    cinfo.out_color_space = channels == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_start_decompress(&cinfo);
    width = static_cast<int>(cinfo.output_width);
    height = static_cast<int>(cinfo.output_height);
    buf.resize(static_cast<std::size_t>(width) * height * channels);
    while (cinfo.output_scanline < cinfo.output_height) {
      JSAMPROW row = buf.data() + static_cast<std::size_t>(cinfo.output_scanline) *
                                      width * channels;
      jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
  }
  jpeg_destroy_decompress(&cinfo);
  if (bad_depth)
    throw IoError("unsupported depth: " + name + " is not an 8-bit JPEG");
  return deinterleave(width, height, channels, buf);
}

}  // namespace detail

/// Reads a PNG or JPEG file into an 8-bit image. Grayscale files give one
/// channel, everything else RGB; alpha is dropped.
inline Image decode_image(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  static constexpr std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngMagic, 8) == 0)
    return detail::decode_png(bytes, path.string());
  if (bytes.size() >= 3 && bytes[0] == 0xff && bytes[1] == 0xd8 && bytes[2] == 0xff)
    return detail::decode_jpeg(bytes, path.string());
  throw IoError("decode failure: " + path.string() + " is neither PNG nor JPEG");
}

inline void encode_png(const Image& img, const std::filesystem::path& path) {
  if (img.pixel_count() == 0) throw InvalidArgument("cannot encode an empty image");
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width());
  png.height = static_cast<png_uint_32>(img.height());
  png.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const auto buf = detail::interleave(img);
  if (!png_image_write_to_file(&png, path.c_str(), 0, buf.data(), 0, nullptr))
    throw IoError("cannot write " + path.string() + ": " + png.message);
}

}  // namespace imfkit
