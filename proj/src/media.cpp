#include "lensrag/media.hpp"

#include <algorithm>
#include <csetjmp>
#include <cstdio>
#include <cstring>

#include <jpeglib.h>
#include <png.h>

#include "lensrag/text_util.hpp"

namespace lensrag {

ImageBuf::ImageBuf(int width, int height, std::vector<std::uint8_t> rgb) : width_(width), height_(height) {
  if (width < 1 || height < 1) throw InvalidParams("image dimensions must be positive");
  if (rgb.size() != 3 * static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw InvalidParams("pixel buffer size does not match dimensions");
  pixels_ = std::make_shared<const std::vector<std::uint8_t>>(std::move(rgb));
}

std::string ImageBuf::content_hash() const {
  std::string canon = "RGB8 " + std::to_string(width_) + "x" + std::to_string(height_) + "\n";
  canon.append(reinterpret_cast<const char*>(pixels_->data()), pixels_->size());
  return sha256_hex(canon);
}

bool ImageBuf::operator==(const ImageBuf& other) const {
  return width_ == other.width_ && height_ == other.height_ && (pixels_ == other.pixels_ || *pixels_ == *other.pixels_);
}

// ---------------------------------------------------------------------------
// PNG

namespace {

struct PngReadState {
  std::span<const std::uint8_t> data;
  std::size_t offset = 0;
};

void png_read_from_span(png_structp png, png_bytep out, png_size_t len) {
  auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (st->offset + len > st->data.size()) png_error(png, "truncated PNG");
  std::memcpy(out, st->data.data() + st->offset, len);
  st->offset += len;
}

void png_write_to_vector(png_structp png, png_bytep in, png_size_t len) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), in, in + len);
}

void png_flush_noop(png_structp) {}

ImageBuf decode_png(std::span<const std::uint8_t> bytes) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw ImageDecodeError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw ImageDecodeError("png_create_info_struct failed");
  }
  PngReadState state{bytes, 0};
  std::vector<std::uint8_t> rgb;
  png_uint_32 w = 0;
  png_uint_32 h = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ImageDecodeError("invalid PNG data");
  }
  png_set_read_fn(png, &state, png_read_from_span);
  png_read_info(png, info);
  w = png_get_image_width(png, info);
  h = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  if (png_get_rowbytes(png, info) != 3 * static_cast<png_size_t>(w)) png_error(png, "unexpected PNG row layout");
  rgb.resize(3 * static_cast<std::size_t>(w) * h);
  std::vector<png_bytep> rows(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = rgb.data() + 3 * static_cast<std::size_t>(w) * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return ImageBuf(static_cast<int>(w), static_cast<int>(h), std::move(rgb));
}

// ---------------------------------------------------------------------------
// JPEG

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

ImageBuf decode_jpeg(std::span<const std::uint8_t> bytes) {
  jpeg_decompress_struct cinfo{};
  JpegError err{};
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_error_exit;
  std::vector<std::uint8_t> rgb;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw ImageDecodeError(std::string("invalid JPEG data: ") + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  const auto w = cinfo.output_width;
  const auto h = cinfo.output_height;
  rgb.resize(3 * static_cast<std::size_t>(w) * h);
  while (cinfo.output_scanline < h) {
    JSAMPROW row = rgb.data() + 3 * static_cast<std::size_t>(w) * cinfo.output_scanline;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return ImageBuf(static_cast<int>(w), static_cast<int>(h), std::move(rgb));
}

}  // namespace

ImageBuf decode_image(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kPngMagic[] = {0x89, 'P', 'N', 'G'};
  if (bytes.size() >= 4 && std::equal(kPngMagic, kPngMagic + 4, bytes.begin())) return decode_png(bytes);
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) return decode_jpeg(bytes);
  throw ImageDecodeError("unsupported image format (expected PNG or JPEG)");
}

ImageBuf load_image(const std::string& path) {
  std::string raw;
  try {
    raw = read_file(path);
  } catch (const DatasetError&) {
    throw ImageDecodeError("cannot read image " + path);
  }
  return decode_image(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
}

std::vector<std::uint8_t> encode_png(const ImageBuf& img) {
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw ImageDecodeError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw ImageDecodeError("png_create_info_struct failed");
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height()));
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw ImageDecodeError("PNG encoding failed");
  }
  png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < img.height(); ++y) rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(img.at(0, y));
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

std::vector<std::uint8_t> encode_jpeg(const ImageBuf& img, int quality) {
  jpeg_compress_struct cinfo{};
  JpegError err{};
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_error_exit;
  unsigned char* buffer = nullptr;
  unsigned long size = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(buffer);
    throw ImageDecodeError(std::string("JPEG encoding failed: ") + err.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buffer, &size);
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(img.at(0, static_cast<int>(cinfo.next_scanline)));
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  std::vector<std::uint8_t> out(buffer, buffer + size);
  jpeg_destroy_compress(&cinfo);
  std::free(buffer);
  return out;
}

// ---------------------------------------------------------------------------
// Geometry

std::pair<int, int> resized_dims(int width, int height, int target) {
  if (target < 1) throw InvalidParams("resize target must be >= 1");
  const int shortest = std::min(width, height);
  if (shortest <= target) return {width, height};
  const auto scale_long = [&](int edge) {
    // round(edge * target / shortest), integer half-up
    return static_cast<int>((2LL * edge * target + shortest) / (2LL * shortest));
  };
  if (width <= height) return {target, scale_long(height)};
  return {scale_long(width), target};
}

namespace {

struct Tap {
  int i0;
  int i1;
  std::uint32_t frac;  // weight of i1 in 1/65536
};

// Sample-center mapping: src = (dst + 1/2) * S / D - 1/2, evaluated exactly in
// units of 1/(2D).
std::vector<Tap> taps(int src, int dst) {
  std::vector<Tap> out(static_cast<std::size_t>(dst));
  const std::int64_t denom = 2LL * dst;
  for (int d = 0; d < dst; ++d) {
    std::int64_t num = (2LL * d + 1) * src - dst;
    if (num < 0) num = 0;
    int i0 = static_cast<int>(num / denom);
    std::int64_t rem = num % denom;
    if (i0 >= src - 1) {
      i0 = src - 1;
      rem = 0;
    }
    out[static_cast<std::size_t>(d)] = {i0, std::min(i0 + 1, src - 1), static_cast<std::uint32_t>((rem << 16) / denom)};
  }
  return out;
}

}  // namespace

ImageBuf resize_shortest_edge(const ImageBuf& img, int target) {
  const auto [nw, nh] = resized_dims(img.width(), img.height(), target);
  if (nw == img.width() && nh == img.height()) return img;
  const auto xt = taps(img.width(), nw);
  const auto yt = taps(img.height(), nh);
  std::vector<std::uint8_t> out(3 * static_cast<std::size_t>(nw) * nh);
  std::size_t o = 0;
  for (int y = 0; y < nh; ++y) {
    const Tap& ty = yt[static_cast<std::size_t>(y)];
    const std::uint64_t wy1 = ty.frac;
    const std::uint64_t wy0 = 65536 - wy1;
    for (int x = 0; x < nw; ++x) {
      const Tap& tx = xt[static_cast<std::size_t>(x)];
      const std::uint32_t wx1 = tx.frac;
      const std::uint32_t wx0 = 65536 - wx1;
      const std::uint8_t* p00 = img.at(tx.i0, ty.i0);
      const std::uint8_t* p10 = img.at(tx.i1, ty.i0);
      const std::uint8_t* p01 = img.at(tx.i0, ty.i1);
      const std::uint8_t* p11 = img.at(tx.i1, ty.i1);
      for (int c = 0; c < 3; ++c) {
        const std::uint64_t top = static_cast<std::uint64_t>(p00[c]) * wx0 + static_cast<std::uint64_t>(p10[c]) * wx1;
        const std::uint64_t bot = static_cast<std::uint64_t>(p01[c]) * wx0 + static_cast<std::uint64_t>(p11[c]) * wx1;
        out[o++] = static_cast<std::uint8_t>((top * wy0 + bot * wy1 + (1ULL << 31)) >> 32);
      }
    }
  }
  return ImageBuf(nw, nh, std::move(out));
}

BBox clamp_box(const BBox& box, int width, int height) {
  const long long x0 = std::clamp<long long>(box.x, 0, width);
  const long long y0 = std::clamp<long long>(box.y, 0, height);
  const long long x1 = std::clamp<long long>(static_cast<long long>(box.x) + std::max(box.w, 0), 0, width);
  const long long y1 = std::clamp<long long>(static_cast<long long>(box.y) + std::max(box.h, 0), 0, height);
  BBox out = box;
  out.x = static_cast<int>(x0);
  out.y = static_cast<int>(y0);
  out.w = static_cast<int>(std::max(0LL, x1 - x0));
  out.h = static_cast<int>(std::max(0LL, y1 - y0));
  return out;
}

ImageBuf crop(const ImageBuf& img, const BBox& box) {
  const BBox c = clamp_box(box, img.width(), img.height());
  if (c.w <= 0 || c.h <= 0) throw EmptyRegion("crop region does not intersect the image");
  if (c.x == 0 && c.y == 0 && c.w == img.width() && c.h == img.height()) return img;
  std::vector<std::uint8_t> out;
  out.reserve(3 * static_cast<std::size_t>(c.w) * c.h);
  for (int y = c.y; y < c.y + c.h; ++y) {
    const std::uint8_t* row = img.at(c.x, y);
    out.insert(out.end(), row, row + 3 * static_cast<std::size_t>(c.w));
  }
  return ImageBuf(c.w, c.h, std::move(out));
}

std::string image_key(const ImageBuf& img) { return img.content_hash(); }

std::string to_base64_png(const ImageBuf& img) { return base64_encode(encode_png(img)); }

}  // namespace lensrag
