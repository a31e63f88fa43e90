#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lensrag/core.hpp"

namespace lensrag {

/// Immutable 8-bit RGB image. Copies share the pixel buffer.
class ImageBuf {
 public:
  ImageBuf(int width, int height, std::vector<std::uint8_t> rgb);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::span<const std::uint8_t> pixels() const noexcept { return *pixels_; }
  const std::uint8_t* at(int x, int y) const { return pixels_->data() + 3 * (static_cast<std::size_t>(y) * width_ + x); }

  /// SHA-256 over the canonical serialization (dimensions + raw RGB), hex encoded.
  std::string content_hash() const;

  bool operator==(const ImageBuf& other) const;

 private:
  int width_;
  int height_;
  std::shared_ptr<const std::vector<std::uint8_t>> pixels_;
};

ImageBuf load_image(const std::string& path);
ImageBuf decode_image(std::span<const std::uint8_t> bytes);  // PNG or JPEG, sniffed by magic
std::vector<std::uint8_t> encode_png(const ImageBuf& img);
std::vector<std::uint8_t> encode_jpeg(const ImageBuf& img, int quality = 90);

/// Downscale so the shorter edge equals `target`; images whose shorter edge is
/// already <= target come back unchanged. Bilinear, fixed-point arithmetic.
ImageBuf resize_shortest_edge(const ImageBuf& img, int target);

/// Output dimensions resize_shortest_edge would produce.
std::pair<int, int> resized_dims(int width, int height, int target);

/// Intersection of `box` with the image frame (label/confidence kept).
BBox clamp_box(const BBox& box, int width, int height);

/// Sub-image covered by the clamped box; EmptyRegion if nothing remains.
ImageBuf crop(const ImageBuf& img, const BBox& box);

/// Stable hex digest of the pixels; equal pixels give equal keys.
std::string image_key(const ImageBuf& img);

/// Base64 PNG, the transport form used by the live adapters.
std::string to_base64_png(const ImageBuf& img);

}  // namespace lensrag
