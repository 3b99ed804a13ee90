#include "airhands/codec.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include <jpeglib.h>

#include <fmt/format.h>

#include "airhands/error.hpp"

namespace airhands::codec {

namespace {

// libjpeg reports errors by calling error_exit, which must not return. We
// longjmp back into the C-style frame that owns the codec struct; nothing with
// a non-trivial destructor lives in those frames.
struct ErrorTrap {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

extern "C" void trap_error_exit(j_common_ptr cinfo) {
  auto* trap = reinterpret_cast<ErrorTrap*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, trap->message);
  std::longjmp(trap->jump, 1);
}

extern "C" void trap_emit_message(j_common_ptr cinfo, int level) {
  if (level < 0) {
    // corrupt-data warnings, premature EOF
    auto* trap = reinterpret_cast<ErrorTrap*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, trap->message);
    std::longjmp(trap->jump, 1);
  }
}

enum class Status { Ok, Failed, TooLarge };

struct EncodeJob {
  const std::uint8_t* pixels;
  int width;
  int height;
  int quality;
  unsigned char* out;
  unsigned long out_size;
  char message[JMSG_LENGTH_MAX];
};

Status run_encode(EncodeJob* job) {
  jpeg_compress_struct cinfo;
  ErrorTrap trap;
  cinfo.err = jpeg_std_error(&trap.base);
  trap.base.error_exit = trap_error_exit;
  trap.message[0] = '\0';
  if (setjmp(trap.jump)) {
    std::memcpy(job->message, trap.message, sizeof(job->message));
    jpeg_destroy_compress(&cinfo);
    return Status::Failed;
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &job->out, &job->out_size);
  cinfo.image_width = static_cast<JDIMENSION>(job->width);
  cinfo.image_height = static_cast<JDIMENSION>(job->height);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, job->quality, TRUE);
  cinfo.comp_info[0].h_samp_factor = 2;
  cinfo.comp_info[0].v_samp_factor = 2;
  cinfo.comp_info[1].h_samp_factor = 1;
  cinfo.comp_info[1].v_samp_factor = 1;
  cinfo.comp_info[2].h_samp_factor = 1;
  cinfo.comp_info[2].v_samp_factor = 1;
  cinfo.optimize_coding = FALSE;
  jpeg_start_compress(&cinfo, TRUE);
  const auto stride = static_cast<std::size_t>(job->width) * 3;
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(job->pixels + cinfo.next_scanline * stride);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  return Status::Ok;
}

struct DecodeJob {
  const std::uint8_t* data;
  std::size_t size;
  DecodeLimits limits;
  int width;
  int height;
  std::vector<std::uint8_t>* pixels;
  char message[JMSG_LENGTH_MAX];
};

Status run_decode(DecodeJob* job) {
  jpeg_decompress_struct cinfo;
  ErrorTrap trap;
  cinfo.err = jpeg_std_error(&trap.base);
  trap.base.error_exit = trap_error_exit;
  trap.base.emit_message = trap_emit_message;
  trap.message[0] = '\0';
  if (setjmp(trap.jump)) {
    std::memcpy(job->message, trap.message, sizeof(job->message));
    jpeg_destroy_decompress(&cinfo);
    return Status::Failed;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, job->data, static_cast<unsigned long>(job->size));
  jpeg_read_header(&cinfo, TRUE);
  if (cinfo.image_width == 0 || cinfo.image_height == 0) {
    std::snprintf(job->message, sizeof(job->message), "empty image");
    jpeg_destroy_decompress(&cinfo);
    return Status::Failed;
  }
  if (cinfo.image_width > static_cast<JDIMENSION>(job->limits.max_width) ||
      cinfo.image_height > static_cast<JDIMENSION>(job->limits.max_height)) {
    job->width = static_cast<int>(cinfo.image_width);
    job->height = static_cast<int>(cinfo.image_height);
    jpeg_destroy_decompress(&cinfo);
    return Status::TooLarge;
  }
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  if (cinfo.output_components != 3) {
    std::snprintf(job->message, sizeof(job->message), "unexpected component count %d",
                  cinfo.output_components);
    jpeg_destroy_decompress(&cinfo);
    return Status::Failed;
  }
  job->width = static_cast<int>(cinfo.output_width);
  job->height = static_cast<int>(cinfo.output_height);
  const auto stride = static_cast<std::size_t>(job->width) * 3;
  job->pixels->resize(stride * static_cast<std::size_t>(job->height));
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = job->pixels->data() + cinfo.output_scanline * stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return Status::Ok;
}

}  // namespace

EncodedFrame encode_jpeg(const RawFrame& frame, int quality) {
  if (quality < 1 || quality > 100) {
    throw ConfigError(fmt::format("jpeg quality out of range 1..100: {}", quality));
  }
  EncodeJob job{frame.pixels().data(), frame.width(), frame.height(), quality,
                nullptr, 0, {}};
  const Status status = run_encode(&job);
  if (status != Status::Ok) {
    std::free(job.out);
    throw EncodeError(fmt::format("jpeg encode failed: {}", job.message));
  }
  EncodedFrame out;
  out.payload.assign(job.out, job.out + job.out_size);
  std::free(job.out);
  out.width = frame.width();
  out.height = frame.height();
  out.quality = quality;
  return out;
}

RawFrame decode_jpeg(std::span<const std::uint8_t> payload, std::uint32_t seq,
                     std::uint64_t capture_ts, StreamId stream_id,
                     const DecodeLimits& limits) {
  const std::size_t n = payload.size();
  if (n < 4 || payload[0] != 0xFF || payload[1] != 0xD8) {
    throw DecodeError("payload does not start with a JPEG SOI marker");
  }
  if (payload[n - 2] != 0xFF || payload[n - 1] != 0xD9) {
    throw DecodeError("payload does not end with a JPEG EOI marker");
  }
  std::vector<std::uint8_t> pixels;
  DecodeJob job{payload.data(), n, limits, 0, 0, &pixels, {}};
  switch (run_decode(&job)) {
    case Status::Ok:
      break;
    case Status::TooLarge:
      throw ResourceError(fmt::format("jpeg dimensions {}x{} exceed cap {}x{}", job.width,
                                      job.height, limits.max_width, limits.max_height));
    case Status::Failed:
      throw DecodeError(fmt::format("jpeg decode failed: {}", job.message));
  }
  return make_frame(job.width, job.height, std::move(pixels), seq, capture_ts, stream_id);
}

}  // namespace airhands::codec
