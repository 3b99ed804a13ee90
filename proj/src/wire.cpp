#include "airhands/wire.hpp"

#include <fmt/format.h>

#include "airhands/error.hpp"

namespace airhands::wire {

namespace {

void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

// Bounds-checked big-endian reader over one message body.
class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::size_t remaining() const { return data_.size() - pos_; }

  std::uint8_t u8() {
    require(1);
    return data_[pos_++];
  }
  std::uint16_t u16() {
    require(2);
    const auto v = static_cast<std::uint16_t>((data_[pos_] << 8) | data_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    require(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_ + i];
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    require(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_ + i];
    pos_ += 8;
    return v;
  }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    require(n);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  void require(std::size_t n) const {
    if (remaining() < n) {
      throw ProtocolError("message body shorter than its fields");
    }
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

std::uint32_t read_length(std::span<const std::uint8_t> buf) {
  return (static_cast<std::uint32_t>(buf[0]) << 24) |
         (static_cast<std::uint32_t>(buf[1]) << 16) |
         (static_cast<std::uint32_t>(buf[2]) << 8) | static_cast<std::uint32_t>(buf[3]);
}

void expect_exact(std::size_t length, std::size_t expected, std::string_view name) {
  if (length != expected) {
    throw ProtocolError(
        fmt::format("{} length must be {}, got {}", name, expected, length));
  }
}

// body excludes the msg_type byte
Message decode_body(MsgType type, std::span<const std::uint8_t> body) {
  Reader r(body);
  const std::size_t length = body.size() + 1;
  switch (type) {
    case MsgType::Hello: {
      expect_exact(length, 9, "HELLO");
      Hello m;
      m.version = r.u16();
      const std::uint8_t role = r.u8();
      if (role > 1) {
        throw ProtocolError(fmt::format("HELLO role {} undefined", role));
      }
      m.role = static_cast<Role>(role);
      m.width = r.u16();
      m.height = r.u16();
      m.fps_target = r.u8();
      return m;
    }
    case MsgType::HelloAck: {
      expect_exact(length, 7, "HELLO_ACK");
      HelloAck m;
      const std::uint8_t accepted = r.u8();
      if (accepted > 1) {
        throw ProtocolError(fmt::format("HELLO_ACK accepted flag {} undefined", accepted));
      }
      m.accepted = accepted == 1;
      m.width = r.u16();
      m.height = r.u16();
      m.reason = static_cast<RejectReason>(r.u8());
      return m;
    }
    case MsgType::Frame: {
      if (length < kFrameOverhead) {
        throw ProtocolError(fmt::format("FRAME length {} below header size", length));
      }
      Frame m;
      const auto stream = stream_id_from_byte(r.u8());
      if (!stream) {
        throw ProtocolError("FRAME stream_id undefined");
      }
      m.stream_id = *stream;
      m.seq = r.u32();
      m.capture_ts = r.u64();
      const std::uint32_t payload_len = r.u32();
      if (payload_len != length - kFrameOverhead) {
        throw ProtocolError(fmt::format("FRAME payload_len {} inconsistent with length {}",
                                        payload_len, length));
      }
      const auto payload = r.bytes(payload_len);
      m.payload.assign(payload.begin(), payload.end());
      return m;
    }
    case MsgType::Heartbeat: {
      expect_exact(length, 9, "HEARTBEAT");
      return Heartbeat{r.u64()};
    }
    case MsgType::Bye: {
      expect_exact(length, 2, "BYE");
      return Bye{r.u8()};
    }
  }
  throw ProtocolError(fmt::format("unknown msg_type {}", static_cast<int>(type)));
}

}  // namespace

MsgType type_of(const Message& msg) {
  return static_cast<MsgType>(msg.index() + 1);
}

std::string_view to_string(Role role) {
  return role == Role::Helper ? "helper" : "worker";
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::None:
      return "none";
    case RejectReason::Version:
      return "version";
    case RejectReason::RoleConflict:
      return "role conflict";
    case RejectReason::ResolutionMismatch:
      return "resolution mismatch";
  }
  return "unknown";
}

void encode_message_into(const Message& msg, std::vector<std::uint8_t>& out) {
  const std::size_t start = out.size();
  put_u32(out, 0);  // patched below
  put_u8(out, static_cast<std::uint8_t>(type_of(msg)));
  std::visit(
      [&out](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Hello>) {
          put_u16(out, m.version);
          put_u8(out, static_cast<std::uint8_t>(m.role));
          put_u16(out, m.width);
          put_u16(out, m.height);
          put_u8(out, m.fps_target);
        } else if constexpr (std::is_same_v<T, HelloAck>) {
          put_u8(out, m.accepted ? 1 : 0);
          put_u16(out, m.width);
          put_u16(out, m.height);
          put_u8(out, static_cast<std::uint8_t>(m.reason));
        } else if constexpr (std::is_same_v<T, Frame>) {
          if (m.payload.size() > kMaxPayload) {
            throw EncodeError(fmt::format("FRAME payload of {} bytes exceeds {}",
                                          m.payload.size(), kMaxPayload));
          }
          put_u8(out, static_cast<std::uint8_t>(m.stream_id));
          put_u32(out, m.seq);
          put_u64(out, m.capture_ts);
          put_u32(out, static_cast<std::uint32_t>(m.payload.size()));
          out.insert(out.end(), m.payload.begin(), m.payload.end());
        } else if constexpr (std::is_same_v<T, Heartbeat>) {
          put_u64(out, m.ts);
        } else {
          put_u8(out, m.reason);
        }
      },
      msg);
  const auto length = static_cast<std::uint32_t>(out.size() - start - kLengthPrefix);
  for (int i = 0; i < 4; ++i) {
    out[start + i] = static_cast<std::uint8_t>(length >> (24 - 8 * i));
  }
}

std::vector<std::uint8_t> encode_message(const Message& msg) {
  std::vector<std::uint8_t> out;
  encode_message_into(msg, out);
  return out;
}

DecodeResult decode_stream(std::span<const std::uint8_t> buffer) {
  DecodeResult result;
  std::size_t pos = 0;
  for (;;) {
    const auto rest = buffer.subspan(pos);
    if (rest.size() < kLengthPrefix) {
      break;
    }
    const std::uint32_t length = read_length(rest);
    if (length < 1 || length > kMaxLength) {
      result.status = DecodeStatus::ProtocolError;
      result.error = fmt::format("frame length {} outside 1..{}", length, kMaxLength);
      result.consumed = pos;
      return result;
    }
    if (rest.size() > kLengthPrefix) {
      const std::uint8_t raw_type = rest[kLengthPrefix];
      if (raw_type < 1 || raw_type > 5) {
        result.status = DecodeStatus::ProtocolError;
        result.error = fmt::format("unknown msg_type {}", raw_type);
        result.consumed = pos;
        return result;
      }
    }
    if (rest.size() < kLengthPrefix + length) {
      break;
    }
    try {
      result.messages.push_back(decode_body(
          static_cast<MsgType>(rest[kLengthPrefix]), rest.subspan(kLengthPrefix + 1, length - 1)));
    } catch (const ProtocolError& e) {
      result.status = DecodeStatus::ProtocolError;
      result.error = e.what();
      result.consumed = pos;
      return result;
    }
    pos += kLengthPrefix + length;
  }
  result.consumed = pos;
  result.status = result.messages.empty() ? DecodeStatus::NeedMoreBytes : DecodeStatus::Ok;
  return result;
}

DecodeResult StreamDecoder::feed(std::span<const std::uint8_t> bytes) {
  if (failed_) {
    DecodeResult r;
    r.status = DecodeStatus::ProtocolError;
    r.error = "stream already failed";
    return r;
  }
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
  DecodeResult r = decode_stream(buffer_);
  if (r.status == DecodeStatus::ProtocolError) {
    failed_ = true;
    buffer_.clear();
    return r;
  }
  buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(r.consumed));
  return r;
}

HelloAck negotiate(const LocalEndpoint& local, const Message& remote) {
  const auto* hello = std::get_if<Hello>(&remote);
  if (!hello) {
    throw ProtocolError("expected HELLO during handshake");
  }
  HelloAck ack;
  ack.width = local.width;
  ack.height = local.height;
  if (hello->version != kProtocolVersion) {
    ack.reason = RejectReason::Version;
  } else if (hello->role == local.role) {
    ack.reason = RejectReason::RoleConflict;
  } else if (hello->width != local.width || hello->height != local.height) {
    ack.reason = RejectReason::ResolutionMismatch;
  } else {
    ack.accepted = true;
  }
  return ack;
}

}  // namespace airhands::wire
