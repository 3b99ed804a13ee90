#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "airhands/frame.hpp"

namespace airhands::wire {

// Framing: [u32 length][u8 msg_type][body], all integers big-endian. length
// counts every byte after the length field, so it is at least 1.

inline constexpr std::uint16_t kProtocolVersion = 1;
inline constexpr std::size_t kMaxPayload = 16u * 1024u * 1024u;
inline constexpr std::size_t kLengthPrefix = 4;
/// msg_type + stream_id + seq + capture_ts + payload_len
inline constexpr std::size_t kFrameOverhead = 1 + 1 + 4 + 8 + 4;
inline constexpr std::size_t kMaxLength = kMaxPayload + kFrameOverhead;

enum class Role : std::uint8_t { Helper = 0, Worker = 1 };

enum class MsgType : std::uint8_t {
  Hello = 1,
  HelloAck = 2,
  Frame = 3,
  Heartbeat = 4,
  Bye = 5,
};

enum class RejectReason : std::uint8_t {
  None = 0,
  Version = 1,
  RoleConflict = 2,
  ResolutionMismatch = 3,
};

namespace bye {
inline constexpr std::uint8_t kShutdown = 0;
inline constexpr std::uint8_t kProtocolError = 1;
inline constexpr std::uint8_t kReplaced = 2;
}  // namespace bye

struct Hello {
  std::uint16_t version = kProtocolVersion;
  Role role = Role::Helper;
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  std::uint8_t fps_target = 0;
  bool operator==(const Hello&) const = default;
};

struct HelloAck {
  bool accepted = false;
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  RejectReason reason = RejectReason::None;
  bool operator==(const HelloAck&) const = default;
};

struct Frame {
  StreamId stream_id = StreamId::Scene;
  std::uint32_t seq = 0;
  std::uint64_t capture_ts = 0;
  std::vector<std::uint8_t> payload;
  bool operator==(const Frame&) const = default;
};

struct Heartbeat {
  std::uint64_t ts = 0;
  bool operator==(const Heartbeat&) const = default;
};

struct Bye {
  std::uint8_t reason = bye::kShutdown;
  bool operator==(const Bye&) const = default;
};

using Message = std::variant<Hello, HelloAck, Frame, Heartbeat, Bye>;

MsgType type_of(const Message& msg);
std::string_view to_string(Role role);
std::string_view to_string(RejectReason reason);

/// Appends the framed encoding of msg to out. Throws EncodeError when a
/// FRAME payload exceeds kMaxPayload.
void encode_message_into(const Message& msg, std::vector<std::uint8_t>& out);
std::vector<std::uint8_t> encode_message(const Message& msg);

enum class DecodeStatus {
  Ok,             ///< at least one message decoded; trailing bytes may remain
  NeedMoreBytes,  ///< no complete message at the front of the buffer
  ProtocolError,  ///< stream is unusable; close with BYE(kProtocolError)
};

struct DecodeResult {
  DecodeStatus status = DecodeStatus::NeedMoreBytes;
  std::vector<Message> messages;
  /// Bytes consumed by the decoded messages. Never includes a partial message.
  std::size_t consumed = 0;
  std::string error;
};

/// Greedily decodes complete messages from the front of buffer. Messages
/// decoded before a protocol violation are still returned alongside the
/// ProtocolError status.
DecodeResult decode_stream(std::span<const std::uint8_t> buffer);

/// Per-connection reassembly buffer. After a protocol error the decoder stays
/// failed; there is no resynchronization.
class StreamDecoder {
 public:
  DecodeResult feed(std::span<const std::uint8_t> bytes);
  std::size_t buffered() const { return buffer_.size(); }
  bool failed() const { return failed_; }

 private:
  std::vector<std::uint8_t> buffer_;
  bool failed_ = false;
};

/// What a listener checks an incoming HELLO against.
struct LocalEndpoint {
  Role role = Role::Worker;
  std::uint16_t width = 0;
  std::uint16_t height = 0;
};

/// Accepts iff the version matches, the roles are complementary and the
/// resolutions are identical. The ACK always echoes the listener's
/// resolution. Throws ProtocolError when remote is not a HELLO.
HelloAck negotiate(const LocalEndpoint& local, const Message& remote);

}  // namespace airhands::wire
