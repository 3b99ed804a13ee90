#pragma once

#include <stdexcept>
#include <string>

namespace airhands {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a type invariant (byte length, field range).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Operands disagree on width/height.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A configuration or tuning value is outside its permitted range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Bytes could not be decoded as a JPEG image.
class DecodeError : public Error {
 public:
  using Error::Error;
};

/// Decoding would exceed a configured resource cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

class EncodeError : public Error {
 public:
  using Error::Error;
};

/// The peer sent bytes that violate the wire protocol. The connection
/// carrying them must be abandoned.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// A frame source or sink failed (missing file, corrupt index line).
class SourceError : public Error {
 public:
  using Error::Error;
};

/// Command-line misuse; maps to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace airhands
