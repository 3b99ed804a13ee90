#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <utility>

namespace airhands {

/// Capacity-one mailbox. A write replaces whatever is there; if the replaced
/// value was never consumed it counts as a drop. Thread-safe.
template <typename T>
class LatestSlot {
 public:
  void put(T value) {
    std::lock_guard lock(mutex_);
    if (value_ && fresh_) {
      ++replaced_;
    }
    value_.reset();
    value_.emplace(std::move(value));
    fresh_ = true;
  }

  /// The unconsumed value, moved out; nothing if it was already consumed.
  std::optional<T> take() {
    std::lock_guard lock(mutex_);
    if (!value_ || !fresh_) {
      return std::nullopt;
    }
    std::optional<T> out(std::move(*value_));
    value_.reset();
    fresh_ = false;
    return out;
  }

  /// The most recently written value, consumed or not. Marks it consumed
  /// and keeps it in place for the next call.
  std::optional<T> latest() {
    std::lock_guard lock(mutex_);
    fresh_ = false;
    return value_;
  }

  bool has_fresh() const {
    std::lock_guard lock(mutex_);
    return value_.has_value() && fresh_;
  }

  void clear() {
    std::lock_guard lock(mutex_);
    value_.reset();
    fresh_ = false;
  }

  std::uint64_t replaced_count() const {
    std::lock_guard lock(mutex_);
    return replaced_;
  }

  std::size_t occupancy() const {
    std::lock_guard lock(mutex_);
    return value_ ? 1 : 0;
  }

 private:
  mutable std::mutex mutex_;
  std::optional<T> value_;
  bool fresh_ = false;
  std::uint64_t replaced_ = 0;
};

}  // namespace airhands
