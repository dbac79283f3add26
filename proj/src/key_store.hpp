#pragma once

// Open-addressing interning of fixed-width keys to dense ids.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace brickctl::detail {

template <class T>
class KeyStore {
public:
  explicit KeyStore(std::size_t stride) : stride_(stride), slots_(1024, kEmpty) {}

  std::size_t size() const noexcept { return count_; }
  std::size_t stride() const noexcept { return stride_; }

  std::span<const T> key(std::uint32_t id) const {
    return {data_.data() + static_cast<std::size_t>(id) * stride_, stride_};
  }

  /// Returns (id, inserted).
  std::pair<std::uint32_t, bool> intern(std::span<const T> k) {
    if ((count_ + 1) * 2 > slots_.size())
      grow();
    const std::size_t mask = slots_.size() - 1;
    for (std::size_t i = hash(k) & mask;; i = (i + 1) & mask) {
      if (slots_[i] == kEmpty) {
        const auto id = static_cast<std::uint32_t>(count_++);
        slots_[i] = id;
        data_.insert(data_.end(), k.begin(), k.end());
        return {id, true};
      }
      if (equal(slots_[i], k))
        return {slots_[i], false};
    }
  }

  std::vector<T> release() && { return std::move(data_); }

private:
  static constexpr std::uint32_t kEmpty = ~std::uint32_t{0};

  static std::uint64_t hash(std::span<const T> k) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (T v : k) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL;
      h *= 0x100000001b3ULL;
      h ^= h >> 29;
    }
    return h;
  }

  bool equal(std::uint32_t id, std::span<const T> k) const {
    const T* p = data_.data() + static_cast<std::size_t>(id) * stride_;
    for (std::size_t i = 0; i < stride_; ++i)
      if (p[i] != k[i])
        return false;
    return true;
  }

  void grow() {
    std::vector<std::uint32_t> next(slots_.size() * 2, kEmpty);
    const std::size_t mask = next.size() - 1;
    for (std::uint32_t id = 0; id < count_; ++id) {
      std::size_t i = hash(key(id)) & mask;
      while (next[i] != kEmpty)
        i = (i + 1) & mask;
      next[i] = id;
    }
    slots_ = std::move(next);
  }

  std::size_t stride_;
  std::size_t count_ = 0;
  std::vector<T> data_;
  std::vector<std::uint32_t> slots_;
};

} // namespace brickctl::detail
