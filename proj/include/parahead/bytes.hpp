// Copyright 2026 The parahead Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace parahead {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

constexpr std::uint64_t align_up(std::uint64_t value, std::uint64_t alignment) {
  return (value + alignment - 1) / alignment * alignment;
}

constexpr std::uint64_t pad4(std::uint64_t n) { return align_up(n, 4); }

// Big-endian appender.
class ByteWriter {
 public:
  ByteWriter() = default;
  explicit ByteWriter(std::size_t reserve) { out_.reserve(reserve); }

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void raw(ByteView data);
  void raw(std::string_view data);
  // Appends zero bytes up to the next multiple of four.
  void pad_to_4();

  std::size_t size() const noexcept { return out_.size(); }
  Bytes take() && { return std::move(out_); }
  const Bytes& bytes() const noexcept { return out_; }

 private:
  Bytes out_;
};

// Big-endian cursor over an immutable buffer. Reads past the end throw
// Error(Truncated); non-zero padding throws Error(Malformed).
class ByteReader {
 public:
  explicit ByteReader(ByteView data) : data_(data) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  ByteView raw(std::size_t n);
  std::string string(std::size_t n);
  void skip_padding_to_4();

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  bool at_end() const noexcept { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const;

  ByteView data_;
  std::size_t pos_ = 0;
};

// FNV-1a, 64-bit.
std::uint64_t fnv1a64(ByteView data) noexcept;
std::uint64_t fnv1a64(std::string_view data) noexcept;

}  // namespace parahead
