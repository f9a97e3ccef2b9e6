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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include "parahead/bytes.hpp"

namespace parahead {

struct WriteRecord {
  int rank = 0;
  std::uint64_t offset = 0;
  std::uint64_t size = 0;
  std::string label;

  friend bool operator==(const WriteRecord&, const WriteRecord&) = default;
};

// In-memory file shared by the ranks of a run. Writes may come from any
// rank concurrently; each is logged with its region so ownership can be
// audited afterwards.
class FileImage {
 public:
  FileImage() = default;
  explicit FileImage(Bytes contents) : bytes_(std::move(contents)) {}

  FileImage(const FileImage& other);
  FileImage& operator=(const FileImage& other);
  FileImage(FileImage&& other) noexcept;
  FileImage& operator=(FileImage&& other) noexcept;

  void write(int rank, std::uint64_t offset, ByteView data, std::string label);

  // Not synchronized with write(); call once the writers are done.
  const Bytes& bytes() const noexcept { return bytes_; }
  std::uint64_t size() const noexcept { return bytes_.size(); }
  const std::vector<WriteRecord>& write_log() const noexcept { return log_; }

  std::uint64_t bytes_written(int rank) const;

  // True when no two logged writes touch a common byte.
  bool regions_disjoint() const;

  void save(const std::filesystem::path& path) const;
  static FileImage load(const std::filesystem::path& path);

 private:
  mutable std::mutex mu_;
  Bytes bytes_;
  std::vector<WriteRecord> log_;
};

// Positional reads with a running byte count.
class ByteSource {
 public:
  virtual ~ByteSource() = default;
  virtual std::uint64_t size() const = 0;
  // Throws Truncated when the range runs past the end.
  Bytes read(std::uint64_t offset, std::uint64_t n);
  std::uint64_t bytes_read() const noexcept { return bytes_read_; }

 protected:
  virtual void read_into(std::uint64_t offset, std::uint8_t* out, std::uint64_t n) = 0;

 private:
  std::uint64_t bytes_read_ = 0;
};

class ImageSource final : public ByteSource {
 public:
  explicit ImageSource(const FileImage& image) : data_(image.bytes()) {}
  explicit ImageSource(ByteView data) : data_(data) {}
  std::uint64_t size() const override { return data_.size(); }

 protected:
  void read_into(std::uint64_t offset, std::uint8_t* out, std::uint64_t n) override;

 private:
  ByteView data_;
};

class DiskSource final : public ByteSource {
 public:
  explicit DiskSource(const std::filesystem::path& path);
  std::uint64_t size() const override { return size_; }

 protected:
  void read_into(std::uint64_t offset, std::uint8_t* out, std::uint64_t n) override;

 private:
  std::ifstream in_;
  std::uint64_t size_ = 0;
};

}  // namespace parahead
