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

#include "parahead/file_image.hpp"

#include <algorithm>
#include <cstring>
#include <iterator>

#include "parahead/error.hpp"

namespace parahead {

FileImage::FileImage(const FileImage& other) {
  std::lock_guard lk(other.mu_);
  bytes_ = other.bytes_;
  log_ = other.log_;
}

FileImage& FileImage::operator=(const FileImage& other) {
  if (this != &other) {
    std::scoped_lock lk(mu_, other.mu_);
    bytes_ = other.bytes_;
    log_ = other.log_;
  }
  return *this;
}

FileImage::FileImage(FileImage&& other) noexcept : bytes_(std::move(other.bytes_)), log_(std::move(other.log_)) {}

FileImage& FileImage::operator=(FileImage&& other) noexcept {
  bytes_ = std::move(other.bytes_);
  log_ = std::move(other.log_);
  return *this;
}

void FileImage::write(int rank, std::uint64_t offset, ByteView data, std::string label) {
  std::lock_guard lk(mu_);
  if (offset + data.size() > bytes_.size()) bytes_.resize(offset + data.size(), 0);
  std::copy(data.begin(), data.end(), bytes_.begin() + static_cast<std::ptrdiff_t>(offset));
  log_.push_back(WriteRecord{rank, offset, data.size(), std::move(label)});
}

std::uint64_t FileImage::bytes_written(int rank) const {
  std::lock_guard lk(mu_);
  std::uint64_t total = 0;
  for (const auto& w : log_) {
    if (w.rank == rank) total += w.size;
  }
  return total;
}

bool FileImage::regions_disjoint() const {
  std::lock_guard lk(mu_);
  std::vector<WriteRecord> sorted = log_;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.offset < b.offset; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i - 1].offset + sorted[i - 1].size > sorted[i].offset) return false;
  }
  return true;
}

void FileImage::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes_.data()), static_cast<std::streamsize>(bytes_.size()));
  if (!out) throw Error(ErrorCode::Io, "short write to '" + path.string() + "'");
}

FileImage FileImage::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return FileImage(std::move(bytes));
}

Bytes ByteSource::read(std::uint64_t offset, std::uint64_t n) {
  if (offset > size() || n > size() - offset) {
    throw Error(ErrorCode::Truncated, "read of " + std::to_string(n) + " bytes at " + std::to_string(offset) +
                                          " past end of " + std::to_string(size()));
  }
  Bytes out(n);
  read_into(offset, out.data(), n);
  bytes_read_ += n;
  return out;
}

void ImageSource::read_into(std::uint64_t offset, std::uint8_t* out, std::uint64_t n) {
  std::memcpy(out, data_.data() + offset, n);
}

DiskSource::DiskSource(const std::filesystem::path& path) : in_(path, std::ios::binary) {
  if (!in_) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  size_ = std::filesystem::file_size(path);
}

void DiskSource::read_into(std::uint64_t offset, std::uint8_t* out, std::uint64_t n) {
  in_.seekg(static_cast<std::streamoff>(offset));
  in_.read(reinterpret_cast<char*>(out), static_cast<std::streamsize>(n));
  if (!in_) throw Error(ErrorCode::Io, "read failed at offset " + std::to_string(offset));
}

}  // namespace parahead
