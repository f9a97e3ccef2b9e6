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

#include "parahead/error.hpp"

#include <sstream>

namespace parahead {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::Malformed: return "Malformed";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::DanglingDimRef: return "DanglingDimRef";
    case ErrorCode::InvalidName: return "InvalidName";
    case ErrorCode::UnrepresentableValue: return "UnrepresentableValue";
    case ErrorCode::ReserveTooSmall: return "ReserveTooSmall";
    case ErrorCode::OverlappingBlocks: return "OverlappingBlocks";
    case ErrorCode::UnsortedIndex: return "UnsortedIndex";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::CollectiveMisuse: return "CollectiveMisuse";
    case ErrorCode::CollectiveAborted: return "CollectiveAborted";
    case ErrorCode::LocalNameConflict: return "LocalNameConflict";
    case ErrorCode::AlreadyFinalized: return "AlreadyFinalized";
    case ErrorCode::NotFinalized: return "NotFinalized";
    case ErrorCode::MissingObject: return "MissingObject";
    case ErrorCode::NoSuchObject: return "NoSuchObject";
    case ErrorCode::ConsistencyError: return "ConsistencyError";
    case ErrorCode::IndivisiblePartition: return "IndivisiblePartition";
    case ErrorCode::NameWidthOverflow: return "NameWidthOverflow";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

namespace {

std::string describe(const std::vector<Conflict>& conflicts) {
  std::ostringstream os;
  os << conflicts.size() << " inconsistent object(s):";
  for (const auto& c : conflicts) {
    os << ' ' << c.kind << " '" << c.full_name << "' (ranks";
    for (int r : c.ranks) os << ' ' << r;
    os << ')';
    if (!c.detail.empty()) os << " [" << c.detail << ']';
  }
  return os.str();
}

}  // namespace

ConsistencyError::ConsistencyError(std::vector<Conflict> conflicts)
    : Error(ErrorCode::ConsistencyError, describe(conflicts)), conflicts_(std::move(conflicts)) {}

}  // namespace parahead
