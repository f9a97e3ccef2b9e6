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

#include "parahead/classic_codec.hpp"

#include <algorithm>
#include <bit>
#include <string_view>
#include <limits>
#include <type_traits>

#include "parahead/error.hpp"

namespace parahead {

namespace {

constexpr std::uint64_t kInt32Max = std::numeric_limits<std::int32_t>::max();
constexpr std::uint64_t kUInt32Max = std::numeric_limits<std::uint32_t>::max();
constexpr std::uint64_t kInt64Max = std::numeric_limits<std::int64_t>::max();

bool wide_counts(FormatVersion v) { return v == FormatVersion::Cdf5; }
bool wide_offsets(FormatVersion v) { return v != FormatVersion::Cdf1; }
std::uint64_t count_width(FormatVersion v) { return wide_counts(v) ? 8 : 4; }
std::uint64_t offset_width(FormatVersion v) { return wide_offsets(v) ? 8 : 4; }

void check_version(FormatVersion v) {
  if (v != FormatVersion::Cdf1 && v != FormatVersion::Cdf2 && v != FormatVersion::Cdf5) {
    throw Error(ErrorCode::InvalidArgument, "unsupported format version " + std::to_string(static_cast<int>(v)));
  }
}

class Encoder {
 public:
  Encoder(ByteWriter& out, FormatVersion version) : out_(out), version_(version) {}

  void count(std::uint64_t v, const char* what, std::uint64_t narrow_max = kInt32Max) {
    if (wide_counts(version_)) {
      if (v > kInt64Max) overflow(what, v);
      out_.u64(v);
    } else {
      if (v > narrow_max) overflow(what, v);
      out_.u32(static_cast<std::uint32_t>(v));
    }
  }

  void offset(std::uint64_t v, const char* what) {
    if (wide_offsets(version_)) {
      if (v > kInt64Max) overflow(what, v);
      out_.u64(v);
    } else {
      if (v > kInt32Max) overflow(what, v);
      out_.u32(static_cast<std::uint32_t>(v));
    }
  }

  void name(const std::string& s) {
    count(s.size(), "name length");
    out_.raw(s);
    out_.pad_to_4();
  }

  void type(TypeTag tag) {
    if (tag == TypeTag::Int64 && version_ != FormatVersion::Cdf5) {
      throw Error(ErrorCode::UnrepresentableValue, "int64 type requires CDF-5");
    }
    out_.u32(static_cast<std::uint32_t>(tag));
  }

  void attribute(const AttributeDef& att) {
    name(att.name);
    type(att.type());
    count(element_count(att.values), "attribute length");
    std::visit([this](const auto& values) { put_values(values); }, att.values);
    out_.pad_to_4();
  }

  void attribute_list(const std::vector<AttributeDef>& atts) {
    if (atts.empty()) {
      absent();
      return;
    }
    out_.u32(kTagAttribute);
    count(atts.size(), "attribute count");
    for (const auto& att : atts) attribute(att);
  }

  void absent() {
    out_.u32(0);
    count(0, "absent");
  }

 private:
  [[noreturn]] void overflow(const char* what, std::uint64_t v) {
    throw Error(ErrorCode::UnrepresentableValue, std::string(what) + " " + std::to_string(v) +
                                                     " does not fit CDF-" +
                                                     std::to_string(static_cast<int>(version_)));
  }

  void put_values(const std::string& chars) { out_.raw(chars); }

  template <typename T>
  void put_values(const std::vector<T>& values) {
    for (T v : values) {
      if constexpr (sizeof(T) == 1) {
        out_.u8(static_cast<std::uint8_t>(v));
      } else if constexpr (sizeof(T) == 2) {
        out_.u16(static_cast<std::uint16_t>(v));
      } else if constexpr (std::is_same_v<T, float>) {
        out_.u32(std::bit_cast<std::uint32_t>(v));
      } else if constexpr (std::is_same_v<T, double>) {
        out_.u64(std::bit_cast<std::uint64_t>(v));
      } else if constexpr (sizeof(T) == 4) {
        out_.u32(static_cast<std::uint32_t>(v));
      } else {
        out_.u64(static_cast<std::uint64_t>(v));
      }
    }
  }

  ByteWriter& out_;
  FormatVersion version_;
};

class Decoder {
 public:
  Decoder(ByteReader& in, FormatVersion version) : in_(in), version_(version) {}

  std::uint64_t count() {
    if (wide_counts(version_)) {
      std::uint64_t v = in_.u64();
      if (v > kInt64Max) throw Error(ErrorCode::Malformed, "negative count");
      return v;
    }
    return in_.u32();
  }

  // Upper bound check so corrupted counts fail as Truncated instead of
  // driving huge allocations.
  std::uint64_t element_count(std::uint64_t min_entry_bytes) {
    std::uint64_t n = count();
    if (min_entry_bytes > 0 && n > in_.remaining() / min_entry_bytes) {
      throw Error(ErrorCode::Truncated, "declared " + std::to_string(n) + " entries but only " +
                                            std::to_string(in_.remaining()) + " bytes remain");
    }
    return n;
  }

  std::uint64_t offset() { return wide_offsets(version_) ? in_.u64() : in_.u32(); }

  std::string name() {
    std::uint64_t n = element_count(1);
    std::string s = in_.string(n);
    in_.skip_padding_to_4();
    return s;
  }

  TypeTag type() {
    std::uint32_t code = in_.u32();
    auto tag = type_from_code(code);
    if (!tag || (*tag == TypeTag::Int64 && version_ != FormatVersion::Cdf5)) {
      throw Error(ErrorCode::Malformed, "unknown type code " + std::to_string(code));
    }
    return *tag;
  }

  // Returns the element count of the list; 0 for ABSENT.
  std::uint64_t list_header(std::uint32_t expected_tag, std::uint64_t min_entry_bytes) {
    std::uint32_t tag = in_.u32();
    if (tag == 0) {
      if (count() != 0) throw Error(ErrorCode::Malformed, "absent list with non-zero count");
      return 0;
    }
    if (tag != expected_tag) throw Error(ErrorCode::Malformed, "unexpected list tag " + std::to_string(tag));
    std::uint64_t n = element_count(min_entry_bytes);
    if (n == 0) throw Error(ErrorCode::Malformed, "tagged list with zero entries");
    return n;
  }

  AttributeDef attribute() {
    AttributeDef att;
    att.name = name();
    TypeTag tag = type();
    std::uint64_t n = element_count(type_size(tag));
    switch (tag) {
      case TypeTag::Byte: att.values = get_values<std::int8_t>(n); break;
      case TypeTag::Char: att.values = in_.string(n); break;
      case TypeTag::Short: att.values = get_values<std::int16_t>(n); break;
      case TypeTag::Int: att.values = get_values<std::int32_t>(n); break;
      case TypeTag::Float: att.values = get_values<float>(n); break;
      case TypeTag::Double: att.values = get_values<double>(n); break;
      case TypeTag::Int64: att.values = get_values<std::int64_t>(n); break;
    }
    in_.skip_padding_to_4();
    return att;
  }

  std::vector<AttributeDef> attribute_list() {
    std::uint64_t n = list_header(kTagAttribute, 12);
    std::vector<AttributeDef> atts;
    atts.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) atts.push_back(attribute());
    return atts;
  }

 private:
  template <typename T>
  std::vector<T> get_values(std::uint64_t n) {
    std::vector<T> values;
    values.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      if constexpr (sizeof(T) == 1) {
        values.push_back(static_cast<T>(in_.u8()));
      } else if constexpr (sizeof(T) == 2) {
        values.push_back(static_cast<T>(in_.u16()));
      } else if constexpr (std::is_same_v<T, float>) {
        values.push_back(std::bit_cast<float>(in_.u32()));
      } else if constexpr (std::is_same_v<T, double>) {
        values.push_back(std::bit_cast<double>(in_.u64()));
      } else if constexpr (sizeof(T) == 4) {
        values.push_back(static_cast<T>(in_.u32()));
      } else {
        values.push_back(static_cast<T>(in_.u64()));
      }
    }
    return values;
  }

  ByteReader& in_;
  FormatVersion version_;
};

std::uint64_t name_size(const std::string& s, FormatVersion v) { return count_width(v) + pad4(s.size()); }

std::uint64_t att_list_size(const std::vector<AttributeDef>& atts, FormatVersion v) {
  std::uint64_t n = detail::list_framing_size(v);
  for (const auto& att : atts) n += detail::att_entry_size(att, v);
  return n;
}

}  // namespace

namespace detail {

std::uint64_t list_framing_size(FormatVersion version) { return 4 + count_width(version); }

void encode_attribute(ByteWriter& out, const AttributeDef& att, FormatVersion version) {
  Encoder(out, version).attribute(att);
}

AttributeDef decode_attribute(ByteReader& in, FormatVersion version) { return Decoder(in, version).attribute(); }

std::uint64_t dim_entry_size(const DimensionDef& dim, FormatVersion version) {
  return name_size(dim.name, version) + count_width(version);
}

std::uint64_t att_entry_size(const AttributeDef& att, FormatVersion version) {
  return name_size(att.name, version) + 4 + count_width(version) +
         pad4(element_count(att.values) * type_size(att.type()));
}

std::uint64_t var_entry_size(const VariableDef& var, FormatVersion version) {
  return name_size(var.name, version) + count_width(version) * (1 + var.dim_ids.size()) +
         att_list_size(var.attributes, version) + 4 + count_width(version) + offset_width(version);
}

std::uint64_t lists_size(const Header& header, FormatVersion version) {
  std::uint64_t n = 3 * list_framing_size(version);
  for (const auto& dim : header.dims) n += dim_entry_size(dim, version);
  for (const auto& att : header.global_atts) n += att_entry_size(att, version);
  for (const auto& var : header.vars) n += var_entry_size(var, version);
  return n;
}

void encode_lists(ByteWriter& out, const Header& header, FormatVersion version) {
  Encoder enc(out, version);

  if (header.dims.empty()) {
    enc.absent();
  } else {
    out.u32(kTagDimension);
    enc.count(header.dims.size(), "dimension count");
    for (const auto& dim : header.dims) {
      enc.name(dim.name);
      enc.count(dim.length, "dimension length");
    }
  }

  enc.attribute_list(header.global_atts);

  if (header.vars.empty()) {
    enc.absent();
  } else {
    out.u32(kTagVariable);
    enc.count(header.vars.size(), "variable count");
    for (const auto& var : header.vars) {
      enc.name(var.name);
      enc.count(var.dim_ids.size(), "variable rank");
      for (std::uint64_t id : var.dim_ids) enc.count(id, "dimension id");
      enc.attribute_list(var.attributes);
      enc.type(var.type);
      enc.count(var.vsize, "vsize", kUInt32Max);
      enc.offset(var.begin, "begin");
    }
  }
}

Header decode_lists(ByteReader& in, FormatVersion version) {
  Decoder dec(in, version);
  Header header;

  std::uint64_t ndims = dec.list_header(kTagDimension, 8);
  header.dims.reserve(ndims);
  for (std::uint64_t i = 0; i < ndims; ++i) {
    DimensionDef dim;
    dim.name = dec.name();
    dim.length = dec.count();
    header.dims.push_back(std::move(dim));
  }

  header.global_atts = dec.attribute_list();

  std::uint64_t nvars = dec.list_header(kTagVariable, 24);
  header.vars.reserve(nvars);
  for (std::uint64_t i = 0; i < nvars; ++i) {
    VariableDef var;
    var.name = dec.name();
    std::uint64_t rank = dec.element_count(count_width(version));
    var.dim_ids.reserve(rank);
    for (std::uint64_t d = 0; d < rank; ++d) var.dim_ids.push_back(dec.count());
    var.attributes = dec.attribute_list();
    var.type = dec.type();
    var.vsize = dec.count();
    var.begin = dec.offset();
    header.vars.push_back(std::move(var));
  }

  validate(header);
  for (const auto& var : header.vars) {
    if (var.vsize != variable_size(header, var)) {
      throw Error(ErrorCode::Malformed, "variable '" + var.name + "' vsize " + std::to_string(var.vsize) +
                                            " disagrees with its shape");
    }
  }
  return header;
}

}  // namespace detail

std::uint64_t encoded_size(const Header& header, FormatVersion version) {
  check_version(version);
  return 4 + count_width(version) + detail::lists_size(header, version);
}

Bytes encode_classic(const Header& header, FormatVersion version) {
  check_version(version);
  validate(header);
  ByteWriter out(encoded_size(header, version));
  out.raw(std::string_view("CDF", 3));
  out.u8(static_cast<std::uint8_t>(version));
  if (wide_counts(version)) {
    out.u64(0);
  } else {
    out.u32(0);
  }
  detail::encode_lists(out, header, version);
  return std::move(out).take();
}

ClassicFile decode_classic_file(ByteView bytes) {
  ByteReader in(bytes);
  constexpr std::string_view kMagic = "CDF";
  for (std::size_t i = 0; i < std::min<std::size_t>(bytes.size(), kMagic.size()); ++i) {
    if (bytes[i] != static_cast<std::uint8_t>(kMagic[i])) throw Error(ErrorCode::BadMagic, "not a classic header");
  }
  in.raw(3);
  std::uint8_t v = in.u8();
  if (v != 1 && v != 2 && v != 5) throw Error(ErrorCode::BadMagic, "unknown classic version " + std::to_string(v));

  ClassicFile file;
  file.version = static_cast<FormatVersion>(v);
  std::uint64_t numrecs = wide_counts(file.version) ? in.u64() : in.u32();
  if (numrecs != 0) throw Error(ErrorCode::Malformed, "record variables are not supported");
  file.header = detail::decode_lists(in, file.version);
  file.header_bytes = in.position();
  return file;
}

Header decode_classic(ByteView bytes) { return decode_classic_file(bytes).header; }

std::uint64_t assign_data_offsets(Header& header, std::uint64_t data_start) {
  std::uint64_t next = data_start;
  for (auto& var : header.vars) {
    var.vsize = variable_size(header, var);
    var.begin = next;
    next += var.vsize;
  }
  return next;
}

Header compute_offsets(Header header, std::uint64_t header_reserve, std::uint64_t alignment,
                       FormatVersion version) {
  if (alignment == 0 || (alignment & (alignment - 1)) != 0) {
    throw Error(ErrorCode::InvalidArgument, "alignment " + std::to_string(alignment) + " is not a power of two");
  }
  std::uint64_t need = encoded_size(header, version);
  if (header_reserve < need) {
    throw Error(ErrorCode::ReserveTooSmall, "header needs " + std::to_string(need) + " bytes, reserve is " +
                                                std::to_string(header_reserve));
  }
  assign_data_offsets(header, align_up(header_reserve, alignment));
  return header;
}

}  // namespace parahead
