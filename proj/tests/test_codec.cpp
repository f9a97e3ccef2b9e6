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

#include <gtest/gtest.h>

#include <random>

#include "parahead/bytes.hpp"
#include "parahead/classic_codec.hpp"
#include "parahead/error.hpp"
#include "parahead/new_format.hpp"
#include "parahead/object.hpp"
#include "support/random_metadata.hpp"

using namespace parahead;

namespace {

Bytes from_hex(std::string_view hex) {
  Bytes out;
  for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>(std::stoul(std::string(hex.substr(i, 2)), nullptr, 16)));
  }
  return out;
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

// Written with scipy.io.netcdf_file: dims x=3, y=2; global "history";
// count(int, x), flag(short, x), temp(float, y x) with "units".
constexpr std::string_view kScipyCdf1 =
    "43444601000000000000000a000000020000000178000000000000030000000179000000000000020000000c000000010000000768"
    "6973746f727900000000020000000763726561746564000000000b0000000300000005636f756e74000000000000010000000000"
    "00000000000000000000040000000c000000e000000004666c61670000000100000000000000000000000000000003000000080000"
    "00ec0000000474656d700000000200000001000000000000000c0000000100000005756e69747300000000000002000000014b0000"
    "000000000500000018000000f4";
constexpr std::string_view kScipyCdf2 =
    "43444602000000000000000a000000020000000178000000000000030000000179000000000000020000000c000000010000000768"
    "6973746f727900000000020000000763726561746564000000000b0000000300000005636f756e74000000000000010000000000"
    "00000000000000000000040000000c00000000000000ec00000004666c616700000001000000000000000000000000000000030000"
    "000800000000000000f80000000474656d700000000200000001000000000000000c0000000100000005756e697473000000000000"
    "02000000014b00000000000005000000180000000000000100";

Header scipy_header(FormatVersion v) {
  Header h;
  h.dims = {{"x", 3}, {"y", 2}};
  h.global_atts = {{"history", std::string("created")}};
  h.vars.push_back(VariableDef{"count", {0}, TypeTag::Int, {}, 0, 0});
  h.vars.push_back(VariableDef{"flag", {0}, TypeTag::Short, {}, 0, 0});
  h.vars.push_back(VariableDef{"temp", {1, 0}, TypeTag::Float, {{"units", std::string("K")}}, 0, 0});
  const std::uint64_t reserve = encoded_size(h, v);
  return compute_offsets(std::move(h), reserve, 4, v);
}

}  // namespace

TEST(Bytes, BigEndianAndPadding) {
  ByteWriter w;
  w.u32(0x01020304);
  w.u64(0x0a0b0c0d0e0f1011ULL);
  w.raw(std::string_view("abc"));
  w.pad_to_4();
  EXPECT_EQ(w.bytes(), from_hex("010203040a0b0c0d0e0f101161626300"));
  ByteReader r(w.bytes());
  EXPECT_EQ(r.u32(), 0x01020304u);
  EXPECT_EQ(r.u64(), 0x0a0b0c0d0e0f1011ULL);
  EXPECT_EQ(r.string(3), "abc");
  r.skip_padding_to_4();
  EXPECT_TRUE(r.at_end());
  EXPECT_EQ(code_of([&] { r.u8(); }), ErrorCode::Truncated);
}

TEST(Bytes, NonZeroPaddingIsMalformed) {
  Bytes b = from_hex("6101");
  b.resize(4, 0x7f);
  ByteReader r(b);
  r.string(1);
  EXPECT_EQ(code_of([&] { r.skip_padding_to_4(); }), ErrorCode::Malformed);
}

TEST(Bytes, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a64(std::string_view("")), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64(std::string_view("a")), 0xaf63dc4c8601ec8cULL);
}

TEST(ClassicCodec, MatchesScipyCdf1) {
  Bytes enc = encode_classic(scipy_header(FormatVersion::Cdf1), FormatVersion::Cdf1);
  EXPECT_EQ(enc, from_hex(kScipyCdf1));
  EXPECT_EQ(enc.size(), 224u);
}

TEST(ClassicCodec, MatchesScipyCdf2) {
  Bytes enc = encode_classic(scipy_header(FormatVersion::Cdf2), FormatVersion::Cdf2);
  EXPECT_EQ(enc, from_hex(kScipyCdf2));
}

TEST(ClassicCodec, DecodesScipyFileWithDataSection) {
  Bytes file = from_hex(kScipyCdf1);
  file.resize(268, 0);
  ClassicFile cf = decode_classic_file(file);
  EXPECT_EQ(cf.version, FormatVersion::Cdf1);
  EXPECT_EQ(cf.header_bytes, 224u);
  EXPECT_EQ(cf.header, scipy_header(FormatVersion::Cdf1));
  EXPECT_EQ(cf.header.vars[2].begin, 244u);
  EXPECT_EQ(cf.header.vars[2].vsize, 24u);
}

TEST(ClassicCodec, EmptyHeaderCdf5) {
  Bytes expect = from_hex("43444605" "0000000000000000");
  for (int i = 0; i < 3; ++i) {
    Bytes absent = from_hex("00000000" "0000000000000000");
    expect.insert(expect.end(), absent.begin(), absent.end());
  }
  EXPECT_EQ(encode_classic(Header{}), expect);
  EXPECT_EQ(decode_classic(expect), Header{});
}

TEST(ClassicCodec, VsizeOfIntOverTen) {
  Header h;
  h.dims = {{"x", 10}};
  h.vars.push_back(VariableDef{"v", {0}, TypeTag::Int, {}, 0, 0});
  h = compute_offsets(h, 512, 4);
  EXPECT_EQ(h.vars[0].vsize, 40u);
  Header back = decode_classic(encode_classic(h));
  EXPECT_EQ(back.vars[0].vsize, 40u);
}

TEST(ClassicCodec, BadMagicAndTruncated) {
  Bytes enc = encode_classic(scipy_header(FormatVersion::Cdf5));
  Bytes bad = enc;
  bad[0] = 'X';
  EXPECT_EQ(code_of([&] { decode_classic(bad); }), ErrorCode::BadMagic);
  Bytes half(enc.begin(), enc.begin() + static_cast<std::ptrdiff_t>(enc.size() / 2));
  EXPECT_EQ(code_of([&] { decode_classic(half); }), ErrorCode::Truncated);
}

TEST(ClassicCodec, Int64NeedsCdf5) {
  Header h;
  h.global_atts = {{"big", std::vector<std::int64_t>{1}}};
  EXPECT_EQ(code_of([&] { encode_classic(h, FormatVersion::Cdf2); }), ErrorCode::UnrepresentableValue);
  EXPECT_EQ(decode_classic(encode_classic(h)), h);
}

TEST(ClassicCodec, RandomRoundTripsAllVersions) {
  std::mt19937_64 rng(11);
  for (auto v : {FormatVersion::Cdf1, FormatVersion::Cdf2, FormatVersion::Cdf5}) {
    for (int i = 0; i < 200; ++i) {
      Header h = fixtures::random_header(rng, v);
      Bytes enc = encode_classic(h, v);
      ASSERT_EQ(enc.size(), encoded_size(h, v));
      Header back = decode_classic(enc);
      ASSERT_EQ(back, h);
      ASSERT_EQ(encode_classic(back, v), enc);
    }
  }
}

TEST(ComputeOffsets, HandLayout) {
  Header h;
  h.dims = {{"n", 10}};
  h.vars.push_back(VariableDef{"a", {0}, TypeTag::Int, {}, 0, 0});
  h.vars.push_back(VariableDef{"b", {0}, TypeTag::Int, {}, 0, 0});
  h = compute_offsets(h, 512, 4);
  EXPECT_EQ(h.vars[0].begin, 512u);
  EXPECT_EQ(h.vars[1].begin, 552u);
  EXPECT_TRUE(offsets_monotonic(h));
}

TEST(ComputeOffsets, ShortRoundsUp) {
  Header h;
  h.dims = {{"r", 3}, {"c", 5}};
  h.vars.push_back(VariableDef{"s", {0, 1}, TypeTag::Short, {}, 0, 0});
  EXPECT_EQ(compute_offsets(h, 1024, 4).vars[0].vsize, 32u);
}

TEST(ComputeOffsets, EmptyVarsUnchangedAndReserveChecked) {
  Header h;
  h.dims = {{"x", 2}};
  EXPECT_EQ(compute_offsets(h, 512, 4), h);
  h.vars.push_back(VariableDef{"v", {0}, TypeTag::Int, {}, 0, 0});
  EXPECT_EQ(code_of([&] { compute_offsets(h, 8, 4); }), ErrorCode::ReserveTooSmall);
}

TEST(ClassicCodec, ValidateRejects) {
  Header h;
  h.dims = {{"x", 2}, {"x", 3}};
  EXPECT_EQ(code_of([&] { validate(h); }), ErrorCode::DuplicateName);
  h.dims = {{"x", 2}};
  h.vars.push_back(VariableDef{"v", {4}, TypeTag::Int, {}, 0, 0});
  EXPECT_EQ(code_of([&] { validate(h); }), ErrorCode::DanglingDimRef);
}

TEST(IndexTable, EmptyAndSorted) {
  IndexTable empty;
  Bytes e = encode_index_table(empty);
  EXPECT_EQ(e.size(), kIndexPrefixSize);
  EXPECT_EQ(decode_index_table(e), empty);

  IndexTable t;
  t.entries = {{"zeta", 1300, 10, 1, 0, 0}, {"alpha", 1100, 50, 0, 2, 0}, {"mid", 1200, 20, 0, 0, 1}};
  t.header_reserve = 1400;
  IndexTable back = decode_index_table(encode_index_table(t));
  ASSERT_EQ(back.entries.size(), 3u);
  EXPECT_EQ(back.entries[0].block_path, "alpha");
  EXPECT_EQ(back.entries[1].block_path, "mid");
  EXPECT_EQ(back.entries[2].block_path, "zeta");
  EXPECT_EQ(*back.find("mid"), t.entries[2]);
}

TEST(IndexTable, RejectsOverlapAndClassicMagic) {
  IndexTable t;
  t.entries = {{"a", 1000, 50, 0, 0, 0}, {"b", 1020, 10, 0, 0, 0}};
  t.header_reserve = 2000;
  EXPECT_EQ(code_of([&] { decode_index_table(encode_index_table(t)); }), ErrorCode::OverlappingBlocks);
  EXPECT_EQ(code_of([&] { decode_index_table(encode_classic(Header{})); }), ErrorCode::BadMagic);
}

TEST(MetadataBlock, SizeOfOneDimBlock) {
  MetadataBlock b{"grid", {}};
  b.content.dims = {{"x", 7}};
  // path record: u64 length + "grid"; dim list: tag, count, (u64 len, "x" padded, u64 length);
  // two absent lists of tag + count.
  const std::uint64_t expect = (8 + 4) + (4 + 8 + 8 + 4 + 8) + 2 * (4 + 8);
  Bytes enc = encode_block(b);
  EXPECT_EQ(enc.size(), expect);
  EXPECT_EQ(block_size(b), expect);
  EXPECT_EQ(decode_block(enc), b);
}

TEST(MetadataBlock, DanglingDimRef) {
  MetadataBlock b{"g", {}};
  b.content.vars.push_back(VariableDef{"v", {0}, TypeTag::Int, {}, 0, 0});
  EXPECT_EQ(code_of([&] { decode_block(encode_block(b)); }), ErrorCode::DanglingDimRef);
}

TEST(Layout, SingleAndTwoBlocks) {
  MetadataBlock a{"a", {}};
  a.content.dims = {{"x", 1}};
  MetadataBlock b{"b", {}};
  b.content.dims = {{"yy", 2}};
  std::vector<MetadataBlock> one{a};
  IndexTable t1 = layout_blocks(one);
  const std::uint64_t idx1 = index_table_size(t1);
  EXPECT_EQ(t1.entries[0].offset, idx1);
  EXPECT_EQ(t1.header_reserve, idx1 + block_size(a));

  std::vector<MetadataBlock> two{b, a};
  IndexTable t2 = layout_blocks(two);
  ASSERT_EQ(t2.entries.size(), 2u);
  EXPECT_EQ(t2.entries[0].block_path, "a");
  EXPECT_EQ(t2.entries[1].offset, t2.entries[0].offset + align_up(t2.entries[0].size, 4));

  IndexTable t0 = layout_blocks(std::vector<MetadataBlock>{});
  EXPECT_EQ(t0.header_reserve, align_up(kIndexPrefixSize, 4));
}

TEST(NewFormat, FullImageRoundTrip) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    std::vector<MetadataBlock> blocks = fixtures::random_blocks(rng);
    IndexTable t = layout_blocks(blocks);
    Bytes image = encode_index_table(t);
    image.resize(t.header_reserve, 0);
    for (const auto& blk : blocks) {
      Bytes enc = encode_block(blk);
      const IndexEntry* e = t.find(blk.block_path);
      ASSERT_NE(e, nullptr);
      ASSERT_EQ(e->size, enc.size());
      std::copy(enc.begin(), enc.end(), image.begin() + static_cast<std::ptrdiff_t>(e->offset));
    }
    IndexTable back = decode_index_table(image);
    ASSERT_EQ(back, t);
    for (const auto& e : back.entries) {
      MetadataBlock blk = decode_block(ByteView(image).subspan(e.offset, e.size));
      EXPECT_EQ(blk.content.dims.size(), e.n_dims);
      EXPECT_EQ(blk.content.vars.size(), e.n_vars);
      EXPECT_EQ(blk.content.global_atts.size(), e.n_atts);
      auto it = std::find_if(blocks.begin(), blocks.end(), [&](auto& b) { return b.block_path == e.block_path; });
      EXPECT_EQ(blk, *it);
    }
  }
}

TEST(NewFormat, SplitAndJoinNames) {
  auto s = split_full_name("b00001/sub/v000002");
  EXPECT_EQ(s.block_path, "b00001/sub");
  EXPECT_EQ(s.local_name, "v000002");
  EXPECT_EQ(split_full_name("plain").block_path, kRootBlock);
  EXPECT_EQ(join_full_name("", "plain"), "plain");
  EXPECT_EQ(join_full_name("a/b", "c"), "a/b/c");
  EXPECT_EQ(code_of([] { split_full_name("/x"); }), ErrorCode::InvalidName);
  EXPECT_EQ(code_of([] { split_full_name("a/"); }), ErrorCode::InvalidName);
}

TEST(ObjectRecord, RoundTripAndScan) {
  std::vector<ObjectDef> defs{make_dim("g/x", 4), make_att("g/title", std::string("t")),
                              make_var("g/v", TypeTag::Double, {"g/x"}, {{"units", std::string("m")}})};
  Bytes buf = serialize_objects(defs);
  EXPECT_EQ(deserialize_objects(buf), defs);
  auto spans = scan_records(buf);
  ASSERT_EQ(spans.size(), 3u);
  EXPECT_EQ(spans[2].kind, ObjectKind::Variable);
  EXPECT_EQ(spans[2].full_name, "g/v");
  EXPECT_EQ(serialize_object(defs[2]), serialize_object(defs[2]));
}

TEST(ObjectRecord, AssembleDisassemble) {
  std::vector<ObjectDef> defs{make_dim("g/x", 4), make_var("g/v", TypeTag::Int, {"g/x"})};
  Header h = assemble_header(defs, "g");
  EXPECT_EQ(h.dims[0].name, "x");
  EXPECT_EQ(h.vars[0].dim_ids, std::vector<std::uint64_t>{0});
  EXPECT_EQ(disassemble_header(h, "g"), defs);
  std::vector<ObjectDef> dangling{make_var("v", TypeTag::Int, {"nope"})};
  EXPECT_EQ(code_of([&] { assemble_header(dangling); }), ErrorCode::DanglingDimRef);
}
