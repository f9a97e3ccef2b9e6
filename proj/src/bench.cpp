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

#include "parahead/bench.hpp"

#include <cstdio>
#include <sstream>

#include "parahead/error.hpp"
#include "parahead/new_format.hpp"

namespace parahead {

namespace {

unsigned long long ull(std::uint64_t v) { return static_cast<unsigned long long>(v); }

}  // namespace

std::string csv_row(const BenchRow& row) {
  const PhaseReport& r = row.report;
  char buf[512];
  int n = std::snprintf(buf, sizeof buf, "%s,%d,%llu,%.6f,%.6f,%.6f,%.6f,%.6f,%llu,%llu,%llu,%llu,%llu,%llu,%llu",
                        std::string(to_string(row.strategy)).c_str(), row.ranks, ull(row.seed), r.times.define,
                        r.times.exchange, r.times.check, r.times.write, r.times.close, ull(r.string_comparisons),
                        ull(r.payload_comparisons), ull(r.comm_bytes), ull(r.io_bytes_written),
                        ull(r.io_bytes_read), ull(r.mem_hw_max), ull(r.mem_hw_sum));
  return std::string(buf, static_cast<std::size_t>(n));
}

NameScheme default_name_scheme(StrategyKind kind) {
  return kind == StrategyKind::NewFormat ? NameScheme::Path : NameScheme::Flat;
}

WorkloadSpec bench_workload_spec(const BenchConfig& config, StrategyKind kind, int ranks) {
  WorkloadSpec spec = scaled_spec(dataset_profile(config.dataset), config.scale, ranks, config.seed);
  spec.shared_fraction = config.shared_fraction;
  spec.conflicts = config.conflicts;
  spec.name_scheme = config.name_scheme.value_or(default_name_scheme(kind));
  return spec;
}

BenchOutcome run_bench(const BenchConfig& config, const std::function<void(const BenchRow&)>& on_row) {
  const DatasetProfile& profile = dataset_profile(config.dataset);
  RunOptions options;
  options.hash_size = config.hash_size.value_or(profile.hash_size);
  options.schedule = config.schedule;

  BenchOutcome outcome;
  for (StrategyKind kind : config.strategies) {
    for (int p : config.ranks) {
      const Workload workload = gen_workload(bench_workload_spec(config, kind, p));
      for (int trial = 0; trial < config.trials; ++trial) {
        RunResult result = execute_strategy(kind, workload, options);
        if (!result.ok()) {
          std::string what = std::string(to_string(kind)) + " P=" + std::to_string(p) + ": ";
          bool expected = false;
          try {
            result.rethrow();
          } catch (const ConsistencyError& e) {
            expected = config.conflicts.count > 0;
            what += e.what();
          } catch (const std::exception& e) {
            what += e.what();
          }
          (expected ? outcome.expected_failures : outcome.unexpected_failures).push_back(std::move(what));
          continue;
        }
        BenchRow row{kind, p, config.seed, result.summary()};
        if (on_row) on_row(row);
        outcome.rows.push_back(std::move(row));
      }
    }
  }
  return outcome;
}

std::string inspect(ByteSource& source) {
  std::ostringstream out;
  if (detect_format(source) == FileFormat::Classic) {
    Bytes all = source.read(0, source.size());
    ClassicFile file = decode_classic_file(all);
    out << "format: classic CDF-" << static_cast<int>(file.version) << "\n"
        << "header bytes: " << file.header_bytes << "\n"
        << "dimensions: " << file.header.dims.size() << "\n"
        << "global attributes: " << file.header.global_atts.size() << "\n"
        << "variables: " << file.header.vars.size() << "\n";
  } else {
    NewFormatFile file(source);
    const IndexTable& index = file.index();
    out << "format: new (indexed blocks)\n"
        << "blocks: " << index.entries.size() << "\n"
        << "header reserve: " << index.header_reserve << "\n";
    for (const auto& e : index.entries) {
      out << "  '" << e.block_path << "' offset=" << e.offset << " size=" << e.size << " dims=" << e.n_dims
          << " vars=" << e.n_vars << " atts=" << e.n_atts << "\n";
    }
    auto totals = file.totals();
    out << "total dimensions: " << totals[kind_index(ObjectKind::Dimension)] << "\n"
        << "total global attributes: " << totals[kind_index(ObjectKind::Attribute)] << "\n"
        << "total variables: " << totals[kind_index(ObjectKind::Variable)] << "\n"
        << "bytes read: " << file.bytes_read() << "\n";
    return out.str();
  }
  out << "bytes read: " << source.bytes_read() << "\n";
  return out.str();
}

namespace {

FileImage to_new(const ClassicFile& classic) {
  std::vector<MetadataBlock> blocks{MetadataBlock{std::string(kRootBlock), classic.header}};
  IndexTable index = layout_blocks(blocks);
  FileImage image;
  image.write(0, 0, encode_index_table(index), "index");
  image.write(0, index.entries.front().offset, encode_block(blocks.front()), "");
  return image;
}

FileImage to_classic(NewFormatFile& file, FormatVersion version) {
  Header flat;
  auto flatten = [](const std::string& path, const std::string& local) {
    std::string name = join_full_name(path, local);
    if (name.size() > kMaxFlatNameLength) {
      throw Error(ErrorCode::NameWidthOverflow, "flattened name '" + name.substr(0, 40) + "...' has " +
                                                    std::to_string(name.size()) + " characters");
    }
    return name;
  };
  for (const auto& block : read_full_header(file)) {
    const std::uint64_t dim_base = flat.dims.size();
    for (const auto& d : block.content.dims) flat.dims.push_back(DimensionDef{flatten(block.block_path, d.name), d.length});
    for (const auto& a : block.content.global_atts) {
      flat.global_atts.push_back(AttributeDef{flatten(block.block_path, a.name), a.values});
    }
    for (const auto& v : block.content.vars) {
      VariableDef var = v;
      var.name = flatten(block.block_path, v.name);
      for (auto& id : var.dim_ids) id += dim_base;
      flat.vars.push_back(std::move(var));
    }
  }
  validate(flat);
  return FileImage(encode_classic(flat, version));
}

}  // namespace

FileImage convert(const FileImage& input, FileFormat target, FormatVersion classic_version) {
  ImageSource probe(input);
  const FileFormat from = detect_format(probe);
  if (from == target) throw Error(ErrorCode::InvalidArgument, "input is already in the target format");
  if (target == FileFormat::New) return to_new(decode_classic_file(input.bytes()));
  NewFormatFile file = open_new_format(input);
  return to_classic(file, classic_version);
}

VerifyReport verify_strategies(const Workload& workload, const RunOptions& options) {
  VerifyReport report;
  std::optional<LogicalSet> reference;
  std::optional<Bytes> classic_bytes;
  for (StrategyKind kind : kAllStrategies) {
    const std::string name(to_string(kind));
    RunResult result = execute_strategy(kind, workload, options);
    if (!result.ok()) {
      try {
        result.rethrow();
      } catch (const std::exception& e) {
        report.ok = false;
        report.messages.push_back(name + " failed: " + e.what());
      }
      continue;
    }
    LogicalSet set = read_logical_set(*result.image);
    const std::size_t objects = set.size();
    bool same = true;
    if (!reference) {
      reference = std::move(set);
    } else if (set != *reference) {
      same = false;
      report.messages.push_back(name + " stores a different object set");
    }
    if (writes_classic(kind)) {
      if (!classic_bytes) {
        classic_bytes = result.image->bytes();
      } else if (result.image->bytes() != *classic_bytes) {
        same = false;
        report.messages.push_back(name + " wrote a classic file that differs from the first classic strategy");
      }
    }
    if (same) report.messages.push_back(name + " ok: " + std::to_string(objects) + " objects");
    report.ok = report.ok && same;
  }
  return report;
}

}  // namespace parahead
