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

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "parahead/bench.hpp"
#include "parahead/error.hpp"

using namespace parahead;

namespace {

std::vector<StrategyKind> parse_strategies(const std::string& text) {
  if (text == "all") return {kAllStrategies.begin(), kAllStrategies.end()};
  std::vector<StrategyKind> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto k = strategy_from_string(item);
    if (!k) throw CLI::ValidationError("--strategies", "unknown strategy '" + item + "'");
    out.push_back(*k);
  }
  return out;
}

std::vector<int> parse_ranks(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int p = 0;
    try {
      p = std::stoi(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--ranks", "'" + item + "' is not a rank count");
    }
    if (p < 1) throw CLI::ValidationError("--ranks", "rank counts must be positive");
    out.push_back(p);
  }
  if (out.empty()) throw CLI::ValidationError("--ranks", "no rank counts given");
  return out;
}

// COUNT or COUNT:MODE.
ConflictInjection parse_conflicts(const std::string& text) {
  ConflictInjection inj;
  if (text.empty()) return inj;
  auto colon = text.find(':');
  try {
    inj.count = static_cast<std::uint32_t>(std::stoul(text.substr(0, colon)));
  } catch (const std::exception&) {
    throw CLI::ValidationError("--inject-conflicts", "expected COUNT or COUNT:MODE");
  }
  if (colon != std::string::npos) {
    std::string mode = text.substr(colon + 1);
    if (mode == "type_mismatch") {
      inj.mode = ConflictMode::TypeMismatch;
    } else if (mode == "dim_mismatch") {
      inj.mode = ConflictMode::DimMismatch;
    } else {
      throw CLI::ValidationError("--inject-conflicts", "mode must be type_mismatch or dim_mismatch");
    }
  }
  return inj;
}

std::optional<NameScheme> parse_scheme(const std::string& text) {
  if (text == "auto") return std::nullopt;
  if (text == "path") return NameScheme::Path;
  return NameScheme::Flat;
}

struct WorkloadFlags {
  std::string dataset = "98M";
  double scale = 0.01;
  std::optional<std::size_t> hash_size;
  double shared_fraction = 0.0;
  std::string conflicts;
  std::uint64_t seed = 0;
  std::string scheme = "auto";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--dataset", dataset, "Dataset profile to scale")->check(CLI::IsMember({"98M", "1G"}));
    cmd->add_option("--scale", scale, "Fraction of the dataset's object counts")->check(CLI::PositiveNumber);
    cmd->add_option("--hash-size", hash_size, "Hash table slots (default: 16384 for 98M, 1048576 for 1G)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--shared-fraction", shared_fraction, "Fraction of objects defined on every rank")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--inject-conflicts", conflicts, "COUNT[:type_mismatch|dim_mismatch]");
    cmd->add_option("--seed", seed, "Workload seed");
    cmd->add_option("--name-scheme", scheme, "auto, path or flat")->check(CLI::IsMember({"auto", "path", "flat"}));
  }

  BenchConfig config() const {
    BenchConfig c;
    c.dataset = dataset;
    c.scale = scale;
    c.hash_size = hash_size;
    c.shared_fraction = shared_fraction;
    c.conflicts = parse_conflicts(conflicts);
    c.seed = seed;
    c.name_scheme = parse_scheme(scheme);
    c.schedule = schedule_from_env();
    return c;
  }
};

FileFormat parse_format(const std::string& f) { return f == "new" ? FileFormat::New : FileFormat::Classic; }

RunOptions run_options(const BenchConfig& c) {
  RunOptions o;
  o.hash_size = c.hash_size.value_or(dataset_profile(c.dataset).hash_size);
  o.schedule = c.schedule;
  return o;
}

int cmd_bench(const WorkloadFlags& flags, const std::string& strategies, const std::string& ranks,
              const std::string& out_path, int trials) {
  BenchConfig config = flags.config();
  config.strategies = parse_strategies(strategies);
  config.ranks = parse_ranks(ranks);
  config.trials = trials;

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw Error(ErrorCode::Io, "cannot open '" + out_path + "'");
    out = &file;
  }
  *out << kCsvHeader << "\n";
  BenchOutcome outcome = run_bench(config, [&](const BenchRow& row) { *out << csv_row(row) << "\n" << std::flush; });
  for (const auto& e : outcome.expected_failures) std::cerr << "consistency error (injected): " << e << "\n";
  for (const auto& e : outcome.unexpected_failures) std::cerr << "error: " << e << "\n";
  return outcome.unexpected_failures.empty() ? 0 : 1;
}

int cmd_gen(const WorkloadFlags& flags, int ranks, const std::string& format, const std::string& out_path) {
  BenchConfig config = flags.config();
  const StrategyKind kind = format == "new" ? StrategyKind::NewFormat : StrategyKind::LibBaselineHash;
  const Workload workload = gen_workload(bench_workload_spec(config, kind, ranks));
  RunResult result = run_strategy(kind, workload, run_options(config));
  result.image->save(out_path);
  std::size_t objects = 0;
  for (const auto& defs : workload.per_rank) objects += defs.size();
  std::cout << "wrote " << out_path << ": " << result.image->size() << " bytes, " << objects
            << " definitions over " << ranks << " ranks (" << to_string(kind) << ")\n";
  return 0;
}

int cmd_inspect(const std::string& path) {
  DiskSource source(path);
  std::cout << inspect(source);
  return 0;
}

int cmd_convert(const std::string& in, const std::string& out, const std::string& format, int version) {
  FileImage input = FileImage::load(in);
  FileImage output = convert(input, parse_format(format), static_cast<FormatVersion>(version));
  output.save(out);
  std::cout << "wrote " << out << ": " << output.size() << " bytes\n";
  return 0;
}

int cmd_verify(const WorkloadFlags& flags, const std::string& ranks) {
  BenchConfig config = flags.config();
  // One workload for every strategy so the files are comparable.
  if (!config.name_scheme) config.name_scheme = NameScheme::Path;
  bool ok = true;
  for (int p : parse_ranks(ranks)) {
    const Workload workload = gen_workload(bench_workload_spec(config, StrategyKind::NewFormat, p));
    VerifyReport report = verify_strategies(workload, run_options(config));
    for (const auto& m : report.messages) std::cout << "P=" << p << " " << m << "\n";
    ok = ok && report.ok;
  }
  std::cout << (ok ? "verify: all strategies agree\n" : "verify: MISMATCH\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parahead: parallel header metadata strategies"};
  app.require_subcommand(1);

  WorkloadFlags bench_flags;
  std::string strategies = "all";
  std::string bench_ranks = "1,2,4,8,16";
  std::string bench_out;
  int trials = 1;
  auto* bench = app.add_subcommand("bench", "Run strategies across rank counts and print CSV");
  bench_flags.add_to(bench);
  bench->add_option("--strategies", strategies, "all or a comma list of strategy names");
  bench->add_option("--ranks", bench_ranks, "Comma list of rank counts");
  bench->add_option("--out", bench_out, "CSV output file (default: stdout)");
  bench->add_option("--trials", trials, "Runs per strategy and rank count")->check(CLI::PositiveNumber);

  WorkloadFlags gen_flags;
  int gen_ranks = 4;
  std::string gen_format = "new";
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Generate a workload and write it as a file");
  gen_flags.add_to(gen);
  gen->add_option("--ranks", gen_ranks, "Rank count")->check(CLI::PositiveNumber);
  gen->add_option("--format", gen_format, "classic or new")->check(CLI::IsMember({"classic", "new"}));
  gen->add_option("--out", gen_out, "Output file")->required();

  std::string inspect_path;
  auto* insp = app.add_subcommand("inspect", "Describe a file from its header");
  insp->add_option("path", inspect_path, "File to inspect")->required()->check(CLI::ExistingFile);

  std::string conv_in, conv_out, conv_format;
  int conv_version = 5;
  auto* conv = app.add_subcommand("convert", "Convert between the classic and the new format");
  conv->add_option("input", conv_in, "Input file")->required()->check(CLI::ExistingFile);
  conv->add_option("output", conv_out, "Output file")->required();
  conv->add_option("--format", conv_format, "Target format: classic or new")
      ->required()
      ->check(CLI::IsMember({"classic", "new"}));
  conv->add_option("--cdf-version", conv_version, "Classic output version")->check(CLI::IsMember({1, 2, 5}));

  WorkloadFlags verify_flags;
  std::string verify_ranks = "1,2,4,8";
  auto* verify = app.add_subcommand("verify", "Check that all strategies write the same metadata");
  verify_flags.add_to(verify);
  verify->add_option("--ranks", verify_ranks, "Comma list of rank counts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench) return cmd_bench(bench_flags, strategies, bench_ranks, bench_out, trials);
    if (*gen) return cmd_gen(gen_flags, gen_ranks, gen_format, gen_out);
    if (*insp) return cmd_inspect(inspect_path);
    if (*conv) return cmd_convert(conv_in, conv_out, conv_format, conv_version);
    if (*verify) return cmd_verify(verify_flags, verify_ranks);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
