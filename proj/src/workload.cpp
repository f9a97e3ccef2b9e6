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

#include "parahead/workload.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "parahead/error.hpp"

namespace parahead {

namespace {

constexpr TypeTag kVarTypes[] = {TypeTag::Byte, TypeTag::Char, TypeTag::Short,
                                 TypeTag::Int, TypeTag::Float, TypeTag::Double};
constexpr std::uint64_t kMaxDimLength = 64;

template <typename... Args>
std::string format(const char* fmt, Args... args) {
  char buf[96];
  int n = std::snprintf(buf, sizeof buf, fmt, args...);
  return std::string(buf, static_cast<std::size_t>(n));
}

struct Names {
  NameScheme scheme;

  std::string shared_dim(std::uint64_t i) const {
    return format(scheme == NameScheme::Path ? "shared/d%06llu" : "shared_d%06llu", ull(i));
  }
  std::string shared_var(std::uint64_t i) const {
    return format(scheme == NameScheme::Path ? "shared/v%06llu" : "shared_v%06llu", ull(i));
  }
  std::string shared_att() const { return scheme == NameScheme::Path ? "shared/history" : "shared_history"; }
  std::string dim(int rank, std::uint64_t i) const {
    return format(scheme == NameScheme::Path ? "b%05d/d%06llu" : "d%05d_%06llu", rank, ull(i));
  }
  std::string var(int rank, std::uint64_t i) const {
    return format(scheme == NameScheme::Path ? "b%05d/v%06llu" : "v%05d_%06llu", rank, ull(i));
  }
  std::string att(int rank) const { return format(scheme == NameScheme::Path ? "b%05d/source" : "source%05d", rank); }
  std::string conflict_dim(std::uint64_t i) const {
    return format(scheme == NameScheme::Path ? "c/d%06llu" : "c_d%06llu", ull(i));
  }
  std::string conflict_var(std::uint64_t i) const {
    return format(scheme == NameScheme::Path ? "c/v%06llu" : "c_v%06llu", ull(i));
  }

  static unsigned long long ull(std::uint64_t v) { return static_cast<unsigned long long>(v); }
};

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
  return std::mt19937_64(seq);
}

std::uint64_t uniform(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

std::string text(std::mt19937_64& rng, std::size_t n) {
  static constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz_ /";
  std::string s(n, ' ');
  for (auto& c : s) c = kAlphabet[uniform(rng, 0, sizeof kAlphabet - 2)];
  return s;
}

// Appends `count` dimensions and `var_count` variables that use them.
void add_group(std::vector<ObjectDef>& out, std::mt19937_64& rng, const WorkloadSpec& spec,
               const std::vector<std::string>& dim_names, const std::vector<std::string>& var_names) {
  for (const auto& name : dim_names) out.push_back(make_dim(name, uniform(rng, 1, kMaxDimLength)));
  for (const auto& name : var_names) {
    TypeTag type = kVarTypes[uniform(rng, 0, std::size(kVarTypes) - 1)];
    std::vector<std::string> dims;
    if (!dim_names.empty() && spec.max_dims_per_var > 0) {
      auto nd = uniform(rng, 1, spec.max_dims_per_var);
      for (std::uint64_t d = 0; d < nd; ++d) dims.push_back(dim_names[uniform(rng, 0, dim_names.size() - 1)]);
    }
    std::vector<AttributeDef> atts;
    if (spec.attr_bytes_per_var > 0) atts.push_back(AttributeDef{"units", text(rng, spec.attr_bytes_per_var)});
    out.push_back(make_var(name, type, std::move(dims), std::move(atts)));
  }
}

}  // namespace

std::string_view to_string(NameScheme scheme) { return scheme == NameScheme::Path ? "path" : "flat"; }

std::string_view to_string(ConflictMode mode) {
  return mode == ConflictMode::TypeMismatch ? "type_mismatch" : "dim_mismatch";
}

std::vector<std::uint64_t> partition_counts(std::uint64_t total, int ranks, bool strict) {
  if (ranks < 1) throw Error(ErrorCode::InvalidArgument, "rank count must be positive");
  const auto p = static_cast<std::uint64_t>(ranks);
  if (total % p != 0 && (strict || total < p)) {
    throw Error(ErrorCode::IndivisiblePartition,
                std::to_string(total) + " objects do not split evenly over " + std::to_string(ranks) + " ranks");
  }
  std::vector<std::uint64_t> counts(p, total / p);
  for (std::uint64_t r = 0; r < total % p; ++r) ++counts[r];
  return counts;
}

Workload gen_workload(const WorkloadSpec& spec) {
  if (spec.shared_fraction < 0.0 || spec.shared_fraction > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "shared fraction must lie in [0, 1]");
  }
  if (spec.conflicts.count > 0 && spec.ranks < 2) {
    throw Error(ErrorCode::InvalidArgument, "conflict injection needs at least two ranks");
  }
  const Names names{spec.name_scheme};
  std::uint64_t shared_vars = std::llround(static_cast<double>(spec.total_vars) * spec.shared_fraction);
  std::uint64_t shared_dims = std::llround(static_cast<double>(spec.total_dims) * spec.shared_fraction);
  if (shared_vars > 0 && shared_dims == 0 && spec.total_dims > 0) shared_dims = 1;

  auto counts_for = [&](std::uint64_t total) {
    if (total == 0) return std::vector<std::uint64_t>(spec.ranks, 0);
    return partition_counts(total, spec.ranks, spec.strict_partition);
  };
  const auto var_counts = counts_for(spec.total_vars - shared_vars);
  const auto dim_counts = counts_for(spec.total_dims - shared_dims);

  Workload w;
  w.spec = spec;
  w.per_rank.resize(spec.ranks);

  std::vector<ObjectDef> shared;
  if (shared_vars + shared_dims > 0) {
    auto rng = stream(spec.seed, ~std::uint64_t{0});
    std::vector<std::string> dn, vn;
    for (std::uint64_t i = 0; i < shared_dims; ++i) dn.push_back(names.shared_dim(i));
    for (std::uint64_t i = 0; i < shared_vars; ++i) vn.push_back(names.shared_var(i));
    add_group(shared, rng, spec, dn, vn);
    shared.push_back(make_att(names.shared_att(), "seed " + std::to_string(spec.seed)));
  }

  for (int r = 0; r < spec.ranks; ++r) {
    auto& out = w.per_rank[r];
    out = shared;
    auto rng = stream(spec.seed, static_cast<std::uint64_t>(r));
    std::vector<std::string> dn, vn;
    for (std::uint64_t i = 0; i < dim_counts[r]; ++i) dn.push_back(names.dim(r, i));
    for (std::uint64_t i = 0; i < var_counts[r]; ++i) vn.push_back(names.var(r, i));
    add_group(out, rng, spec, dn, vn);
    out.push_back(make_att(names.att(r), "rank " + std::to_string(r)));
  }

  auto rng = stream(spec.seed, 0xC0FFEEULL);
  for (std::uint32_t i = 0; i < spec.conflicts.count; ++i) {
    const int r = static_cast<int>(uniform(rng, 0, static_cast<std::uint64_t>(spec.ranks - 2)));
    const std::string dim = names.conflict_dim(i);
    const std::string var = names.conflict_var(i);
    const auto length = uniform(rng, 1, kMaxDimLength);
    const auto t = uniform(rng, 0, std::size(kVarTypes) - 1);
    const TypeTag type = kVarTypes[t];
    ObjectDef first = make_var(var, type, {dim});
    ObjectDef second = first;
    auto& payload = std::get<VarPayload>(second.payload);
    if (spec.conflicts.mode == ConflictMode::TypeMismatch) {
      payload.type = kVarTypes[(t + 1) % std::size(kVarTypes)];
    } else {
      payload.dims.push_back(dim);
    }
    w.per_rank[r].push_back(make_dim(dim, length));
    w.per_rank[r].push_back(std::move(first));
    w.per_rank[r + 1].push_back(make_dim(dim, length));
    w.per_rank[r + 1].push_back(std::move(second));
    w.injected.push_back(var);
  }
  return w;
}

const DatasetProfile& dataset_profile(std::string_view name) {
  if (name == kDataset98M.name) return kDataset98M;
  if (name == kDataset1G.name) return kDataset1G;
  throw Error(ErrorCode::InvalidArgument, "unknown dataset '" + std::string(name) + "' (expected 98M or 1G)");
}

WorkloadSpec scaled_spec(const DatasetProfile& profile, double scale, int ranks, std::uint64_t seed) {
  if (!(scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale must be positive");
  WorkloadSpec spec;
  spec.total_vars = std::llround(static_cast<double>(profile.vars) * scale);
  spec.total_dims = std::llround(static_cast<double>(profile.dims) * scale);
  spec.ranks = ranks;
  spec.seed = seed;
  return spec;
}

}  // namespace parahead
