// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtibench/error.hpp"

namespace dtibench {

inline constexpr std::string_view kVersion = "0.1.0";

/// Every configuration problem found, reported together.
class ConfigErrors : public Error {
 public:
  explicit ConfigErrors(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Typed reads from a flat JSON run configuration. Keys use underscores.
/// Each read value, defaults included, is recorded in resolved(); problems
/// accumulate until check().
class ConfigReader {
 public:
  explicit ConfigReader(nlohmann::json config);

  std::string text(std::string_view key, std::optional<std::string> fallback = std::nullopt);
  std::int64_t integer(std::string_view key, std::optional<std::int64_t> fallback = std::nullopt,
                       std::int64_t min = 0);
  double real(std::string_view key, std::optional<double> fallback = std::nullopt);
  bool flag(std::string_view key, bool fallback = false);
  /// Accepts a JSON array or a comma-separated string.
  std::vector<std::string> texts(std::string_view key, std::optional<std::vector<std::string>> fallback = std::nullopt);
  /// As texts(), plus "a..b" for the integer range a, a+1, ..., b.
  std::vector<double> reals(std::string_view key, std::optional<std::vector<double>> fallback = std::nullopt);
  /// Required path that must exist.
  std::filesystem::path existing(std::string_view key);
  std::optional<std::filesystem::path> optional_existing(std::string_view key);
  /// The root seed; mandatory.
  std::uint64_t seed();

  bool has(std::string_view key) const;
  void fail(std::string problem) { problems_.push_back(std::move(problem)); }
  /// Throws ConfigErrors when any read failed; also rejects unknown keys.
  void check(std::span<const std::string_view> known_keys = {});

  const nlohmann::json& resolved() const noexcept { return resolved_; }

 private:
  const nlohmann::json* find(std::string_view key) const;
  nlohmann::json config_;
  nlohmann::json resolved_ = nlohmann::json::object();
  std::vector<std::string> problems_;
};

enum class OptionType { Text, Integer, Real, Flag, List };

struct OptionSpec {
  std::string_view name;  // flag spelling, e.g. "walk-length"; config key "walk_length"
  OptionType type;
  std::string_view help;
};

struct CommandSpec {
  std::string_view name;
  std::string_view help;
  std::vector<OptionSpec> options;
};

/// Every subcommand with its accepted options (the shared ones included).
std::span<const CommandSpec> command_specs();

std::string config_key(std::string_view option_name);

/// Runs one subcommand with a merged configuration; artifacts and run.json
/// are written under config["out"]. Progress lines go to `log`.
void run_command(std::string_view command, const nlohmann::json& config, std::ostream& log);

/// `{"error": {"kind": ..., "message": ..., "details": [...]}}`.
nlohmann::json error_json(const std::exception& e);

struct FetchResult {
  std::filesystem::path file;  // content-addressed cache entry
  std::string sha256;
  bool cache_hit = false;
};

/// Resolves `name` in a manifest `{"datasets": {name: {"url"|"path", "sha256", ...}}}`
/// and returns a verified cached copy, downloading or copying only on a miss.
FetchResult fetch_dataset(const std::filesystem::path& manifest, std::string_view name,
                          const std::filesystem::path& cache_dir);

std::string sha256_file(const std::filesystem::path& path);

/// DTIBENCH_CACHE, else $HOME/.cache/dtibench, else ./.dtibench-cache.
std::filesystem::path default_cache_dir();

}  // namespace dtibench
