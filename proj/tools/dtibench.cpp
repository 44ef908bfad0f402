// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Flags are collected as strings and converted to a
// JSON config; ConfigReader does the typing and reports every problem at once.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>

#include "dtibench/io.hpp"
#include "dtibench/pipeline.hpp"

namespace {

using nlohmann::json;
using dtibench::OptionType;

// Values that do not convert are passed through as strings so the reader
// names them in its error report.
json typed(OptionType type, const std::string& raw) {
  if (type == OptionType::Integer) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(raw, &used);
      if (used == raw.size()) return v;
    } catch (const std::exception&) {
    }
  } else if (type == OptionType::Real) {
    double v = 0;
    if (dtibench::io::parse_double(raw, v)) return v;
  }
  return raw;
}

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dtibench::Error(dtibench::ErrorKind::Io, "cannot read config " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw dtibench::Error(dtibench::ErrorKind::Parse, path + ": " + e.what());
  }
  // run.json from an earlier run can be replayed directly
  if (doc.is_object() && doc.contains("command") && doc.contains("config")) return doc["config"];
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmarking toolkit for drug-target interaction prediction"};
  app.set_version_flag("--version", std::string(dtibench::kVersion));
  app.require_subcommand(1);

  struct Bound {
    const dtibench::OptionSpec* spec;
    std::vector<std::string> values;
    bool flag = false;
  };
  std::map<std::string, std::vector<Bound>> bound;
  std::map<std::string, std::string> config_files;
  for (const auto& cmd : dtibench::command_specs()) {
    auto* sub = app.add_subcommand(std::string(cmd.name), std::string(cmd.help));
    auto& slots = bound[std::string(cmd.name)];
    slots.reserve(cmd.options.size());
    for (const auto& opt : cmd.options) slots.push_back({&opt, {}, false});
    for (auto& slot : slots) {
      const auto flag = "--" + std::string(slot.spec->name);
      const auto help = std::string(slot.spec->help);
      if (slot.spec->type == OptionType::Flag) {
        sub->add_flag(flag, slot.flag, help);
      } else if (slot.spec->type == OptionType::List) {
        sub->add_option(flag, slot.values, help)->delimiter(',')->allow_extra_args(false);
      } else {
        sub->add_option(flag, slot.values, help)->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
      }
    }
    sub->add_option("--config", config_files[std::string(cmd.name)],
                    "JSON config (or an earlier run.json); explicit flags override it");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    for (auto* sub : app.get_subcommands()) {
      const auto name = sub->get_name();
      json config = json::object();
      if (!config_files[name].empty()) config = read_config_file(config_files[name]);
      for (const auto& slot : bound[name]) {
        const auto key = dtibench::config_key(slot.spec->name);
        if (slot.spec->type == OptionType::Flag) {
          if (slot.flag) config[key] = true;
        } else if (!slot.values.empty()) {
          if (slot.spec->type == OptionType::List)
            config[key] = slot.values;
          else
            config[key] = typed(slot.spec->type, slot.values.back());
        }
      }
      dtibench::run_command(name, config, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << dtibench::error_json(e).dump(1) << "\n";
    return 1;
  }
  return 0;
}
