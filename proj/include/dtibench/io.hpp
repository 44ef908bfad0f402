// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dtibench::io {

/// Whole file as lines, without trailing '\r' or '\n'. Throws Io on failure.
std::vector<std::string> read_lines(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, std::string_view text);

std::vector<std::string_view> split(std::string_view line, char sep);

std::string_view trim(std::string_view s);

bool has_whitespace(std::string_view s);

/// Shortest decimal form that parses back to the same double. "NA" for NaN.
std::string format_double(double v);

/// Fixed-point with `digits` decimals.
std::string format_fixed(double v, int digits);

/// Strict double parse of the full token; false on trailing garbage.
bool parse_double(std::string_view token, double& out);

}  // namespace dtibench::io
