// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dtibench {

/// Error taxonomy shared by the library, the CLI error JSON and any bindings.
enum class ErrorKind {
  Parse,
  Validation,
  Io,
  NotEnoughEdges,       // a fold received zero positive edges
  InsufficientOverlap,  // fewer than 3 aligned residue pairs
  InsufficientNonEdges,
  EmptyStructure,
  MissingNode,
  Overlap,  // strict cross-dataset pairing found shared nodes
  Checksum,
  UnknownDataset,
  Shape,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse error carrying the 1-based line number of the offending row.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(ErrorKind::Parse, source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace dtibench
