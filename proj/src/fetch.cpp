// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <openssl/evp.h>

#include <array>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <regex>

#include "dtibench/io.hpp"
#include "dtibench/pipeline.hpp"

namespace dtibench {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::Io, "sha256 initialisation failed");
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

fs::path default_cache_dir() {
  if (const char* env = std::getenv("DTIBENCH_CACHE"); env && *env) return env;
  if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache" / "dtibench";
  return ".dtibench-cache";
}

namespace {

void download(const std::string& url, const fs::path& dest) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw Error(ErrorKind::Validation, "unsupported url " + url);
  httplib::Client client(m[1].str());
  client.set_follow_location(true);
  client.set_connection_timeout(30);
  client.set_read_timeout(300);
  std::ofstream out(dest, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + dest.string());
  const auto path = m[2].matched ? m[2].str() : std::string("/");
  const auto res = client.Get(path, [&](const char* data, std::size_t n) {
    out.write(data, static_cast<std::streamsize>(n));
    return static_cast<bool>(out);
  });
  out.close();
  if (!res) throw Error(ErrorKind::Io, "download of " + url + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw Error(ErrorKind::Io, "download of " + url + " returned HTTP " + std::to_string(res->status));
}

}  // namespace

FetchResult fetch_dataset(const fs::path& manifest, std::string_view name, const fs::path& cache_dir) {
  json doc;
  try {
    std::ifstream in(manifest);
    if (!in) throw Error(ErrorKind::Io, "cannot read manifest " + manifest.string());
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, manifest.string() + ": " + e.what());
  }
  const auto& datasets = doc.contains("datasets") ? doc["datasets"] : doc;
  if (!datasets.is_object() || !datasets.contains(std::string(name))) {
    std::vector<std::string> known;
    if (datasets.is_object())
      for (const auto& [k, v] : datasets.items()) known.push_back(k);
    std::string list;
    for (const auto& k : known) list += (list.empty() ? "" : ", ") + k;
    throw Error(ErrorKind::UnknownDataset,
                "unknown dataset '" + std::string(name) + "'; available: " + (list.empty() ? "(none)" : list));
  }
  const auto& entry = datasets[std::string(name)];
  if (!entry.contains("sha256") || !entry["sha256"].is_string())
    throw Error(ErrorKind::Validation, "dataset '" + std::string(name) + "' has no sha256");
  auto expected = entry["sha256"].get<std::string>();
  std::transform(expected.begin(), expected.end(), expected.begin(), [](unsigned char c) { return std::tolower(c); });

  const auto dir = cache_dir / "sha256";
  fs::create_directories(dir);
  const auto file = dir / expected;
  if (fs::exists(file)) {
    if (sha256_file(file) == expected) return {file, expected, true};
    fs::remove(file);  // corrupted entry, refetch
  }

  const auto partial = dir / (expected + ".partial");
  try {
    if (entry.contains("path")) {
      fs::path src = entry["path"].get<std::string>();
      if (src.is_relative()) src = manifest.parent_path() / src;
      fs::copy_file(src, partial, fs::copy_options::overwrite_existing);
    } else if (entry.contains("url")) {
      download(entry["url"].get<std::string>(), partial);
    } else {
      throw Error(ErrorKind::Validation, "dataset '" + std::string(name) + "' has neither url nor path");
    }
  } catch (const fs::filesystem_error& e) {
    fs::remove(partial);
    throw Error(ErrorKind::Io, e.what());
  } catch (...) {
    fs::remove(partial);
    throw;
  }
  const auto got = sha256_file(partial);
  if (got != expected) {
    fs::remove(partial);
    throw Error(ErrorKind::Checksum,
                "dataset '" + std::string(name) + "': expected sha256 " + expected + ", got " + got);
  }
  fs::rename(partial, file);
  return {file, expected, false};
}

}  // namespace dtibench
