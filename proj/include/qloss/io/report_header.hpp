// Copyright 2026 The qloss Authors
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

#pragma once

#include "qloss/core/common.hpp"

#include <openssl/evp.h>

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#ifndef QLOSS_VERSION
#define QLOSS_VERSION "0.0.0"
#endif

namespace qloss {

inline constexpr const char* kVersion = QLOSS_VERSION;

/// SHA-1 of "blob <size>\0<text>", the object id git assigns to a file with
/// that content.
inline std::string git_blob_hash(const std::string& text) {
  const std::string blob = "blob " + std::to_string(text.size()) + std::string(1, '\0') + text;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr) != 1) {
    throw InvariantViolation("SHA-1 digest failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

/// Resolved configuration of one run: subcommand, master seed and every
/// parameter as key=value in flag order.
struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> entries;

  void set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries) {
      if (k == key) {
        v = value;
        return;
      }
    }
    entries.emplace_back(key, value);
  }

  /// Canonical key=value text, the input of the config hash.
  std::string text() const {
    std::ostringstream out;
    out << "command=" << command << '\n' << "seed=" << seed << '\n';
    for (const auto& [k, v] : entries) out << k << '=' << v << '\n';
    return out.str();
  }

  std::string hash() const { return git_blob_hash(text()); }
};

/// Comment block heading every CSV output.
inline std::string report_header(const RunConfig& cfg) {
  std::ostringstream out;
  out << "# qloss " << kVersion << '\n';
  out << "# command " << cfg.command << '\n';
  out << "# seed " << cfg.seed << '\n';
  out << "# config_hash " << cfg.hash() << '\n';
  for (const auto& [k, v] : cfg.entries) out << "# " << k << '=' << v << '\n';
  return out.str();
}

/// The same header as a JSON object, for JSON outputs.
inline nlohmann::ordered_json header_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["tool"] = "qloss";
  j["version"] = kVersion;
  j["command"] = cfg.command;
  j["seed"] = cfg.seed;
  j["config_hash"] = cfg.hash();
  nlohmann::ordered_json c = nlohmann::ordered_json::object();
  for (const auto& [k, v] : cfg.entries) c[k] = v;
  j["config"] = std::move(c);
  return j;
}

}  // namespace qloss
