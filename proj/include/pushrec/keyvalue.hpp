// Copyright 2026 The pushrec Authors
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

#ifndef PUSHREC_KEYVALUE_HPP_
#define PUSHREC_KEYVALUE_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pushrec {

// Flat `key = value` configuration file. Lines starting with '#' are
// comments. Values are scalars, words, or space-separated lists.
// Insertion order is preserved for serialization; lookups are by key.
class KeyValueFile {
 public:
  KeyValueFile() = default;

  static KeyValueFile parse(const std::string& text,
                            const std::string& origin = "<string>");
  static KeyValueFile load(const std::string& path);

  bool has(const std::string& key) const;

  // typed getters; throw ConfigError naming the key on absence/bad format
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::string> get_strings(const std::string& key) const;

  void set(const std::string& key, const std::string& value);
  void set_double(const std::string& key, double value);
  void set_int(const std::string& key, std::int64_t value);
  void set_bool(const std::string& key, bool value);

  // later entries win key-by-key
  void merge(const KeyValueFile& overrides);

  // sorted `key = value` lines with full-precision floats
  std::string canonical() const;

  // keys present in the file but never read through a getter
  std::vector<std::string> unread_keys() const;

  const std::vector<std::string>& order() const { return order_; }

 private:
  std::string require(const std::string& key) const;

  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
  mutable std::map<std::string, bool> read_;
  std::string origin_;
};

// 64-bit FNV-1a over a string, used for config fingerprints
std::uint64_t fnv1a64(const std::string& text);

std::string format_double(double value);  // shortest exact round-trip

}  // namespace pushrec

#endif  // PUSHREC_KEYVALUE_HPP_
