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

#ifndef PUSHREC_OUTPUT_HPP_
#define PUSHREC_OUTPUT_HPP_

#include <cstdint>
#include <string>

namespace pushrec {

inline constexpr const char* kToolVersion = "pushrec 0.1.0";

// write-to-temp-then-rename; invalid runs never leave partial files
void atomic_write_file(const std::string& path, const std::string& bytes);

std::string read_file(const std::string& path);

// common '#'-prefixed prelude carried by every output file
std::string output_header(std::uint64_t config_hash, std::uint64_t seed);

std::string hex64(std::uint64_t value);
std::uint64_t parse_hex64(const std::string& text);

}  // namespace pushrec

#endif  // PUSHREC_OUTPUT_HPP_
