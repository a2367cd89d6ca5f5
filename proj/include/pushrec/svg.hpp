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

#ifndef PUSHREC_SVG_HPP_
#define PUSHREC_SVG_HPP_

#include <string>

#include "pushrec/eval.hpp"

namespace pushrec {

// figure renderers for the protocol CSVs; self-contained SVG output
std::string sweep_svg(const SweepResult& result);
std::string endurance_svg(const EnduranceResult& result);

// parse a protocol CSV back into its result struct (for `plot`)
SweepResult parse_sweep_csv(const std::string& text);
EnduranceResult parse_endurance_csv(const std::string& text);

// read the `# protocol <name>` header token
std::string csv_protocol(const std::string& text);

}  // namespace pushrec

#endif  // PUSHREC_SVG_HPP_
