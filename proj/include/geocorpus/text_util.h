// Copyright 2026 The geocorpus Authors.
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

#ifndef GEOCORPUS_TEXT_UTIL_H_
#define GEOCORPUS_TEXT_UTIL_H_

#include <string>
#include <string_view>
#include <vector>

namespace geocorpus {

std::string_view Trim(std::string_view s);
std::string ToLower(std::string_view s);

// Lowercases and collapses every whitespace run to one space, trimming both
// ends. This is the normalization used by dedup and the leakage guard.
std::string NormalizeText(std::string_view s);

// Splits into physical lines. Each element keeps its terminator ("\n" or
// "\r\n"), so concatenating the result reproduces the input exactly.
std::vector<std::string_view> SplitLinesKeepEnds(std::string_view s);

std::string Join(const std::vector<std::string>& parts, std::string_view sep);

// Replaces every "{key}" occurrence. Unknown placeholders are left alone.
std::string ReplaceAll(std::string text, std::string_view from,
                       std::string_view to);

// "output_type" -> "output type".
std::string HumanizeName(std::string_view name);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);
// True when `path` exists, is non-empty and its last byte is not '\n'.
bool EndsWithoutNewline(const std::string& path);

}  // namespace geocorpus

#endif  // GEOCORPUS_TEXT_UTIL_H_
