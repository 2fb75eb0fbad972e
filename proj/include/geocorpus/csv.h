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

#ifndef GEOCORPUS_CSV_H_
#define GEOCORPUS_CSV_H_

#include <string>
#include <string_view>
#include <vector>

namespace geocorpus {

struct CsvRow {
  std::vector<std::string> cells;
  // 1-based physical line where the row starts.
  size_t line = 0;
};

// RFC 4180: comma separated, double-quoted fields may contain commas, quotes
// ("") and newlines. Blank lines are skipped.
std::vector<CsvRow> ParseCsv(std::string_view text);

}  // namespace geocorpus

#endif  // GEOCORPUS_CSV_H_
