// Copyright 2026 The fogweave Authors
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

#include <charconv>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

namespace fogweave {

/// Shortest decimal that reads back to the same double; "inf"/"nan" for
/// non-finite values.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Minimal RFC 4180 row writer.
class CsvRow {
 public:
  explicit CsvRow(std::ostream& os) : os_(os) {}
  ~CsvRow() { os_ << '\n'; }

  CsvRow(const CsvRow&) = delete;
  CsvRow& operator=(const CsvRow&) = delete;

  CsvRow& operator<<(std::string_view s) {
    sep();
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) {
      os_ << s;
      return *this;
    }
    os_ << '"';
    for (char c : s) {
      if (c == '"') os_ << '"';
      os_ << c;
    }
    os_ << '"';
    return *this;
  }
  CsvRow& operator<<(const std::string& s) { return *this << std::string_view(s); }
  CsvRow& operator<<(const char* s) { return *this << std::string_view(s); }
  CsvRow& operator<<(double v) { return *this << std::string_view(format_double(v)); }
  template <typename Int, typename = std::enable_if_t<std::is_integral_v<Int>>>
  CsvRow& operator<<(Int v) {
    sep();
    if constexpr (std::is_same_v<Int, bool>) {
      os_ << (v ? "true" : "false");
    } else {
      os_ << v;
    }
    return *this;
  }

 private:
  void sep() {
    if (!first_) os_ << ',';
    first_ = false;
  }

  std::ostream& os_;
  bool first_ = true;
};

}  // namespace fogweave
