// Copyright 2026 The Eventlens Authors
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

#include "eventlens/time.h"

#include <cctype>
#include <cstdio>
#include <string>

#include "eventlens/error.h"

namespace eventlens {
namespace {

using std::chrono::days;
using std::chrono::hours;
using std::chrono::minutes;
using std::chrono::seconds;

[[noreturn]] void Bad(std::string_view text) {
  throw Error(ErrorCode::kBadTimestamp, "unparseable timestamp: '" + std::string(text) + "'");
}

// Reads exactly `width` digits starting at pos.
int Digits(std::string_view text, std::size_t& pos, int width) {
  if (pos + width > text.size()) Bad(text);
  int value = 0;
  for (int i = 0; i < width; ++i) {
    char c = text[pos + i];
    if (!std::isdigit(static_cast<unsigned char>(c))) Bad(text);
    value = value * 10 + (c - '0');
  }
  pos += width;
  return value;
}

void Expect(std::string_view text, std::size_t& pos, char c) {
  if (pos >= text.size() || text[pos] != c) Bad(text);
  ++pos;
}

}  // namespace

TimePoint ParseTime(std::string_view text) {
  std::size_t pos = 0;
  int y = Digits(text, pos, 4);
  Expect(text, pos, '-');
  unsigned mo = Digits(text, pos, 2);
  Expect(text, pos, '-');
  unsigned d = Digits(text, pos, 2);
  if (pos >= text.size() || (text[pos] != 'T' && text[pos] != 't' && text[pos] != ' ')) Bad(text);
  ++pos;
  int hh = Digits(text, pos, 2);
  Expect(text, pos, ':');
  int mm = Digits(text, pos, 2);
  Expect(text, pos, ':');
  int ss = Digits(text, pos, 2);
  int ms = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int n = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      if (n < 3) ms = ms * 10 + (text[pos] - '0');
      ++n;
      ++pos;
    }
    if (n == 0) Bad(text);
    for (; n < 3; ++n) ms *= 10;
  }
  minutes offset{0};
  if (pos >= text.size()) Bad(text);
  if (text[pos] == 'Z' || text[pos] == 'z') {
    ++pos;
  } else if (text[pos] == '+' || text[pos] == '-') {
    int sign = text[pos] == '-' ? -1 : 1;
    ++pos;
    int oh = Digits(text, pos, 2);
    Expect(text, pos, ':');
    int om = Digits(text, pos, 2);
    if (oh > 23 || om > 59) Bad(text);
    offset = minutes{sign * (oh * 60 + om)};
  } else {
    Bad(text);
  }
  if (pos != text.size()) Bad(text);

  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{mo},
                                  std::chrono::day{d}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) Bad(text);
  auto t = std::chrono::sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss} + Millis{ms};
  return TimePoint{std::chrono::duration_cast<Millis>(t.time_since_epoch() - offset)};
}

std::string FormatTime(TimePoint t) {
  auto day = std::chrono::floor<days>(t);
  std::chrono::year_month_day ymd{day};
  std::chrono::hh_mm_ss<Millis> tod{t - day};
  char buf[48];
  int n = std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d",
                        static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                        static_cast<unsigned>(ymd.day()), static_cast<int>(tod.hours().count()),
                        static_cast<int>(tod.minutes().count()),
                        static_cast<int>(tod.seconds().count()));
  std::string out(buf, n);
  if (auto ms = tod.subseconds().count(); ms != 0) {
    std::snprintf(buf, sizeof(buf), ".%03d", static_cast<int>(ms));
    out += buf;
  }
  out += 'Z';
  return out;
}

std::int64_t FloorIndex(TimePoint t, TimePoint origin, Millis step) {
  auto diff = (t - origin).count();
  auto s = step.count();
  auto q = diff / s;
  if (diff % s != 0 && diff < 0) --q;
  return q;
}

}  // namespace eventlens
