/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#include <cityforge/common/error.hpp>
#include <cityforge/common/time.hpp>

#include <array>
#include <cctype>
#include <cstdio>

namespace cityforge {

namespace {

using namespace std::chrono;

class Cursor {
  public:
    explicit Cursor(std::string_view text) : text_(text) {}

    bool done() const { return pos_ >= text_.size(); }
    char peek() const { return done() ? '\0' : text_[pos_]; }

    int digits(std::size_t count) {
        int value = 0;
        for (std::size_t i = 0; i < count; ++i) {
            if (done() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                bad();
            }
            value = value * 10 + (text_[pos_++] - '0');
        }
        return value;
    }

    void expect(char c) {
        if (peek() != c) {
            bad();
        }
        ++pos_;
    }

    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void bad() const { fail(ErrorKind::Validation, "malformed timestamp '" + std::string(text_) + "'"); }

  private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

Date readDate(Cursor& in) {
    const int y = in.digits(4);
    in.expect('-');
    const int m = in.digits(2);
    in.expect('-');
    const int d = in.digits(2);
    const Date date{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!date.ok()) {
        in.bad();
    }
    return date;
}

constexpr std::array<const char*, 7> kWeekdayNames{"SUN", "MON", "TUE", "WED", "THU", "FRI", "SAT"};
constexpr std::array<const char*, 7> kWeekdayLong{"SUNDAY", "MONDAY", "TUESDAY", "WEDNESDAY", "THURSDAY", "FRIDAY", "SATURDAY"};

}// namespace

Instant now() { return floor<milliseconds>(system_clock::now()); }

Instant parseInstant(std::string_view text) {
    Cursor in(text);
    const Date date = readDate(in);
    if (!in.accept('T') && !in.accept(' ')) {
        in.bad();
    }
    const int hh = in.digits(2);
    in.expect(':');
    const int mm = in.digits(2);
    in.expect(':');
    const int ss = in.digits(2);
    if (hh > 23 || mm > 59 || ss > 60) {
        in.bad();
    }
    int millis = 0;
    if (in.accept('.')) {
        int scale = 100;
        int count = 0;
        while (std::isdigit(static_cast<unsigned char>(in.peek()))) {
            const int digit = in.digits(1);
            if (count < 3) {
                millis += digit * scale;
                scale /= 10;
            }
            ++count;
        }
        if (count == 0) {
            in.bad();
        }
    }
    minutes offset{0};
    if (in.accept('Z') || in.accept('z')) {
    } else if (in.peek() == '+' || in.peek() == '-') {
        const bool negative = in.peek() == '-';
        in.accept(in.peek());
        const int oh = in.digits(2);
        in.accept(':');
        const int om = in.digits(2);
        offset = minutes{oh * 60 + om};
        if (negative) {
            offset = -offset;
        }
    }
    if (!in.done()) {
        in.bad();
    }
    return Instant{sys_days{date}} + hours{hh} + minutes{mm} + seconds{ss} + milliseconds{millis} - offset;
}

std::string formatInstant(Instant instant) {
    const auto day = floor<days>(instant);
    const Date date{day};
    const hh_mm_ss<milliseconds> tod{instant - day};
    char buffer[40];
    const auto ms = tod.subseconds().count();
    if (ms == 0) {
        std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ", static_cast<int>(date.year()),
                      static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()),
                      static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                      static_cast<long long>(tod.seconds().count()));
    } else {
        std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02uT%02ld:%02ld:%02lld.%03lldZ", static_cast<int>(date.year()),
                      static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()),
                      static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                      static_cast<long long>(tod.seconds().count()), static_cast<long long>(ms));
    }
    return buffer;
}

Date parseDate(std::string_view text) {
    Cursor in(text);
    const Date date = readDate(in);
    if (!in.done()) {
        in.bad();
    }
    return date;
}

std::string formatDate(Date date) {
    char buffer[16];
    std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02u", static_cast<int>(date.year()), static_cast<unsigned>(date.month()),
                  static_cast<unsigned>(date.day()));
    return buffer;
}

weekday weekdayOf(Instant instant) { return weekday{floor<days>(instant)}; }

int hourOf(Instant instant) {
    const auto day = floor<days>(instant);
    return static_cast<int>(floor<hours>(instant - day).count());
}

std::optional<weekday> parseWeekday(std::string_view text) {
    std::string upper;
    for (char c : text) {
        upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    for (unsigned i = 0; i < kWeekdayNames.size(); ++i) {
        if (upper == kWeekdayNames[i] || upper == kWeekdayLong[i]) {
            return weekday{i};
        }
    }
    return std::nullopt;
}

std::string formatWeekday(weekday day) { return kWeekdayNames[day.c_encoding()]; }

void TimeInterval::validate() const {
    if (from && to && *from > *to) {
        fail(ErrorKind::Validation, "time interval start is after its end");
    }
}

}// namespace cityforge
