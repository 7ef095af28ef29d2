#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include "tdin/errors.hpp"

namespace tdin::io {

// Civil-calendar day arithmetic (proleptic Gregorian). Days are counted from
// 1970-01-01. Standard era-based algorithm.
inline std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

// Parses "YYYY-MM-DD".
inline std::int64_t parse_date(const std::string& s) {
    int y = 0, m = 0, d = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%d", &y, &m, &d) != 3 || m < 1 || m > 12 || d < 1 ||
        d > 31) {
        throw ValidationError("bad date '" + s + "' (expected YYYY-MM-DD)");
    }
    return days_from_civil(y, m, d);
}

inline std::string format_date(std::int64_t days) {
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
    return std::string(buf);
}

// Calendar dates map to fractional years since the window start
// (Jan 1 of year0): t = days / 365.25.
inline double date_to_years(std::int64_t date_days, int year0) {
    return static_cast<double>(date_days - days_from_civil(year0, 1, 1)) / 365.25;
}

inline std::int64_t years_to_date(double t, int year0) {
    return days_from_civil(year0, 1, 1) + static_cast<std::int64_t>(std::llround(t * 365.25));
}

}  // namespace tdin::io
