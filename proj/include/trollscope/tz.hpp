#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

namespace trollscope {

// Civil-date conversions (proleptic Gregorian), after Howard Hinnant's
// public-domain algorithms. Day 0 = 1970-01-01.
inline int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

struct CivilDate {
    int year;
    int month;
    int day;
};

inline CivilDate civil_from_days(int64_t z) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t y = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

inline bool is_leap_year(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

inline int days_in_month(int y, int m) {
    static const int len[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap_year(y)) return 29;
    return len[m - 1];
}

inline int64_t floor_div(int64_t a, int64_t b) {
    int64_t q = a / b;
    if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

// Parses an RFC 3339 timestamp ("2013-05-14T09:30:00Z", offsets and
// fractional seconds allowed; fraction is truncated) to Unix seconds.
// Throws std::invalid_argument on anything malformed.
inline int64_t parse_rfc3339(const std::string& s) {
    auto fail = [&]() -> int64_t {
        throw std::invalid_argument("unparseable timestamp: '" + s + "'");
    };
    const char* p = s.c_str();
    auto digits = [&](int n, int& out) {
        out = 0;
        for (int i = 0; i < n; ++i) {
            if (*p < '0' || *p > '9') return false;
            out = out * 10 + (*p++ - '0');
        }
        return true;
    };
    int year, month, day, hour, minute, second;
    if (!digits(4, year) || *p++ != '-') fail();
    if (!digits(2, month) || *p++ != '-') fail();
    if (!digits(2, day)) fail();
    if (*p != 'T' && *p != 't') fail();
    ++p;
    if (!digits(2, hour) || *p++ != ':') fail();
    if (!digits(2, minute) || *p++ != ':') fail();
    if (!digits(2, second)) fail();
    if (*p == '.') {
        ++p;
        if (*p < '0' || *p > '9') fail();
        while (*p >= '0' && *p <= '9') ++p;
    }
    int64_t offset = 0;
    if (*p == 'Z' || *p == 'z') {
        ++p;
    } else if (*p == '+' || *p == '-') {
        const int sign = (*p == '-') ? -1 : 1;
        ++p;
        int oh, om;
        if (!digits(2, oh) || *p++ != ':' || !digits(2, om)) fail();
        if (oh > 23 || om > 59) fail();
        offset = sign * (oh * 3600LL + om * 60LL);
    } else {
        fail();
    }
    if (*p != '\0') fail();
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) fail();
    if (hour > 23 || minute > 59 || second > 60) fail();
    if (second == 60) second = 59;  // leap second, clamp
    const int64_t days = days_from_civil(year, month, day);
    return days * 86400 + hour * 3600 + minute * 60 + second - offset;
}

inline std::string format_rfc3339_utc(int64_t t) {
    const int64_t days = floor_div(t, 86400);
    const int64_t sod = t - days * 86400;
    const CivilDate d = civil_from_days(days);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", d.year, d.month, d.day,
                  static_cast<int>(sod / 3600), static_cast<int>(sod / 60 % 60),
                  static_cast<int>(sod % 60));
    return buf;
}

// Local wall-clock breakdown of one instant.
struct LocalTime {
    int64_t local_day;  // local calendar day number (days since 1970-01-01)
    int year, month, day;
    int hour, minute, second;
    int weekday;  // 0 = Monday .. 6 = Sunday
};

// Time zone backed by a parsed TZif file (RFC 8536), a fixed offset, or UTC.
// Zone ids are resolved against $TZDIR (default /usr/share/zoneinfo).
class TimeZone {
public:
    static TimeZone utc() { return TimeZone(); }

    static TimeZone fixed(int64_t offset_seconds) {
        TimeZone z;
        z.fixed_offset_ = offset_seconds;
        return z;
    }

    // Accepts "UTC", "Z", fixed offsets ("+02:00", "UTC+03:00", "-05:30"),
    // and IANA zone ids ("Europe/Sofia"). Throws std::invalid_argument when
    // the id is unknown or the zoneinfo file is absent/corrupt.
    static TimeZone load(const std::string& id) {
        if (id.empty()) throw std::invalid_argument("empty timezone id");
        if (id == "UTC" || id == "Z" || id == "utc") return utc();
        std::string rest = id;
        if (rest.rfind("UTC", 0) == 0) rest = rest.substr(3);
        if (!rest.empty() && (rest[0] == '+' || rest[0] == '-')) {
            int sign = rest[0] == '-' ? -1 : 1;
            int h = 0, m = 0;
            if (std::sscanf(rest.c_str() + 1, "%d:%d", &h, &m) >= 1 && h <= 23 && m <= 59)
                return fixed(sign * (h * 3600LL + m * 60LL));
            throw std::invalid_argument("invalid fixed-offset timezone: '" + id + "'");
        }
        for (char c : id)
            if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '/' || c == '_' ||
                  c == '-' || c == '+'))
                throw std::invalid_argument("invalid timezone id: '" + id + "'");
        if (id.find("..") != std::string::npos)
            throw std::invalid_argument("invalid timezone id: '" + id + "'");
        const char* dir = std::getenv("TZDIR");
        std::string path = std::string(dir && *dir ? dir : "/usr/share/zoneinfo") + "/" + id;
        TimeZone z;
        z.parse_tzif(path, id);
        return z;
    }

    int64_t offset_at(int64_t utc_seconds) const {
        if (transitions_.empty()) return fixed_offset_;
        // last transition at or before t; before the first one, initial type
        size_t lo = 0, hi = transitions_.size();
        while (lo < hi) {
            size_t mid = (lo + hi) / 2;
            if (transitions_[mid] <= utc_seconds)
                lo = mid + 1;
            else
                hi = mid;
        }
        if (lo == 0) return initial_offset_;
        return offsets_[type_of_[lo - 1]];
    }

    int64_t to_local(int64_t utc_seconds) const { return utc_seconds + offset_at(utc_seconds); }

    // Inverse mapping for wall-clock times; ambiguous or skipped local times
    // resolve to the offset in force just before the relevant transition.
    int64_t to_utc(int64_t local_seconds) const {
        int64_t guess = local_seconds - offset_at(local_seconds);
        int64_t off = offset_at(guess);
        return local_seconds - off;
    }

    LocalTime local_at(int64_t utc_seconds) const {
        const int64_t ls = to_local(utc_seconds);
        const int64_t d = floor_div(ls, 86400);
        const int64_t sod = ls - d * 86400;
        const CivilDate cd = civil_from_days(d);
        LocalTime lt;
        lt.local_day = d;
        lt.year = cd.year;
        lt.month = cd.month;
        lt.day = cd.day;
        lt.hour = static_cast<int>(sod / 3600);
        lt.minute = static_cast<int>(sod / 60 % 60);
        lt.second = static_cast<int>(sod % 60);
        lt.weekday = static_cast<int>(((d % 7) + 7 + 3) % 7);  // 1970-01-01 is a Thursday
        return lt;
    }

private:
    TimeZone() = default;

    void parse_tzif(const std::string& path, const std::string& id) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw std::invalid_argument("unknown timezone '" + id + "' (no zoneinfo file)");
        std::vector<unsigned char> buf((std::istreambuf_iterator<char>(f)),
                                       std::istreambuf_iterator<char>());
        auto corrupt = [&]() { throw std::invalid_argument("corrupt zoneinfo file for '" + id + "'"); };
        size_t pos = 0;
        auto need = [&](size_t n) { if (pos + n > buf.size()) corrupt(); };
        auto u32 = [&]() {
            need(4);
            uint32_t v = (uint32_t(buf[pos]) << 24) | (uint32_t(buf[pos + 1]) << 16) |
                         (uint32_t(buf[pos + 2]) << 8) | uint32_t(buf[pos + 3]);
            pos += 4;
            return v;
        };
        auto i64 = [&]() {
            need(8);
            uint64_t v = 0;
            for (int i = 0; i < 8; ++i) v = (v << 8) | buf[pos + i];
            pos += 8;
            return static_cast<int64_t>(v);
        };
        auto header = [&](char& version, uint32_t cnt[6]) {
            need(44);
            if (std::memcmp(buf.data() + pos, "TZif", 4) != 0) corrupt();
            version = static_cast<char>(buf[pos + 4]);
            pos += 20;
            for (int i = 0; i < 6; ++i) cnt[i] = u32();
        };
        char version;
        uint32_t cnt[6];  // isutcnt, isstdcnt, leapcnt, timecnt, typecnt, charcnt
        header(version, cnt);
        const bool wide = version >= '2';
        if (wide) {
            // skip the legacy 32-bit block, then read the 64-bit one
            size_t v1 = size_t(cnt[3]) * 5 + size_t(cnt[4]) * 6 + cnt[5] + size_t(cnt[2]) * 8 +
                        cnt[1] + cnt[0];
            need(v1);
            pos += v1;
            header(version, cnt);
        }
        const uint32_t timecnt = cnt[3], typecnt = cnt[4];
        if (typecnt == 0) corrupt();
        transitions_.resize(timecnt);
        for (uint32_t i = 0; i < timecnt; ++i)
            transitions_[i] = wide ? i64() : static_cast<int32_t>(u32());
        type_of_.resize(timecnt);
        need(timecnt);
        for (uint32_t i = 0; i < timecnt; ++i) {
            type_of_[i] = buf[pos + i];
            if (type_of_[i] >= typecnt) corrupt();
        }
        pos += timecnt;
        offsets_.resize(typecnt);
        std::vector<unsigned char> isdst(typecnt);
        for (uint32_t i = 0; i < typecnt; ++i) {
            offsets_[i] = static_cast<int32_t>(u32());
            need(2);
            isdst[i] = buf[pos];
            pos += 2;
        }
        // initial type: first non-DST type, else type 0 (RFC 8536 §3.2)
        initial_offset_ = offsets_[0];
        for (uint32_t i = 0; i < typecnt; ++i)
            if (!isdst[i]) {
                initial_offset_ = offsets_[i];
                break;
            }
    }

    int64_t fixed_offset_ = 0;
    int64_t initial_offset_ = 0;
    std::vector<int64_t> transitions_;
    std::vector<uint8_t> type_of_;
    std::vector<int64_t> offsets_;
};

}  // namespace trollscope
