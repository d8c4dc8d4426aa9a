#include "volcast/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "volcast/errors.hpp"

namespace volcast::io {

std::string format17(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

double parse_double(const std::string& token, const std::string& context) {
    const std::string t = trim(token);
    if (t.empty()) throw data_error(context + ": empty number");
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE)
        throw data_error(context + ": cannot parse number '" + token + "'");
    return v;
}

std::int64_t parse_int(const std::string& token, const std::string& context) {
    const std::string t = trim(token);
    if (t.empty()) throw data_error(context + ": empty integer");
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size() || errno == ERANGE)
        throw data_error(context + ": cannot parse integer '" + token + "'");
    return v;
}

std::string write_kv(const KvPairs& pairs) {
    std::string out;
    for (const auto& [key, value] : pairs) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    }
    return out;
}

KvPairs parse_kv(const std::string& text) {
    KvPairs pairs;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw data_error("kv line " + std::to_string(line_no) + ": missing '='");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw data_error("kv line " + std::to_string(line_no) + ": empty key");
        for (const auto& [k, v] : pairs)
            if (k == key) throw data_error("kv: duplicate key '" + key + "'");
        pairs.emplace_back(std::move(key), std::move(value));
    }
    return pairs;
}

const std::string& kv_get(const KvPairs& pairs, const std::string& key) {
    for (const auto& [k, v] : pairs)
        if (k == key) return v;
    throw data_error("kv: missing key '" + key + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write file: " + path);
    out << content;
    if (!out) throw data_error("write failed: " + path);
}

std::int64_t days_from_civil(const CivilDate& date) {
    // Howard Hinnant's days_from_civil
    int y = date.year;
    unsigned m = date.month, d = date.day;
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t days) {
    days += 719468;
    const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(days - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {static_cast<int>(y + (m <= 2)), m, d};
}

std::string format_date(std::int64_t days_since_epoch) {
    CivilDate c = civil_from_days(days_since_epoch);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", c.year, c.month, c.day);
    return buf;
}

std::int64_t parse_date(const std::string& text) {
    int y = 0;
    unsigned m = 0, d = 0;
    if (std::sscanf(text.c_str(), "%d-%u-%u", &y, &m, &d) != 3 || m < 1 || m > 12 || d < 1 ||
        d > 31)
        throw data_error("cannot parse date '" + text + "'");
    return days_from_civil({y, m, d});
}

std::int64_t parse_timestamp(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw data_error("empty timestamp");
    bool digits_only = t[0] == '-' || (t[0] >= '0' && t[0] <= '9');
    for (std::size_t i = 1; digits_only && i < t.size(); ++i)
        digits_only = t[i] >= '0' && t[i] <= '9';
    if (digits_only) return parse_int(t, "timestamp");

    int y = 0;
    unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
    char sep = 0;
    int got = std::sscanf(t.c_str(), "%d-%u-%u%c%u:%u:%u", &y, &mo, &d, &sep, &h, &mi, &s);
    if (got == 3) {
        return days_from_civil({y, mo, d}) * 86400;
    }
    if (got == 7 && (sep == 'T' || sep == ' ') && h < 24 && mi < 60 && s < 60) {
        return days_from_civil({y, mo, d}) * 86400 + h * 3600 + mi * 60 + s;
    }
    throw data_error("cannot parse timestamp '" + text + "'");
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(current);
            current.clear();
        } else if (ch != '\r') {
            current.push_back(ch);
        }
    }
    fields.push_back(current);
    return fields;
}

}  // namespace volcast::io
