#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace volcast::io {

/// 17 significant digits: enough for double -> text -> double to be exact.
std::string format17(double value);

/// Strict full-token double parse; throws data_error on garbage.
double parse_double(const std::string& token, const std::string& context);
std::int64_t parse_int(const std::string& token, const std::string& context);

/// Ordered key = value lines; duplicate keys rejected on parse.
using KvPairs = std::vector<std::pair<std::string, std::string>>;
std::string write_kv(const KvPairs& pairs);
KvPairs parse_kv(const std::string& text);
const std::string& kv_get(const KvPairs& pairs, const std::string& key);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Calendar day <-> days since 1970-01-01 (proleptic Gregorian).
struct CivilDate {
    int year = 1970;
    unsigned month = 1;
    unsigned day = 1;
};
std::int64_t days_from_civil(const CivilDate& date);
CivilDate civil_from_days(std::int64_t days);
std::string format_date(std::int64_t days_since_epoch);
std::int64_t parse_date(const std::string& text);  // YYYY-MM-DD

/// Accepts integer epoch-seconds or ISO-8601 (YYYY-MM-DD[Thh:mm:ss[Z]]).
std::int64_t parse_timestamp(const std::string& text);

std::string trim(const std::string& s);
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace volcast::io
