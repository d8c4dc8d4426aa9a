#include "volcast/rv_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "volcast/errors.hpp"
#include "volcast/io.hpp"

namespace volcast::rvpipe {

LoadedPrices load_prices(const std::string& path) {
    return parse_prices_csv(io::read_text_file(path), path);
}

LoadedPrices parse_prices_csv(const std::string& content, const std::string& origin) {
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;

    struct Row {
        std::int64_t ts;
        double price;
        std::size_t order;
    };
    std::vector<Row> rows;

    bool header_checked = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = io::trim(line);
        if (t.empty()) continue;
        if (!header_checked) {
            header_checked = true;
            if (t == "timestamp,price") continue;  // header optional
        }
        auto fields = io::split_csv_line(t);
        const std::string where = origin + ":" + std::to_string(line_no);
        if (fields.size() != 2) throw data_error(where + ": expected 'timestamp,price'");
        std::int64_t ts;
        double price;
        try {
            ts = io::parse_timestamp(fields[0]);
            price = io::parse_double(fields[1], "price");
        } catch (const data_error& e) {
            throw data_error(where + ": " + e.what());
        }
        if (!(price > 0.0)) throw data_error(where + ": nonpositive price " + fields[1]);
        rows.push_back({ts, price, rows.size()});
    }
    if (rows.empty()) throw data_error(origin + ": no price rows");

    LoadedPrices out;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].ts < rows[i - 1].ts) ++out.rows_reordered;
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.ts < b.ts;
    });

    for (std::size_t i = 0; i < rows.size(); ++i) {
        // within a timestamp tie, stable sort keeps file order: last wins
        if (i + 1 < rows.size() && rows[i + 1].ts == rows[i].ts) {
            ++out.duplicates_collapsed;
            continue;
        }
        out.series.timestamps.push_back(rows[i].ts);
        out.series.prices.push_back(rows[i].price);
    }
    return out;
}

RvSeries daily_realized_vol(const PriceSeries& prices, std::size_t min_day_obs) {
    if (prices.timestamps.size() != prices.prices.size())
        throw std::invalid_argument("daily_realized_vol: misaligned series");
    if (min_day_obs < 2) min_day_obs = 2;

    RvSeries out;
    const std::size_t n = prices.timestamps.size();
    std::size_t i = 0;
    double prev_close = std::numeric_limits<double>::quiet_NaN();
    while (i < n) {
        // UTC midnight day boundary (floor division for pre-epoch stamps)
        std::int64_t ts = prices.timestamps[i];
        std::int64_t day = ts >= 0 ? ts / 86400 : (ts - 86399) / 86400;
        std::size_t j = i;
        while (j < n) {
            std::int64_t tj = prices.timestamps[j];
            std::int64_t dj = tj >= 0 ? tj / 86400 : (tj - 86399) / 86400;
            if (dj != day) break;
            ++j;
        }
        const std::size_t count = j - i;
        if (count < min_day_obs) {
            ++out.days_dropped;
            i = j;
            continue;
        }
        double sum_sq = 0.0;
        for (std::size_t k = i + 1; k < j; ++k) {
            double r = std::log(prices.prices[k] / prices.prices[k - 1]);
            sum_sq += r * r;
        }
        double close = prices.prices[j - 1];
        out.dates.push_back(day);
        out.rv.push_back(std::sqrt(sum_sq));
        out.ret.push_back(std::isnan(prev_close) ? std::numeric_limits<double>::quiet_NaN()
                                                 : std::log(close / prev_close));
        prev_close = close;
        i = j;
    }
    if (out.dates.empty()) throw data_error("daily_realized_vol: no day met the observation floor");
    return out;
}

Scaler Scaler::fit(std::span<const double> train, ScalerMode mode) {
    if (train.empty()) throw std::invalid_argument("scaler: empty training segment");
    Scaler s;
    s.mode_ = mode;
    if (mode == ScalerMode::minmax) {
        double lo = train[0], hi = train[0];
        for (double v : train) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (!(hi > lo)) throw numeric_error("scaler: max == min on training segment");
        s.min_ = lo;
        s.max_ = hi;
    } else {
        double m = 0.0;
        for (double v : train) m = std::max(m, std::abs(v));
        if (!(m > 0.0)) throw numeric_error("scaler: zero scale on training segment");
        s.scale_ = m;
    }
    return s;
}

Scaler Scaler::restore(ScalerMode mode, double min, double max, double scale) {
    Scaler s;
    s.mode_ = mode;
    s.min_ = min;
    s.max_ = max;
    s.scale_ = scale;
    if (mode == ScalerMode::minmax && !(max > min))
        throw std::invalid_argument("scaler restore: max must exceed min");
    if (mode == ScalerMode::scale_only && !(scale > 0.0))
        throw std::invalid_argument("scaler restore: scale must be positive");
    return s;
}

double Scaler::apply(double x) const {
    return mode_ == ScalerMode::minmax ? (x - min_) / (max_ - min_) : x / scale_;
}

double Scaler::invert(double y) const {
    return mode_ == ScalerMode::minmax ? y * (max_ - min_) + min_ : y * scale_;
}

void Scaler::apply(std::span<double> xs) const {
    for (double& x : xs) x = apply(x);
}

ScalerMode scaler_mode_from_string(const std::string& name) {
    if (name == "minmax") return ScalerMode::minmax;
    if (name == "scale-only" || name == "scale_only") return ScalerMode::scale_only;
    throw std::invalid_argument("unknown scaler mode '" + name + "'");
}

const char* scaler_mode_name(ScalerMode mode) {
    return mode == ScalerMode::minmax ? "minmax" : "scale-only";
}

SplitIndices split(std::size_t length, const SplitSpec& spec) {
    if (length < spec.n_val + spec.n_test + 100)
        throw data_error("split: series of length " + std::to_string(length) +
                         " leaves fewer than 100 training points after " +
                         std::to_string(spec.n_val) + "+" + std::to_string(spec.n_test) +
                         " validation/test points");
    SplitIndices idx;
    idx.test_end = length;
    idx.val_end = length - spec.n_test;
    idx.train_end = idx.val_end - spec.n_val;
    return idx;
}

std::string write_rv_csv(const RvSeries& series) {
    std::string out = "date,rv,ret\n";
    for (std::size_t i = 0; i < series.dates.size(); ++i) {
        out += io::format_date(series.dates[i]);
        out += ',';
        out += io::format17(series.rv[i]);
        out += ',';
        if (!std::isnan(series.ret[i])) out += io::format17(series.ret[i]);
        out += '\n';
    }
    return out;
}

RvSeries parse_rv_csv(const std::string& content, const std::string& origin) {
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    RvSeries out;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = io::trim(line);
        if (t.empty()) continue;
        if (line_no == 1 && t == "date,rv,ret") continue;
        auto fields = io::split_csv_line(t);
        const std::string where = origin + ":" + std::to_string(line_no);
        if (fields.size() != 3) throw data_error(where + ": expected 'date,rv,ret'");
        try {
            out.dates.push_back(io::parse_date(fields[0]));
            out.rv.push_back(io::parse_double(fields[1], "rv"));
            out.ret.push_back(io::trim(fields[2]).empty()
                                  ? std::numeric_limits<double>::quiet_NaN()
                                  : io::parse_double(fields[2], "ret"));
        } catch (const data_error& e) {
            throw data_error(where + ": " + e.what());
        }
        if (out.rv.back() < 0.0) throw data_error(where + ": negative rv");
        if (out.dates.size() > 1 && out.dates.back() <= out.dates[out.dates.size() - 2])
            throw data_error(where + ": dates not strictly increasing");
    }
    if (out.dates.empty()) throw data_error(origin + ": no rv rows");
    return out;
}

RvSeries load_rv_csv(const std::string& path) {
    return parse_rv_csv(io::read_text_file(path), path);
}

void save_rv_csv(const RvSeries& series, const std::string& path) {
    io::write_text_file(path, write_rv_csv(series));
}

}  // namespace volcast::rvpipe
