#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace volcast::rvpipe {

struct PriceSeries {
    std::vector<std::int64_t> timestamps;  // epoch seconds, strictly increasing
    std::vector<double> prices;            // > 0
};

struct LoadedPrices {
    PriceSeries series;
    std::size_t duplicates_collapsed = 0;
    std::size_t rows_reordered = 0;
};

/// Daily series: rv is realized volatility (sqrt of summed squared intraday
/// log returns), ret the close-to-close log return. ret[0] is NaN — there
/// is no previous close on the first day.
struct RvSeries {
    std::vector<std::int64_t> dates;  // days since epoch, strictly increasing
    std::vector<double> rv;
    std::vector<double> ret;
    std::size_t days_dropped = 0;  // days below the intraday observation floor
};

/// Parses `timestamp,price` CSV (epoch seconds or ISO-8601 timestamps).
/// Out-of-order rows are sorted with a warning count; duplicate timestamps
/// collapse to the last value seen.
LoadedPrices load_prices(const std::string& path);
LoadedPrices parse_prices_csv(const std::string& content, const std::string& origin);

/// Aggregates per UTC day: intraday log returns within the day, RV their
/// root sum of squares. Days with fewer than min_day_obs observations are
/// dropped (counted in days_dropped).
RvSeries daily_realized_vol(const PriceSeries& prices, std::size_t min_day_obs = 30);

enum class ScalerMode { minmax, scale_only };

/// Affine normalizer fitted on the training segment only. minmax maps the
/// train range onto [0,1]; scale_only divides by the train max |x|, which
/// keeps zero fixed for signed returns.
class Scaler {
public:
    static Scaler fit(std::span<const double> train, ScalerMode mode);
    static Scaler restore(ScalerMode mode, double min, double max, double scale);

    double apply(double x) const;
    double invert(double y) const;
    void apply(std::span<double> xs) const;

    ScalerMode mode() const { return mode_; }
    double min() const { return min_; }
    double max() const { return max_; }
    double scale() const { return scale_; }  // scale_only divisor

private:
    ScalerMode mode_ = ScalerMode::minmax;
    double min_ = 0.0;
    double max_ = 1.0;
    double scale_ = 1.0;
};

ScalerMode scaler_mode_from_string(const std::string& name);
const char* scaler_mode_name(ScalerMode mode);

struct SplitSpec {
    std::size_t n_val = 200;
    std::size_t n_test = 200;
};

struct SplitIndices {
    std::size_t train_end = 0;  // [0, train_end)
    std::size_t val_end = 0;    // [train_end, val_end)
    std::size_t test_end = 0;   // [val_end, test_end)
};

/// Chronological contiguous split; validation and test take the final
/// n_val + n_test points. Requires >= 100 training points.
SplitIndices split(std::size_t length, const SplitSpec& spec = {});

// CSV schema `date,rv,ret` with 17-significant-digit values; ret is empty
// on the first row.
std::string write_rv_csv(const RvSeries& series);
RvSeries parse_rv_csv(const std::string& content, const std::string& origin);
RvSeries load_rv_csv(const std::string& path);
void save_rv_csv(const RvSeries& series, const std::string& path);

}  // namespace volcast::rvpipe
