#include "volcast/har.hpp"

#include <array>
#include <cmath>

#include "volcast/errors.hpp"
#include "volcast/io.hpp"

namespace volcast::econo {

namespace {

constexpr std::size_t kWeekly = 5;
constexpr std::size_t kMonthly = 22;

// Solve the 4x4 normal equations by Cholesky; returns false when a pivot
// degenerates (near-singular X'X).
bool solve_normal_equations(const std::array<std::array<double, 4>, 4>& xtx,
                            const std::array<double, 4>& xty, std::array<double, 4>& out) {
    std::array<std::array<double, 4>, 4> chol{};
    double max_diag = 0.0;
    for (int i = 0; i < 4; ++i) max_diag = std::max(max_diag, std::abs(xtx[i][i]));
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j <= i; ++j) {
            double acc = xtx[i][j];
            for (int k = 0; k < j; ++k) acc -= chol[i][k] * chol[j][k];
            if (i == j) {
                if (!(acc > 1e-12 * max_diag)) return false;
                chol[i][i] = std::sqrt(acc);
            } else {
                chol[i][j] = acc / chol[j][j];
            }
        }
    }
    std::array<double, 4> y{};
    for (int i = 0; i < 4; ++i) {
        double acc = xty[i];
        for (int k = 0; k < i; ++k) acc -= chol[i][k] * y[k];
        y[i] = acc / chol[i][i];
    }
    for (int i = 3; i >= 0; --i) {
        double acc = y[i];
        for (int k = i + 1; k < 4; ++k) acc -= chol[k][i] * out[k];
        out[i] = acc / chol[i][i];
    }
    return true;
}

// Modified Gram-Schmidt with column dropping: dependent columns keep a zero
// coefficient so degenerate designs still yield the least-squares fit on the
// surviving columns.
bool solve_rank_revealing(const std::vector<std::array<double, 4>>& x,
                          const std::vector<double>& y, std::array<double, 4>& out) {
    const std::size_t n = x.size();
    std::vector<std::vector<double>> q;
    std::vector<std::array<double, 4>> r_rows;  // R in the surviving-column basis
    std::vector<int> kept;

    std::array<double, 4> col_norm{};
    for (std::size_t i = 0; i < n; ++i)
        for (int j = 0; j < 4; ++j) col_norm[j] += x[i][j] * x[i][j];

    for (int j = 0; j < 4; ++j) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = x[i][j];
        std::array<double, 4> coeffs{};
        for (std::size_t k = 0; k < q.size(); ++k) {
            double proj = 0.0;
            for (std::size_t i = 0; i < n; ++i) proj += q[k][i] * v[i];
            coeffs[k] = proj;
            for (std::size_t i = 0; i < n; ++i) v[i] -= proj * q[k][i];
        }
        double norm2 = 0.0;
        for (double vi : v) norm2 += vi * vi;
        double norm = std::sqrt(norm2);
        if (norm <= 1e-10 * std::sqrt(std::max(col_norm[j], 1.0))) continue;  // dependent; drop
        for (double& vi : v) vi /= norm;
        coeffs[q.size()] = norm;
        q.push_back(std::move(v));
        r_rows.push_back(coeffs);
        kept.push_back(j);
    }
    if (q.empty()) return false;

    std::vector<double> qty(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += q[k][i] * y[i];
        qty[k] = acc;
    }
    // back-substitute R beta = Q'y in the kept basis
    std::vector<double> beta(q.size(), 0.0);
    for (std::size_t k = q.size(); k-- > 0;) {
        double acc = qty[k];
        for (std::size_t j = k + 1; j < q.size(); ++j) acc -= r_rows[j][k] * beta[j];
        beta[k] = acc / r_rows[k][k];
    }
    out = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < kept.size(); ++k) out[static_cast<std::size_t>(kept[k])] = beta[k];
    return true;
}

}  // namespace

std::vector<HarFeatureRow> har_features(std::span<const double> rv) {
    if (rv.size() < kMonthly + 1)
        throw data_error("har_features: need at least " + std::to_string(kMonthly + 1) +
                         " observations, got " + std::to_string(rv.size()));
    std::vector<HarFeatureRow> rows;
    rows.reserve(rv.size() - kMonthly + 1);
    for (std::size_t t = kMonthly - 1; t < rv.size(); ++t) {
        HarFeatureRow row;
        row.t = t;
        row.d = rv[t];
        double w = 0.0;
        for (std::size_t i = t + 1 - kWeekly; i <= t; ++i) w += rv[i];
        row.w = w / static_cast<double>(kWeekly);
        double m = 0.0;
        for (std::size_t i = t + 1 - kMonthly; i <= t; ++i) m += rv[i];
        row.m = m / static_cast<double>(kMonthly);
        rows.push_back(row);
    }
    return rows;
}

HarFit har_fit(std::span<const double> rv) {
    std::vector<HarFeatureRow> all = har_features(rv);
    // usable rows pair features at t with the target rv[t+1]
    std::vector<std::array<double, 4>> x;
    std::vector<double> y;
    for (const HarFeatureRow& row : all) {
        if (row.t + 1 >= rv.size()) break;
        x.push_back({1.0, row.d, row.w, row.m});
        y.push_back(rv[row.t + 1]);
    }
    if (x.size() < 30)
        throw data_error("har_fit: need at least 30 usable rows, got " + std::to_string(x.size()));

    std::array<std::array<double, 4>, 4> xtx{};
    std::array<double, 4> xty{};
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (int a = 0; a < 4; ++a) {
            xty[a] += x[i][a] * y[i];
            for (int b = 0; b < 4; ++b) xtx[a][b] += x[i][a] * x[i][b];
        }
    }

    HarFit fit;
    fit.rows = x.size();
    std::array<double, 4> beta{};
    if (solve_normal_equations(xtx, xty, beta)) {
        fit.params = {beta[0], beta[1], beta[2], beta[3]};
        return fit;
    }
    fit.used_fallback = true;
    if (!solve_rank_revealing(x, y, beta))
        throw numeric_error("har_fit: design matrix singular even after column dropping");
    fit.params = {beta[0], beta[1], beta[2], beta[3]};
    return fit;
}

double har_forecast(const HarParams& p, const HarFeatureRow& f) {
    return p.c + p.beta_d * f.d + p.beta_w * f.w + p.beta_m * f.m;
}

std::string export_har_fit_text(const HarFit& fit) {
    io::KvPairs kv;
    kv.emplace_back("variant", "har");
    kv.emplace_back("c", io::format17(fit.params.c));
    kv.emplace_back("beta_d", io::format17(fit.params.beta_d));
    kv.emplace_back("beta_w", io::format17(fit.params.beta_w));
    kv.emplace_back("beta_m", io::format17(fit.params.beta_m));
    kv.emplace_back("rows", std::to_string(fit.rows));
    return io::write_kv(kv);
}

HarFit parse_har_fit_text(const std::string& text) {
    io::KvPairs kv = io::parse_kv(text);
    if (io::kv_get(kv, "variant") != "har")
        throw data_error("parse_har_fit_text: expected variant har");
    HarFit fit;
    fit.params.c = io::parse_double(io::kv_get(kv, "c"), "c");
    fit.params.beta_d = io::parse_double(io::kv_get(kv, "beta_d"), "beta_d");
    fit.params.beta_w = io::parse_double(io::kv_get(kv, "beta_w"), "beta_w");
    fit.params.beta_m = io::parse_double(io::kv_get(kv, "beta_m"), "beta_m");
    fit.rows = static_cast<std::size_t>(io::parse_int(io::kv_get(kv, "rows"), "rows"));
    return fit;
}

}  // namespace volcast::econo
