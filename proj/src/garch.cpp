#include "volcast/garch.hpp"

#include <cmath>
#include <limits>

#include "volcast/errors.hpp"
#include "volcast/io.hpp"
#include "volcast/nelder_mead.hpp"

namespace volcast::econo {

namespace {

constexpr double kPi = 3.14159265358979323846;
// E|z| for standard normal z, used by the eGARCH recursion.
const double kAbsNormalMean = std::sqrt(2.0 / kPi);

// Shared by garch11_filter and the GJR branch so that gamma = 0 reduces to
// GARCH(1,1) bit-for-bit.
inline double garch_step(double omega, double alpha_eff, double beta, double eps, double prev) {
    return omega + alpha_eff * (eps * eps) + beta * prev;
}

double initial_variance(std::span<const double> r, std::optional<double> sigma2_0) {
    if (sigma2_0) {
        if (!(*sigma2_0 > 0.0)) throw std::invalid_argument("garch filter: sigma2_0 must be > 0");
        return *sigma2_0;
    }
    double var = sample_variance(r);
    if (!(var > 0.0)) throw numeric_error("garch filter: sample variance of returns is zero");
    return var;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

GarchVariant garch_variant_from_string(const std::string& name) {
    if (name == "garch11") return GarchVariant::garch11;
    if (name == "egarch") return GarchVariant::egarch;
    if (name == "cgarch") return GarchVariant::cgarch;
    if (name == "gjr") return GarchVariant::gjr;
    if (name == "tgarch") return GarchVariant::tgarch;
    throw std::invalid_argument("unknown GARCH variant '" + name + "'");
}

const char* garch_variant_name(GarchVariant variant) {
    switch (variant) {
        case GarchVariant::garch11: return "garch11";
        case GarchVariant::egarch: return "egarch";
        case GarchVariant::cgarch: return "cgarch";
        case GarchVariant::gjr: return "gjr";
        case GarchVariant::tgarch: return "tgarch";
    }
    return "?";
}

double GarchParams::unconditional_variance() const { return omega / (1.0 - alpha - beta); }

void validate_garch_params(GarchVariant variant, const GarchParams& p) {
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument(std::string(garch_variant_name(variant)) + ": " + why);
    };
    switch (variant) {
        case GarchVariant::garch11:
            if (!(p.omega > 0.0)) fail("omega must be > 0");
            if (p.alpha < 0.0 || p.beta < 0.0) fail("alpha and beta must be >= 0");
            if (!(p.alpha + p.beta < 1.0)) fail("alpha + beta must be < 1 (stationarity)");
            break;
        case GarchVariant::gjr:
            if (!(p.omega > 0.0)) fail("omega must be > 0");
            if (p.alpha < 0.0 || p.beta < 0.0) fail("alpha and beta must be >= 0");
            if (!(p.alpha + p.gamma / 2.0 + p.beta < 1.0))
                fail("alpha + gamma/2 + beta must be < 1");
            break;
        case GarchVariant::egarch:
            if (!(std::abs(p.beta) < 1.0)) fail("|beta| must be < 1 (log-variance stability)");
            break;
        case GarchVariant::cgarch:
            if (!(p.omega > 0.0)) fail("omega must be > 0");
            if (p.alpha < 0.0 || p.beta < 0.0) fail("alpha and beta must be >= 0");
            if (!(p.alpha + p.beta < 1.0)) fail("alpha + beta must be < 1");
            if (!(p.rho >= 0.0 && p.rho < 1.0)) fail("rho must be in [0, 1)");
            break;
        case GarchVariant::tgarch:
            if (!(p.omega > 0.0)) fail("omega must be > 0");
            break;
    }
    for (double v : {p.omega, p.alpha, p.beta, p.delta, p.gamma, p.phi, p.rho, p.theta, p.mu})
        if (!std::isfinite(v)) fail("non-finite parameter");
}

std::vector<double> garch11_filter(const GarchParams& p, std::span<const double> r,
                                   std::optional<double> sigma2_0) {
    validate_garch_params(GarchVariant::garch11, p);
    if (r.empty()) throw std::invalid_argument("garch11_filter: empty series");
    std::vector<double> sigma2(r.size());
    sigma2[0] = initial_variance(r, sigma2_0);
    for (std::size_t t = 1; t < r.size(); ++t)
        sigma2[t] = garch_step(p.omega, p.alpha, p.beta, r[t - 1] - p.mu, sigma2[t - 1]);
    return sigma2;
}

std::vector<double> garch_variant_filter(GarchVariant variant, const GarchParams& p,
                                         std::span<const double> r,
                                         std::optional<double> sigma2_0) {
    validate_garch_params(variant, p);
    if (r.empty()) throw std::invalid_argument("garch_variant_filter: empty series");
    const std::size_t n = r.size();
    std::vector<double> sigma2(n);

    switch (variant) {
        case GarchVariant::garch11:
            return garch11_filter(p, r, sigma2_0);
        case GarchVariant::gjr: {
            sigma2[0] = initial_variance(r, sigma2_0);
            for (std::size_t t = 1; t < n; ++t) {
                double eps = r[t - 1] - p.mu;
                double indicator = r[t - 1] < p.mu ? 1.0 : 0.0;
                double alpha_eff = p.alpha + p.gamma * indicator;
                sigma2[t] = garch_step(p.omega, alpha_eff, p.beta, eps, sigma2[t - 1]);
                if (!(sigma2[t] > 0.0))
                    throw numeric_error("gjr: nonpositive variance at step " + std::to_string(t));
            }
            return sigma2;
        }
        case GarchVariant::egarch: {
            sigma2[0] = initial_variance(r, sigma2_0);
            double log_s2 = std::log(sigma2[0]);
            for (std::size_t t = 1; t < n; ++t) {
                double sd = std::sqrt(sigma2[t - 1]);
                double z = (r[t - 1] - p.mu) / sd;
                log_s2 = p.omega + p.alpha * (std::abs(z) - kAbsNormalMean) + p.delta * z +
                         p.beta * std::log(sigma2[t - 1]);
                sigma2[t] = std::exp(log_s2);
                if (!(sigma2[t] > 0.0) || !std::isfinite(sigma2[t]))
                    throw numeric_error("egarch: invalid variance at step " + std::to_string(t));
            }
            return sigma2;
        }
        case GarchVariant::cgarch: {
            sigma2[0] = initial_variance(r, sigma2_0);
            double q_prev = sigma2[0];  // long-run component starts at the unconditional level
            for (std::size_t t = 1; t < n; ++t) {
                double eps2 = (r[t - 1] - p.mu) * (r[t - 1] - p.mu);
                double q_t = p.omega + p.rho * q_prev + p.theta * (eps2 - sigma2[t - 1]);
                sigma2[t] = q_t + p.alpha * (eps2 - q_prev) + p.beta * (sigma2[t - 1] - q_prev);
                if (!(sigma2[t] > 0.0))
                    throw numeric_error("cgarch: nonpositive variance at step " +
                                        std::to_string(t));
                q_prev = q_t;
            }
            return sigma2;
        }
        case GarchVariant::tgarch: {
            // This row evolves sigma itself; the path is squared on output.
            double sd = std::sqrt(initial_variance(r, sigma2_0));
            sigma2[0] = sd * sd;
            for (std::size_t t = 1; t < n; ++t) {
                double eps = r[t - 1] - p.mu;
                double threshold = eps < 0.0 ? 1.0 : 0.0;
                sd = p.omega + p.alpha * eps + p.beta * sd + p.phi * eps * threshold;
                if (!(sd > 0.0))
                    throw numeric_error("tgarch: nonpositive sigma at step " + std::to_string(t));
                sigma2[t] = sd * sd;
            }
            return sigma2;
        }
    }
    throw std::invalid_argument("garch_variant_filter: unknown variant");
}

double garch11_forecast(const GarchParams& p, double last_r, double last_sigma2) {
    validate_garch_params(GarchVariant::garch11, p);
    return garch_step(p.omega, p.alpha, p.beta, last_r - p.mu, last_sigma2);
}

double garch11_loglik(const GarchParams& p, std::span<const double> r) {
    std::vector<double> sigma2 = garch11_filter(p, r);
    double ll = 0.0;
    for (std::size_t t = 0; t < r.size(); ++t) {
        double eps = r[t] - p.mu;
        ll += -0.5 * (std::log(2.0 * kPi * sigma2[t]) + eps * eps / sigma2[t]);
    }
    return ll;
}

namespace {

struct TransformedGarch {
    // u = (log omega, logit persistence, logit alpha-share)
    static GarchParams to_params(const std::vector<double>& u) {
        GarchParams p;
        p.omega = std::exp(u[0]);
        double persistence = logistic(u[1]);
        double share = logistic(u[2]);
        p.alpha = persistence * share;
        p.beta = persistence * (1.0 - share);
        return p;
    }
    static std::vector<double> from_natural(double omega, double persistence, double share) {
        auto logit = [](double x) { return std::log(x / (1.0 - x)); };
        return {std::log(omega), logit(persistence), logit(share)};
    }
};

}  // namespace

Garch11Fit garch11_fit(std::span<const double> returns) {
    if (returns.size() < 100)
        throw data_error("garch11_fit: need at least 100 observations, got " +
                         std::to_string(returns.size()));

    const double mean = sample_mean(returns);
    std::vector<double> r(returns.begin(), returns.end());
    for (double& v : r) v -= mean;

    const double var = sample_variance(r);
    if (!(var > 0.0)) throw numeric_error("garch11_fit: degenerate series (zero variance)");

    auto objective = [&r, var](const std::vector<double>& u) {
        GarchParams p = TransformedGarch::to_params(u);
        if (!(p.omega > 0.0) || !std::isfinite(p.omega)) return 1e300;
        double ll = 0.0;
        double s2 = var;
        const std::size_t n = r.size();
        for (std::size_t t = 0; t < n; ++t) {
            if (t > 0) s2 = p.omega + p.alpha * (r[t - 1] * r[t - 1]) + p.beta * s2;
            if (!(s2 > 0.0) || !std::isfinite(s2)) return 1e300;
            ll += -0.5 * (std::log(2.0 * kPi * s2) + r[t] * r[t] / s2);
        }
        if (!std::isfinite(ll)) return 1e300;
        return -ll;
    };

    // 8 spread starting points over (persistence, alpha share, omega scale).
    struct Start {
        double persistence, share, omega_scale;
    };
    const Start starts[8] = {{0.50, 0.15, 1.0}, {0.50, 0.15, 0.5}, {0.50, 0.45, 1.0},
                             {0.50, 0.45, 0.5}, {0.95, 0.15, 1.0}, {0.95, 0.15, 0.5},
                             {0.95, 0.45, 1.0}, {0.95, 0.45, 0.5}};

    Garch11Fit best;
    bool any_improved = false;
    double best_neg_ll = std::numeric_limits<double>::infinity();
    std::size_t total_evals = 0;
    std::string diagnostics;

    for (std::size_t i = 0; i < 8; ++i) {
        double omega0 = starts[i].omega_scale * var * (1.0 - starts[i].persistence);
        std::vector<double> u0 =
            TransformedGarch::from_natural(omega0, starts[i].persistence, starts[i].share);
        opt::NelderMeadResult res = opt::nelder_mead(objective, u0, 0.4, 2000, 1e-12);
        total_evals += res.evals;
        any_improved = any_improved || res.improved;
        diagnostics += "start " + std::to_string(i) + ": f=" + io::format17(res.fx) + "\n";
        if (res.fx < best_neg_ll) {
            best_neg_ll = res.fx;
            best.params = TransformedGarch::to_params(res.x);
            best.start_index = i;
        }
    }

    if (!any_improved || !std::isfinite(best_neg_ll) || best_neg_ll >= 1e300)
        throw numeric_error("garch11_fit: no start improved the likelihood\n" + diagnostics);

    best.loglik = -best_neg_ll;
    best.train_mean = mean;
    best.evals = total_evals;
    validate_garch_params(GarchVariant::garch11, best.params);
    return best;
}

std::string export_garch_fit_text(const Garch11Fit& fit, GarchVariant variant) {
    io::KvPairs kv;
    kv.emplace_back("variant", garch_variant_name(variant));
    kv.emplace_back("omega", io::format17(fit.params.omega));
    kv.emplace_back("alpha", io::format17(fit.params.alpha));
    kv.emplace_back("beta", io::format17(fit.params.beta));
    kv.emplace_back("mu", io::format17(fit.params.mu));
    kv.emplace_back("loglik", io::format17(fit.loglik));
    kv.emplace_back("train_mean", io::format17(fit.train_mean));
    return io::write_kv(kv);
}

Garch11Fit parse_garch_fit_text(const std::string& text) {
    io::KvPairs kv = io::parse_kv(text);
    if (io::kv_get(kv, "variant") != "garch11")
        throw data_error("parse_garch_fit_text: expected variant garch11, got '" +
                         io::kv_get(kv, "variant") + "'");
    Garch11Fit fit;
    fit.params.omega = io::parse_double(io::kv_get(kv, "omega"), "omega");
    fit.params.alpha = io::parse_double(io::kv_get(kv, "alpha"), "alpha");
    fit.params.beta = io::parse_double(io::kv_get(kv, "beta"), "beta");
    fit.params.mu = io::parse_double(io::kv_get(kv, "mu"), "mu");
    fit.loglik = io::parse_double(io::kv_get(kv, "loglik"), "loglik");
    fit.train_mean = io::parse_double(io::kv_get(kv, "train_mean"), "train_mean");
    return fit;
}

double sample_mean(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v;
    return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
    if (x.empty()) return 0.0;
    double mean = sample_mean(x);
    double acc = 0.0;
    for (double v : x) acc += (v - mean) * (v - mean);
    return acc / static_cast<double>(x.size());
}

}  // namespace volcast::econo
