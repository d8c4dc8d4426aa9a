#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace volcast::econo {

enum class GarchVariant { garch11, egarch, cgarch, gjr, tgarch };

GarchVariant garch_variant_from_string(const std::string& name);
const char* garch_variant_name(GarchVariant variant);

/// Parameter set shared by the whole GARCH family; each variant reads the
/// fields its recursion uses and ignores the rest. mu is the mean return
/// and stays 0 (series are demeaned ahead of fitting).
struct GarchParams {
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double delta = 0.0;  // eGARCH sign term
    double gamma = 0.0;  // GJR threshold loading
    double phi = 0.0;    // TGARCH threshold loading
    double rho = 0.0;    // cGARCH long-run persistence
    double theta = 0.0;  // cGARCH long-run shock loading
    double mu = 0.0;

    /// omega / (1 - alpha - beta); requires stationarity.
    double unconditional_variance() const;
};

/// Throws on violated positivity/stationarity invariants for the variant.
void validate_garch_params(GarchVariant variant, const GarchParams& p);

/// Conditional variance path. sigma2[0] = sigma2_0 when given, otherwise
/// the sample variance of r; the recursion applies from t = 1 on.
std::vector<double> garch11_filter(const GarchParams& p, std::span<const double> r,
                                   std::optional<double> sigma2_0 = std::nullopt);

/// Table-row recursions for the variant filters. TGARCH evolves sigma and
/// the path is returned squared so every variant reports variances.
std::vector<double> garch_variant_filter(GarchVariant variant, const GarchParams& p,
                                         std::span<const double> r,
                                         std::optional<double> sigma2_0 = std::nullopt);

/// One-step-ahead conditional variance: omega + alpha*r^2 + beta*sigma2.
double garch11_forecast(const GarchParams& p, double last_r, double last_sigma2);

struct Garch11Fit {
    GarchParams params;
    double loglik = 0.0;        // Gaussian log-likelihood at the optimum
    double train_mean = 0.0;    // mean removed from the series before fitting
    std::size_t start_index = 0;  // which multi-start candidate won
    std::size_t evals = 0;
};

/// Gaussian maximum likelihood for GARCH(1,1). The search runs a
/// derivative-free simplex from 8 spread starting points in a transformed
/// unconstrained space (log omega, logistic persistence and alpha-share),
/// so positivity and stationarity hold by construction. Ties between
/// starts break toward the lowest start index.
Garch11Fit garch11_fit(std::span<const double> returns);

/// Gaussian log-likelihood of the series under the filtered variance path.
double garch11_loglik(const GarchParams& p, std::span<const double> r);

/// key = value text map (variant, parameters, loglik, train_mean),
/// 17-significant-digit values so a parse round-trips exactly.
std::string export_garch_fit_text(const Garch11Fit& fit, GarchVariant variant = GarchVariant::garch11);
Garch11Fit parse_garch_fit_text(const std::string& text);

double sample_mean(std::span<const double> x);
double sample_variance(std::span<const double> x);  // population form, mean removed

}  // namespace volcast::econo
