#include "hetcache/analytics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hetcache/errors.hpp"
#include "hetcache/quadrature.hpp"

namespace hetcache {

namespace {

// Upper limit of the normalized integration variable v = pi * Lambda * r^2;
// exp(-v) is below 1e-16 beyond it.
const double kTruncation = 16.0 * std::numbers::ln10;

void check_inputs(const NetworkConfig& config, const ContentCatalog& catalog, const CachingPolicy& policy) {
    validate(config, catalog);
    const auto violations = validate_policy(policy, config, catalog);
    if (!violations.empty()) throw InvalidArgument("infeasible policy: " + describe(violations.front()));
}

void check_pair(const NetworkConfig& config, const CachingPolicy& policy, std::size_t i, std::size_t j) {
    if (i >= config.tiers.size() || i >= policy.tier_count())
        throw InvalidArgument("tier index " + std::to_string(i) + " out of range");
    if (j >= policy.content_count()) throw InvalidArgument("content index " + std::to_string(j) + " out of range");
    if (!(policy(i, j) > 0.0))
        throw UndefinedDistribution("tier " + std::to_string(i) + " never serves content " + std::to_string(j));
}

// sum_l lambda_l (S_l/S_i)^(2/beta) (p_lj H + (1 - p_lj) D + p_lj)
double exponent_rate(const NetworkConfig& config, const CachingPolicy& policy, const ChannelConstants& k,
                     std::size_t i, std::size_t j) {
    const double s = 2.0 / config.path_loss_exponent;
    const double si = config.tiers[i].power;
    double rate = 0.0;
    for (std::size_t l = 0; l < config.tiers.size(); ++l) {
        const double p = policy(l, j);
        rate += config.tiers[l].density * std::pow(config.tiers[l].power / si, s) *
                (p * k.H + (1.0 - p) * k.D + p);
    }
    return rate;
}

// sum_l lambda_l p_lj (S_l/S_i)^(2/beta)
double cacher_rate(const NetworkConfig& config, const CachingPolicy& policy, std::size_t i, std::size_t j) {
    const double s = 2.0 / config.path_loss_exponent;
    const double si = config.tiers[i].power;
    double rate = 0.0;
    for (std::size_t l = 0; l < config.tiers.size(); ++l)
        rate += config.tiers[l].density * policy(l, j) * std::pow(config.tiers[l].power / si, s);
    return rate;
}

// Integral over v in [0, 16 ln 10] of exp(-v) * exp(-tau sigma^2 r^beta / S_i)
// with r^2 = v / (pi * rate).
double noise_factor(const NetworkConfig& config, double rate, std::size_t i, double noise,
                    const QuadratureSettings& quad) {
    const double scale = config.sinr_threshold * noise / config.tiers[i].power;
    const double half_beta = 0.5 * config.path_loss_exponent;
    const double to_u = 1.0 / (std::numbers::pi * rate);
    auto integrand = [&](double v) { return std::exp(-v - scale * std::pow(v * to_u, half_beta)); };
    return integrate_adaptive(integrand, 0.0, kTruncation, quad.rel_tol, quad.abs_tol, quad.max_subdivisions)
        .value;
}

} // namespace

const char* to_string(SdpMode mode) noexcept {
    switch (mode) {
    case SdpMode::analytic_general: return "analytic-general";
    case SdpMode::analytic_interference_limited: return "analytic-interference-limited";
    case SdpMode::monte_carlo: return "monte-carlo";
    }
    return "unknown";
}

AssociationMatrix association_matrix(const NetworkConfig& config, const ContentCatalog& catalog,
                                     const CachingPolicy& policy) {
    check_inputs(config, catalog, policy);
    const auto a = tier_weights(config);
    const std::size_t n = config.tiers.size();
    const std::size_t m = catalog.size();
    AssociationMatrix out{Matrix(n, m), {}};
    for (std::size_t j = 0; j < m; ++j) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += a[i] * policy(i, j);
        if (!(total > 0.0)) {
            out.undefined_content.push_back(j);
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) out.w(i, j) = a[i] * policy(i, j) / total;
    }
    return out;
}

double serving_distance_pdf(const NetworkConfig& config, const CachingPolicy& policy, std::size_t i,
                            std::size_t j, double r) {
    check_pair(config, policy, i, j);
    if (!(r >= 0.0)) throw InvalidArgument("serving_distance_pdf: r must be nonnegative");
    // p_ij lambda_i / W_{i|j} equals the cacher rate seen from tier i.
    const double rate = cacher_rate(config, policy, i, j);
    return 2.0 * std::numbers::pi * rate * r * std::exp(-std::numbers::pi * rate * r * r);
}

double conditional_sdp(const NetworkConfig& config, const ContentCatalog& catalog, const CachingPolicy& policy,
                       std::size_t i, std::size_t j, const QuadratureSettings& quad) {
    check_inputs(config, catalog, policy);
    check_pair(config, policy, i, j);
    if (config.noise_power > 0.0) return conditional_sdp_by_quadrature(config, policy, i, j, quad);
    const auto k = channel_constants(config.sinr_threshold, config.path_loss_exponent);
    return cacher_rate(config, policy, i, j) / exponent_rate(config, policy, k, i, j);
}

double conditional_sdp_by_quadrature(const NetworkConfig& config, const CachingPolicy& policy, std::size_t i,
                                     std::size_t j, const QuadratureSettings& quad) {
    validate(config);
    check_pair(config, policy, i, j);
    const auto k = channel_constants(config.sinr_threshold, config.path_loss_exponent);
    const double rate = exponent_rate(config, policy, k, i, j);
    // (pi p_ij lambda_i / W) * integral du  ==  (cacher_rate / rate) * integral dv
    return cacher_rate(config, policy, i, j) / rate *
           noise_factor(config, rate, i, config.noise_power, quad);
}

SdpReport total_sdp_general(const NetworkConfig& config, const ContentCatalog& catalog,
                            const CachingPolicy& policy, const QuadratureSettings& quad) {
    if (config.noise_power == 0.0) {
        auto report = total_sdp_interference_limited(config, catalog, policy);
        report.mode = SdpMode::analytic_general;
        return report;
    }
    check_inputs(config, catalog, policy);
    const auto k = channel_constants(config.sinr_threshold, config.path_loss_exponent);
    const auto a = tier_weights(config);
    const std::size_t n = config.tiers.size();
    const std::size_t m = catalog.size();
    SdpReport report{0.0, Matrix(n, m), SdpMode::analytic_general, std::nullopt};
    for (std::size_t j = 0; j < m; ++j) {
        double denom = 0.0;
        for (std::size_t l = 0; l < n; ++l) denom += a[l] * (k.T * policy(l, j) + k.D);
        double column = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(policy(i, j) > 0.0)) continue;
            const double rate = exponent_rate(config, policy, k, i, j);
            const double pair = a[i] * policy(i, j) / denom * noise_factor(config, rate, i, config.noise_power, quad);
            report.per_pair(i, j) = pair;
            column += pair;
        }
        report.total += catalog.popularity(j) * column;
    }
    return report;
}

SdpReport total_sdp_interference_limited(const NetworkConfig& config, const ContentCatalog& catalog,
                                         const CachingPolicy& policy) {
    check_inputs(config, catalog, policy);
    const auto k = channel_constants(config.sinr_threshold, config.path_loss_exponent);
    const auto a = tier_weights(config);
    const std::size_t n = config.tiers.size();
    const std::size_t m = catalog.size();
    SdpReport report{0.0, Matrix(n, m), SdpMode::analytic_interference_limited, std::nullopt};
    for (std::size_t j = 0; j < m; ++j) {
        double denom = 0.0;
        for (std::size_t l = 0; l < n; ++l) denom += a[l] * (k.T * policy(l, j) + k.D);
        double column = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double pair = a[i] * policy(i, j) / denom;
            report.per_pair(i, j) = pair;
            column += pair;
        }
        report.total += catalog.popularity(j) * column;
    }
    return report;
}

double interference_limited_sdp(const std::vector<double>& weights, const ChannelConstants& k,
                                const ContentCatalog& catalog, const CachingPolicy& policy) {
    const std::size_t n = weights.size();
    double total = 0.0;
    for (std::size_t j = 0; j < catalog.size(); ++j) {
        double num = 0.0;
        double denom = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num += weights[i] * policy(i, j);
            denom += weights[i] * (k.T * policy(i, j) + k.D);
        }
        total += catalog.popularity(j) * num / denom;
    }
    return total;
}

Matrix sdp_gradient(const NetworkConfig& config, const ContentCatalog& catalog, const CachingPolicy& policy) {
    validate(config, catalog);
    const auto k = channel_constants(config.sinr_threshold, config.path_loss_exponent);
    const auto a = tier_weights(config);
    const std::size_t n = config.tiers.size();
    const std::size_t m = catalog.size();
    double e = 0.0;
    for (double w : a) e += k.D * w;
    Matrix g(n, m);
    for (std::size_t j = 0; j < m; ++j) {
        double denom = e;
        for (std::size_t l = 0; l < n; ++l) denom += a[l] * k.T * policy(l, j);
        for (std::size_t i = 0; i < n; ++i) g(i, j) = a[i] * catalog.popularity(j) * e / (denom * denom);
    }
    return g;
}

} // namespace hetcache
