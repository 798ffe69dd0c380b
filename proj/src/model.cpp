#include "hetcache/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hetcache/errors.hpp"

namespace hetcache {

namespace {

[[noreturn]] void fail(const std::string& what) { throw InvalidArgument(what); }

std::string tier_field(std::size_t i, const char* field) {
    return "tiers[" + std::to_string(i) + "]." + field;
}

} // namespace

void validate(const NetworkConfig& config) {
    if (config.tiers.empty()) fail("tiers: at least one tier is required");
    for (std::size_t i = 0; i < config.tiers.size(); ++i) {
        const auto& t = config.tiers[i];
        if (!(t.density > 0.0) || !std::isfinite(t.density))
            fail(tier_field(i, "density") + " must be positive and finite");
        if (!(t.power > 0.0) || !std::isfinite(t.power))
            fail(tier_field(i, "power") + " must be positive and finite");
        if (!(t.cache_size >= 0.0) || !std::isfinite(t.cache_size))
            fail(tier_field(i, "cache_size") + " must be nonnegative and finite");
    }
    if (!(config.path_loss_exponent > 2.0) || !std::isfinite(config.path_loss_exponent))
        fail("path_loss_exponent must exceed 2");
    if (!(config.sinr_threshold > 0.0) || !std::isfinite(config.sinr_threshold))
        fail("sinr_threshold must be positive");
    if (!(config.noise_power >= 0.0) || !std::isfinite(config.noise_power))
        fail("noise_power must be nonnegative");
}

void validate(const NetworkConfig& config, const ContentCatalog& catalog) {
    validate(config);
    const auto m = static_cast<double>(catalog.size());
    for (std::size_t i = 0; i < config.tiers.size(); ++i) {
        if (config.tiers[i].cache_size > m)
            fail(tier_field(i, "cache_size") + " exceeds the catalog size");
    }
}

std::vector<double> tier_weights(const NetworkConfig& config) {
    const double exponent = 2.0 / config.path_loss_exponent;
    std::vector<double> w;
    w.reserve(config.tiers.size());
    for (const auto& t : config.tiers) w.push_back(t.density * std::pow(t.power, exponent));
    return w;
}

ContentCatalog::ContentCatalog(std::vector<double> popularity) : popularity_(std::move(popularity)) {
    if (popularity_.empty()) fail("catalog: at least one content is required");
    long double sum = 0.0L;
    for (std::size_t j = 0; j < popularity_.size(); ++j) {
        const double t = popularity_[j];
        if (!(t >= 0.0) || !std::isfinite(t))
            fail("catalog.popularity[" + std::to_string(j) + "] must be nonnegative");
        if (j > 0 && t > popularity_[j - 1])
            fail("catalog.popularity must be sorted nonincreasing (index " + std::to_string(j) + ")");
        sum += t;
    }
    if (std::abs(static_cast<double>(sum) - 1.0) > 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << "catalog.popularity must sum to 1 (sum = " << sum << ")";
        fail(os.str());
    }
}

ContentCatalog make_zipf_catalog(std::size_t size, double gamma) {
    if (size == 0) fail("catalog size must be positive");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) fail("zipf exponent must be nonnegative");
    std::vector<double> t(size);
    // Sum smallest terms first.
    long double norm = 0.0L;
    for (std::size_t j = size; j-- > 0;) {
        t[j] = std::pow(static_cast<double>(j + 1), -gamma);
        norm += t[j];
    }
    for (auto& v : t) v = static_cast<double>(v / norm);
    return ContentCatalog(std::move(t));
}

std::vector<PolicyViolation> validate_policy(const CachingPolicy& policy, const NetworkConfig& config,
                                             const ContentCatalog& catalog) {
    const std::size_t n = config.tiers.size();
    const std::size_t m = catalog.size();
    if (policy.tier_count() != n || policy.content_count() != m) {
        std::ostringstream os;
        os << "policy shape " << policy.tier_count() << "x" << policy.content_count()
           << " does not match " << n << " tiers x " << m << " contents";
        fail(os.str());
    }
    std::vector<PolicyViolation> out;
    for (std::size_t i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double p = policy(i, j);
            if (std::isnan(p)) {
                out.push_back({PolicyViolation::Kind::box, i, j, std::numeric_limits<double>::infinity()});
                continue;
            }
            if (p < 0.0) out.push_back({PolicyViolation::Kind::box, i, j, -p});
            if (p > 1.0) out.push_back({PolicyViolation::Kind::box, i, j, p - 1.0});
            row_sum += p;
        }
        const double excess = row_sum - config.tiers[i].cache_size;
        if (excess > kBudgetTolerance) out.push_back({PolicyViolation::Kind::budget, i, 0, excess});
    }
    return out;
}

std::string describe(const PolicyViolation& v) {
    std::ostringstream os;
    if (v.kind == PolicyViolation::Kind::box)
        os << "p[" << v.tier << "][" << v.content << "] outside [0,1] by " << v.magnitude;
    else
        os << "row " << v.tier << " exceeds its cache budget by " << v.magnitude;
    return os.str();
}

double dbm_to_watts(double dbm) noexcept { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) noexcept { return 10.0 * std::log10(watts) + 30.0; }
double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) noexcept { return 10.0 * std::log10(linear); }

double density_per_disc(double k, double radius_m) noexcept {
    return k / (std::numbers::pi * radius_m * radius_m);
}

} // namespace hetcache
