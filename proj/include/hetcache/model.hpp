#pragma once

// Domain types shared by every module: tier parameters, the network, the
// content catalog and the per-tier caching probability matrix.
//
// Units are fixed at ingestion: powers in watts, densities in base stations
// per square meter, SINR thresholds linear. Conversions from dBm / dB and
// from the "k / (pi r^2)" density shorthand live here and nowhere else.

#include <cstddef>
#include <string>
#include <vector>

#include "hetcache/matrix.hpp"

namespace hetcache {

struct TierParams {
    double density = 0.0;     // BS per m^2
    double power = 0.0;       // W
    double cache_size = 0.0;  // content slots, may be fractional

    bool operator==(const TierParams&) const = default;
};

struct NetworkConfig {
    std::vector<TierParams> tiers;
    double path_loss_exponent = 4.0;
    double sinr_threshold = 0.1;  // linear
    double noise_power = 0.0;     // W; zero selects the interference-limited model

    std::size_t tier_count() const noexcept { return tiers.size(); }
    bool operator==(const NetworkConfig&) const = default;
};

/// Throws InvalidArgument naming the first offending field.
void validate(const NetworkConfig& config);

/// Per-tier association weights lambda_i * S_i^(2/beta).
std::vector<double> tier_weights(const NetworkConfig& config);

/// Popularity vector over a catalog of M equal-length contents, sorted
/// nonincreasing and normalized.
class ContentCatalog {
public:
    /// Validates and stores an explicit popularity vector. Entries must be
    /// nonnegative, nonincreasing and sum to one within 1e-12.
    explicit ContentCatalog(std::vector<double> popularity);

    std::size_t size() const noexcept { return popularity_.size(); }
    double popularity(std::size_t j) const { return popularity_.at(j); }
    const std::vector<double>& popularity() const noexcept { return popularity_; }

    bool operator==(const ContentCatalog&) const = default;

private:
    std::vector<double> popularity_;
};

/// Zipf popularity t_j proportional to j^(-gamma), j = 1..M.
ContentCatalog make_zipf_catalog(std::size_t size, double gamma);

/// Checks a network against a catalog: valid network and every Q_i <= M.
void validate(const NetworkConfig& config, const ContentCatalog& catalog);

/// The N x M matrix of caching probabilities p_ij.
struct CachingPolicy {
    Matrix probs;

    std::size_t tier_count() const noexcept { return probs.rows(); }
    std::size_t content_count() const noexcept { return probs.cols(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return probs(i, j); }

    bool operator==(const CachingPolicy&) const = default;
};

struct PolicyViolation {
    enum class Kind { box, budget };
    Kind kind;
    std::size_t tier;
    std::size_t content;  // unused for budget violations
    double magnitude;     // distance outside [0,1], or row-sum excess over Q_i
};

/// Tolerance on the per-row budget check.
inline constexpr double kBudgetTolerance = 1e-9;

/// Returns every violated box or budget constraint; empty means feasible.
/// Throws InvalidArgument when the matrix shape does not match N x M.
std::vector<PolicyViolation> validate_policy(const CachingPolicy& policy,
                                             const NetworkConfig& config,
                                             const ContentCatalog& catalog);

std::string describe(const PolicyViolation& violation);

double dbm_to_watts(double dbm) noexcept;
double watts_to_dbm(double watts) noexcept;
double db_to_linear(double db) noexcept;
double linear_to_db(double linear) noexcept;

/// Density k / (pi r^2), the usual way of writing "k BSs per disc of radius r".
double density_per_disc(double k, double radius_m) noexcept;

} // namespace hetcache
