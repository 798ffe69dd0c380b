#pragma once

// Uniform caching (p_ij = Q_i / M) and the loci of tier density or power
// against cache size that keep its SDP fixed.
//
// Under the uniform policy the N-tier SDP equals that of a single tier whose
// cache is the weighted average Q_e = sum a_i Q_i / sum a_i, a_i = lambda_i S_i^(2/beta),
// so holding the SDP fixed is the same as holding Q_e fixed.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hetcache/model.hpp"

namespace hetcache {

double equivalent_cache_size(const NetworkConfig& config);

struct UniformCacheSummary {
    double q_e = 0.0;
    double sdp = 0.0;
};

/// Q_e / (T Q_e + D M). Throws InvalidArgument if Q_e > M.
UniformCacheSummary uniform_sdp(const NetworkConfig& config, const ContentCatalog& catalog);

/// Same formula from its ingredients; used for closure checks.
double uniform_sdp_value(double q_e, std::size_t catalog_size, double tau, double beta);

enum class TradeoffKind { same_tier_density, same_tier_power, cross_tier_density, cross_tier_power };

const char* to_string(TradeoffKind kind) noexcept;

struct TradeoffPoint {
    double q = 0.0;      // the swept cache size Q_i
    double value = 0.0;  // lambda or S (W) of the adjusted tier
};

struct RejectedPoint {
    double q = 0.0;
    std::optional<double> value;  // absent at a singular point
    std::string reason;
};

/// Q range on which the law yields a positive finite value.
/// Unbounded ends are +/- infinity; `empty` when no such Q exists.
struct ValidityInterval {
    double lower = 0.0;
    double upper = 0.0;
    bool lower_closed = true;
    bool upper_closed = false;
    bool empty = false;

    bool contains(double q) const noexcept;
};

struct TradeoffConstants {
    double q_e = 0.0;
    std::optional<double> k1, k2, k3, k4, k5, k6;
};

struct TradeoffCurve {
    TradeoffKind kind = TradeoffKind::same_tier_density;
    std::size_t source_tier = 0;    // tier whose cache size is swept
    std::size_t adjusted_tier = 0;  // tier whose density or power follows
    std::vector<TradeoffPoint> points;
    std::vector<RejectedPoint> rejected;
    TradeoffConstants constants;
    ValidityInterval validity_interval;
};

/// Closure tolerance: each accepted point reproduces the target Q_e this closely.
inline constexpr double kClosureTolerance = 1e-9;

/// lambda_i(Q_i) = K1 / (Q_i - Q_e), other tiers and S_i held fixed.
TradeoffCurve same_tier_density_curve(const NetworkConfig& config, std::size_t tier, double target_qe,
                                      const std::vector<double>& q_grid);

/// S_i(Q_i) = (K2 / (Q_i - Q_e))^(beta/2), other tiers and lambda_i held fixed.
TradeoffCurve same_tier_power_curve(const NetworkConfig& config, std::size_t tier, double target_qe,
                                    const std::vector<double>& q_grid);

/// Density (kind cross_tier_density) or power (cross_tier_power) of tier j
/// as tier i's cache size moves: (K3 - K4 Q_i) / K5, or ((K3 - K4 Q_i) / K6)^(beta/2).
TradeoffCurve cross_tier_curve(const NetworkConfig& config, TradeoffKind kind, std::size_t source_tier,
                               std::size_t adjusted_tier, double target_qe, const std::vector<double>& q_grid);

/// Network with the curve point applied: Q of the source tier and density or
/// power of the adjusted tier replaced.
NetworkConfig apply_point(const NetworkConfig& config, const TradeoffCurve& curve, const TradeoffPoint& point);

} // namespace hetcache
