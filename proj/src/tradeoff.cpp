#include "hetcache/tradeoff.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hetcache/errors.hpp"
#include "hetcache/specfun.hpp"

namespace hetcache {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_tier(const NetworkConfig& config, std::size_t tier, const char* what) {
    if (tier >= config.tiers.size())
        throw InvalidArgument(std::string(what) + " " + std::to_string(tier) + " out of range");
}

void check_curve_inputs(const NetworkConfig& config, double target_qe, const std::vector<double>& grid) {
    validate(config);
    if (config.tiers.size() < 2) throw InvalidArgument("tradeoff curves need at least two tiers");
    if (!(target_qe >= 0.0) || !std::isfinite(target_qe)) throw InvalidArgument("target_qe must be finite and >= 0");
    for (double q : grid)
        if (!(q >= 0.0) || !std::isfinite(q)) throw InvalidArgument("cache-size grid entries must be finite and >= 0");
}

// Interval of Q where c / (Q - q_e) > 0 with Q >= 0.
ValidityInterval hyperbolic_interval(double c, double q_e) {
    if (c > 0.0) return {q_e, kInf, false, false, false};
    if (c < 0.0) return {0.0, q_e, true, false, !(q_e > 0.0)};
    return {0.0, 0.0, false, false, true};
}

// Interval of Q >= 0 where (k3 - k4 Q) / denom > 0, k4 > 0.
ValidityInterval affine_interval(double k3, double k4, double denom) {
    const double root = k3 / k4;
    if (denom > 0.0) {
        if (!(root > 0.0)) return {0.0, 0.0, false, false, true};
        return {0.0, root, true, false, false};
    }
    if (denom < 0.0) {
        if (root < 0.0) return {0.0, kInf, true, false, false};
        return {root, kInf, false, false, false};
    }
    return {0.0, 0.0, false, false, true};
}

// Finish a point: positivity, finiteness and closure against the target Q_e.
void accept_or_reject(TradeoffCurve& curve, const NetworkConfig& config, double q, double value, double target_qe) {
    if (!std::isfinite(value)) {
        curve.rejected.push_back({q, value, "non-finite value"});
        return;
    }
    if (!(value > 0.0)) {
        curve.rejected.push_back({q, value, "nonpositive value"});
        return;
    }
    const TradeoffPoint point{q, value};
    const double achieved = equivalent_cache_size(apply_point(config, curve, point));
    if (std::abs(achieved - target_qe) > kClosureTolerance) {
        curve.rejected.push_back({q, value, "closure error " + std::to_string(achieved - target_qe)});
        return;
    }
    curve.points.push_back(point);
}

} // namespace

bool ValidityInterval::contains(double q) const noexcept {
    if (empty) return false;
    const bool above = lower_closed ? q >= lower : q > lower;
    const bool below = upper_closed ? q <= upper : q < upper;
    return above && below;
}

const char* to_string(TradeoffKind kind) noexcept {
    switch (kind) {
    case TradeoffKind::same_tier_density: return "same-tier-density";
    case TradeoffKind::same_tier_power: return "same-tier-power";
    case TradeoffKind::cross_tier_density: return "cross-tier-density";
    case TradeoffKind::cross_tier_power: return "cross-tier-power";
    }
    return "unknown";
}

double equivalent_cache_size(const NetworkConfig& config) {
    validate(config);
    const auto a = tier_weights(config);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += a[i] * config.tiers[i].cache_size;
        den += a[i];
    }
    return num / den;
}

double uniform_sdp_value(double q_e, std::size_t catalog_size, double tau, double beta) {
    const auto k = channel_constants(tau, beta);
    return q_e / (k.T * q_e + k.D * static_cast<double>(catalog_size));
}

UniformCacheSummary uniform_sdp(const NetworkConfig& config, const ContentCatalog& catalog) {
    const double q_e = equivalent_cache_size(config);
    if (q_e > static_cast<double>(catalog.size()) * (1.0 + 1e-15))
        throw InvalidArgument("equivalent cache size exceeds the catalog size");
    return {q_e, uniform_sdp_value(q_e, catalog.size(), config.sinr_threshold, config.path_loss_exponent)};
}

NetworkConfig apply_point(const NetworkConfig& config, const TradeoffCurve& curve, const TradeoffPoint& point) {
    NetworkConfig out = config;
    out.tiers.at(curve.source_tier).cache_size = point.q;
    auto& adjusted = out.tiers.at(curve.adjusted_tier);
    if (curve.kind == TradeoffKind::same_tier_density || curve.kind == TradeoffKind::cross_tier_density)
        adjusted.density = point.value;
    else
        adjusted.power = point.value;
    return out;
}

TradeoffCurve same_tier_density_curve(const NetworkConfig& config, std::size_t tier, double target_qe,
                                      const std::vector<double>& q_grid) {
    check_curve_inputs(config, target_qe, q_grid);
    check_tier(config, tier, "tier");
    const double s = 2.0 / config.path_loss_exponent;
    const double si = config.tiers[tier].power;
    double k1 = 0.0;
    for (std::size_t j = 0; j < config.tiers.size(); ++j) {
        if (j == tier) continue;
        const auto& t = config.tiers[j];
        k1 += t.density * std::pow(t.power / si, s) * (target_qe - t.cache_size);
    }
    TradeoffCurve curve;
    curve.kind = TradeoffKind::same_tier_density;
    curve.source_tier = curve.adjusted_tier = tier;
    curve.constants.q_e = target_qe;
    curve.constants.k1 = k1;
    curve.validity_interval = hyperbolic_interval(k1, target_qe);
    for (double q : q_grid) {
        if (q == target_qe) {
            curve.rejected.push_back({q, std::nullopt, "singular: Q equals target Q_e"});
            continue;
        }
        accept_or_reject(curve, config, q, k1 / (q - target_qe), target_qe);
    }
    return curve;
}

TradeoffCurve same_tier_power_curve(const NetworkConfig& config, std::size_t tier, double target_qe,
                                    const std::vector<double>& q_grid) {
    check_curve_inputs(config, target_qe, q_grid);
    check_tier(config, tier, "tier");
    const double s = 2.0 / config.path_loss_exponent;
    const double li = config.tiers[tier].density;
    double k2 = 0.0;
    for (std::size_t j = 0; j < config.tiers.size(); ++j) {
        if (j == tier) continue;
        const auto& t = config.tiers[j];
        k2 += t.density / li * std::pow(t.power, s) * (target_qe - t.cache_size);
    }
    TradeoffCurve curve;
    curve.kind = TradeoffKind::same_tier_power;
    curve.source_tier = curve.adjusted_tier = tier;
    curve.constants.q_e = target_qe;
    curve.constants.k2 = k2;
    curve.validity_interval = hyperbolic_interval(k2, target_qe);
    for (double q : q_grid) {
        if (q == target_qe) {
            curve.rejected.push_back({q, std::nullopt, "singular: Q equals target Q_e"});
            continue;
        }
        const double base = k2 / (q - target_qe);
        if (!(base > 0.0)) {
            curve.rejected.push_back({q, base, "nonpositive S^(2/beta)"});
            continue;
        }
        accept_or_reject(curve, config, q, std::pow(base, 1.0 / s), target_qe);
    }
    return curve;
}

TradeoffCurve cross_tier_curve(const NetworkConfig& config, TradeoffKind kind, std::size_t source_tier,
                               std::size_t adjusted_tier, double target_qe, const std::vector<double>& q_grid) {
    check_curve_inputs(config, target_qe, q_grid);
    check_tier(config, source_tier, "source tier");
    check_tier(config, adjusted_tier, "adjusted tier");
    if (source_tier == adjusted_tier) throw InvalidArgument("cross-tier curve needs two distinct tiers");
    if (kind != TradeoffKind::cross_tier_density && kind != TradeoffKind::cross_tier_power)
        throw InvalidArgument("cross_tier_curve: kind must be cross-tier-density or cross-tier-power");

    const double s = 2.0 / config.path_loss_exponent;
    const auto a = tier_weights(config);
    const auto& adj = config.tiers[adjusted_tier];
    double k3 = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (k == adjusted_tier) continue;
        k3 += target_qe * a[k];
        if (k != source_tier) k3 -= a[k] * config.tiers[k].cache_size;
    }
    const double k4 = a[source_tier];
    const double k5 = std::pow(adj.power, s) * (adj.cache_size - target_qe);
    const double k6 = adj.density * (adj.cache_size - target_qe);

    TradeoffCurve curve;
    curve.kind = kind;
    curve.source_tier = source_tier;
    curve.adjusted_tier = adjusted_tier;
    curve.constants = {target_qe, std::nullopt, std::nullopt, k3, k4, k5, k6};
    const bool density = kind == TradeoffKind::cross_tier_density;
    const double denom = density ? k5 : k6;
    curve.validity_interval = affine_interval(k3, k4, denom);
    for (double q : q_grid) {
        if (denom == 0.0) {
            curve.rejected.push_back({q, std::nullopt, "degenerate: adjusted tier cache equals target Q_e"});
            continue;
        }
        const double base = (k3 - k4 * q) / denom;
        if (density) {
            accept_or_reject(curve, config, q, base, target_qe);
        } else if (!(base > 0.0)) {
            curve.rejected.push_back({q, base, "nonpositive S^(2/beta)"});
        } else {
            accept_or_reject(curve, config, q, std::pow(base, 1.0 / s), target_qe);
        }
    }
    return curve;
}

} // namespace hetcache
