#pragma once

// Analytic successful-delivery probability (SDP) of probabilistic caching in
// an N-tier network whose tiers are independent homogeneous PPPs.
//
// A user requesting content j attaches to the strongest (in mean received
// power) BS among those caching j. Interference comes from every other BS in
// the plane, split into cachers of j (which lie outside the serving exclusion
// disc) and non-cachers (which may be arbitrarily close).

#include <cstddef>
#include <optional>
#include <vector>

#include "hetcache/matrix.hpp"
#include "hetcache/model.hpp"
#include "hetcache/specfun.hpp"

namespace hetcache {

struct AssociationMatrix {
    Matrix w;  // W_{i|j}
    /// Contents cached by no tier; their column of `w` is zero and they
    /// contribute nothing to the SDP.
    std::vector<std::size_t> undefined_content;
};

struct QuadratureSettings {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int max_subdivisions = 200;
};

enum class SdpMode { analytic_general, analytic_interference_limited, monte_carlo };

const char* to_string(SdpMode mode) noexcept;

struct SdpReport {
    double total = 0.0;
    /// Analytic modes: W_{i|j} * C_{i|j}. Monte Carlo: per-(tier, content)
    /// success frequency over all realizations.
    Matrix per_pair;
    SdpMode mode = SdpMode::analytic_interference_limited;
    std::optional<double> standard_error;  // Monte Carlo only
};

/// Probability that a request for content j is served by tier i.
AssociationMatrix association_matrix(const NetworkConfig& config, const ContentCatalog& catalog,
                                     const CachingPolicy& policy);

/// Density of the distance to the serving BS given that tier i serves content j.
/// Throws UndefinedDistribution when tier i never serves j (p_ij = 0).
double serving_distance_pdf(const NetworkConfig& config, const CachingPolicy& policy, std::size_t i,
                            std::size_t j, double r);

/// Conditional SDP C_{i|j}. With zero noise the exact closed form is returned;
/// otherwise the distance integral is evaluated by adaptive quadrature.
double conditional_sdp(const NetworkConfig& config, const ContentCatalog& catalog,
                       const CachingPolicy& policy, std::size_t i, std::size_t j,
                       const QuadratureSettings& quad = {});

/// Same quantity, always through quadrature (also for zero noise).
double conditional_sdp_by_quadrature(const NetworkConfig& config, const CachingPolicy& policy,
                                     std::size_t i, std::size_t j, const QuadratureSettings& quad = {});

/// SDP for arbitrary noise power.
SdpReport total_sdp_general(const NetworkConfig& config, const ContentCatalog& catalog,
                            const CachingPolicy& policy, const QuadratureSettings& quad = {});

/// Closed-form SDP of the interference-limited regime (noise ignored).
SdpReport total_sdp_interference_limited(const NetworkConfig& config, const ContentCatalog& catalog,
                                         const CachingPolicy& policy);

/// Scalar shortcut for the interference-limited SDP with precomputed constants.
double interference_limited_sdp(const std::vector<double>& weights, const ChannelConstants& k,
                                const ContentCatalog& catalog, const CachingPolicy& policy);

/// Gradient of the interference-limited SDP with respect to every p_ij.
Matrix sdp_gradient(const NetworkConfig& config, const ContentCatalog& catalog,
                    const CachingPolicy& policy);

} // namespace hetcache
