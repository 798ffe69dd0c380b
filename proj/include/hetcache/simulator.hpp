#pragma once

// Monte Carlo estimate of the SDP on finite snapshots of the network.
//
// Each realization drops Poisson numbers of BSs uniformly in a square window
// with the user at its center, draws the requested content, realizes caches,
// attaches the user to the strongest (mean received power) BS caching the
// request and checks SINR > tau with unit-mean Rayleigh fading on every link.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "hetcache/analytics.hpp"
#include "hetcache/matrix.hpp"
#include "hetcache/model.hpp"

namespace hetcache {

struct SimSettings {
    double window_side = 5000.0;  // m
    std::uint64_t realizations = 10000;
    std::uint64_t seed = 0;
    double noise_power = 0.0;  // W
    unsigned workers = 0;      // 0: one per hardware thread
    /// Realize every (BS, content) indicator instead of only the requested
    /// content's. Same law for the estimate, much slower for large M.
    bool full_cache = false;
};

void validate(const SimSettings& settings);

struct BaseStation {
    double x = 0.0;
    double y = 0.0;
    std::size_t tier = 0;
};

struct Realization {
    std::vector<BaseStation> stations;
    std::vector<std::size_t> tier_counts;
    std::size_t request = 0;
    /// Whether each station caches the requested content.
    std::vector<char> caches_request;
    /// Full cache contents per station; filled only with `full_cache`.
    std::vector<std::vector<std::uint32_t>> cached;
    std::optional<std::size_t> serving;  // index into `stations`
    double sinr = 0.0;
    bool success = false;
};

/// Row-major N x M table of counters.
struct CountTable {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint64_t> data;

    CountTable() = default;
    CountTable(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}
    std::uint64_t& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    std::uint64_t operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    CountTable& operator+=(const CountTable& o);
    bool operator==(const CountTable&) const = default;
};

struct SimEstimate {
    double sdp_hat = 0.0;
    double standard_error = 0.0;  // sqrt(p(1-p)/n)
    std::uint64_t realizations = 0;
    std::uint64_t successes = 0;
    std::uint64_t unserved = 0;            // no BS in the window caches the request
    std::vector<std::uint64_t> requests;   // per content
    CountTable association;                // serving tier x requested content
    CountTable success;                    // successes by serving tier x content
    std::vector<std::uint64_t> bs_total;   // BSs dropped per tier, summed over realizations
    CountTable cache_trials;               // BS x content indicators drawn
    CountTable cache_hits;                 // ... of which cached

    bool operator==(const SimEstimate&) const = default;
};

/// Independent 64-bit stream seed for realization `index`.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

/// One snapshot including its fading draw and success indicator.
Realization sample_realization(const NetworkConfig& config, const ContentCatalog& catalog,
                               const CachingPolicy& policy, const SimSettings& settings, std::mt19937_64& rng);

/// Draws fresh fading for every station of `r` and returns the SINR at the
/// window center of the link to `r.serving` (0 when unserved).
double draw_sinr(const Realization& r, const NetworkConfig& config, double noise_power, std::mt19937_64& rng);

/// Deterministic for fixed (inputs, seed, realizations) whatever the worker count.
SimEstimate estimate_sdp(const NetworkConfig& config, const ContentCatalog& catalog, const CachingPolicy& policy,
                         const SimSettings& settings);

/// Monte Carlo estimate as an SDP report; per_pair holds success frequencies.
SdpReport to_report(const SimEstimate& estimate);

} // namespace hetcache
