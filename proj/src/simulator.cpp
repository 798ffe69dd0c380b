#include "hetcache/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "hetcache/errors.hpp"

namespace hetcache {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void check_inputs(const NetworkConfig& config, const ContentCatalog& catalog, const CachingPolicy& policy,
                  const SimSettings& settings) {
    validate(config, catalog);
    validate(settings);
    for (const auto& v : validate_policy(policy, config, catalog))
        if (v.kind == PolicyViolation::Kind::box) throw InvalidArgument("infeasible policy: " + describe(v));
}

// Everything that does not change between realizations.
struct Context {
    const NetworkConfig& config;
    const ContentCatalog& catalog;
    const CachingPolicy& policy;
    const SimSettings& settings;
    std::vector<double> cdf;         // popularity CDF
    std::vector<double> mean_count;  // lambda_i * area
    std::vector<double> metric;      // S_i^(-2/beta): association picks the smallest r^2 * metric

    Context(const NetworkConfig& c, const ContentCatalog& cat, const CachingPolicy& p, const SimSettings& s)
        : config(c), catalog(cat), policy(p), settings(s) {
        double acc = 0.0;
        for (double t : cat.popularity()) cdf.push_back(acc += t);
        const double area = s.window_side * s.window_side;
        for (const auto& t : c.tiers) {
            mean_count.push_back(t.density * area);
            metric.push_back(std::pow(t.power, -2.0 / c.path_loss_exponent));
        }
    }

    std::size_t draw_request(std::mt19937_64& rng) const {
        const double u = std::uniform_real_distribution<double>(0.0, cdf.back())(rng);
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        auto j = static_cast<std::size_t>(it - cdf.begin());
        j = std::min(j, cdf.size() - 1);
        // Never hand out a zero-popularity content because of rounding in the CDF.
        while (j > 0 && catalog.popularity(j) == 0.0) --j;
        return j;
    }
};

Realization sample(const Context& ctx, std::mt19937_64& rng) {
    const auto& config = ctx.config;
    const std::size_t n = config.tiers.size();
    const double half = 0.5 * ctx.settings.window_side;
    Realization r;
    r.tier_counts.assign(n, 0);
    r.request = ctx.draw_request(rng);

    std::uniform_real_distribution<double> coord(-half, half);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto count = std::poisson_distribution<std::uint64_t>(ctx.mean_count[i])(rng);
        r.tier_counts[i] = count;
        for (std::uint64_t b = 0; b < count; ++b) {
            const double x = coord(rng);
            const double y = coord(rng);
            r.stations.push_back({x, y, i});
        }
    }

    const std::size_t m = ctx.catalog.size();
    r.caches_request.resize(r.stations.size());
    if (ctx.settings.full_cache) r.cached.resize(r.stations.size());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < r.stations.size(); ++b) {
        const auto& bs = r.stations[b];
        if (ctx.settings.full_cache) {
            for (std::size_t j = 0; j < m; ++j)
                if (unit(rng) < ctx.policy(bs.tier, j)) r.cached[b].push_back(static_cast<std::uint32_t>(j));
            r.caches_request[b] = std::binary_search(r.cached[b].begin(), r.cached[b].end(),
                                                     static_cast<std::uint32_t>(r.request));
        } else {
            r.caches_request[b] = unit(rng) < ctx.policy(bs.tier, r.request);
        }
        if (!r.caches_request[b]) continue;
        const double score = (bs.x * bs.x + bs.y * bs.y) * ctx.metric[bs.tier];
        if (score < best) {
            best = score;
            r.serving = b;
        }
    }
    r.sinr = draw_sinr(r, config, ctx.settings.noise_power, rng);
    r.success = r.serving && r.sinr > config.sinr_threshold;
    return r;
}

struct Tally {
    std::uint64_t successes = 0;
    std::uint64_t unserved = 0;
    std::vector<std::uint64_t> requests;
    CountTable association, success, cache_trials, cache_hits;
    std::vector<std::uint64_t> bs_total;

    Tally(std::size_t n, std::size_t m)
        : requests(m, 0), association(n, m), success(n, m), cache_trials(n, m), cache_hits(n, m),
          bs_total(n, 0) {}

    void add(const Realization& r, bool full_cache) {
        ++requests[r.request];
        for (std::size_t i = 0; i < r.tier_counts.size(); ++i) bs_total[i] += r.tier_counts[i];
        for (std::size_t b = 0; b < r.stations.size(); ++b) {
            const std::size_t tier = r.stations[b].tier;
            if (full_cache) {
                for (std::size_t j = 0; j < cache_trials.cols; ++j) ++cache_trials(tier, j);
                for (auto j : r.cached[b]) ++cache_hits(tier, j);
            } else {
                ++cache_trials(tier, r.request);
                if (r.caches_request[b]) ++cache_hits(tier, r.request);
            }
        }
        if (!r.serving) {
            ++unserved;
            return;
        }
        const std::size_t tier = r.stations[*r.serving].tier;
        ++association(tier, r.request);
        if (r.success) {
            ++successes;
            ++success(tier, r.request);
        }
    }

    void merge(const Tally& o) {
        successes += o.successes;
        unserved += o.unserved;
        for (std::size_t j = 0; j < requests.size(); ++j) requests[j] += o.requests[j];
        for (std::size_t i = 0; i < bs_total.size(); ++i) bs_total[i] += o.bs_total[i];
        association += o.association;
        success += o.success;
        cache_trials += o.cache_trials;
        cache_hits += o.cache_hits;
    }
};

} // namespace

CountTable& CountTable::operator+=(const CountTable& o) {
    for (std::size_t k = 0; k < data.size(); ++k) data[k] += o.data[k];
    return *this;
}

void validate(const SimSettings& settings) {
    if (!(settings.window_side > 0.0) || !std::isfinite(settings.window_side))
        throw InvalidArgument("sim.window_side must be positive");
    if (settings.realizations < 1) throw InvalidArgument("sim.realizations must be at least 1");
    if (!(settings.noise_power >= 0.0) || !std::isfinite(settings.noise_power))
        throw InvalidArgument("sim.noise_power must be finite and >= 0");
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

double draw_sinr(const Realization& r, const NetworkConfig& config, double noise_power, std::mt19937_64& rng) {
    if (!r.serving) return 0.0;
    std::exponential_distribution<double> fading(1.0);
    const double beta = config.path_loss_exponent;
    double signal = 0.0;
    double interference = 0.0;
    for (std::size_t b = 0; b < r.stations.size(); ++b) {
        const auto& bs = r.stations[b];
        const double d2 = bs.x * bs.x + bs.y * bs.y;
        const double rx = config.tiers[bs.tier].power * fading(rng) * std::pow(d2, -0.5 * beta);
        if (b == *r.serving)
            signal = rx;
        else
            interference += rx;
    }
    const double denom = interference + noise_power;
    if (denom == 0.0) return std::numeric_limits<double>::infinity();
    return signal / denom;
}

Realization sample_realization(const NetworkConfig& config, const ContentCatalog& catalog,
                               const CachingPolicy& policy, const SimSettings& settings, std::mt19937_64& rng) {
    check_inputs(config, catalog, policy, settings);
    return sample(Context(config, catalog, policy, settings), rng);
}

SimEstimate estimate_sdp(const NetworkConfig& config, const ContentCatalog& catalog, const CachingPolicy& policy,
                         const SimSettings& settings) {
    check_inputs(config, catalog, policy, settings);
    const Context ctx(config, catalog, policy, settings);
    const std::size_t n = config.tiers.size();
    const std::size_t m = catalog.size();
    const std::uint64_t total = settings.realizations;

    unsigned workers = settings.workers ? settings.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, total));
    std::vector<Tally> tallies(workers, Tally(n, m));
    auto run = [&](unsigned w) {
        const std::uint64_t begin = total * w / workers;
        const std::uint64_t end = total * (w + 1) / workers;
        for (std::uint64_t k = begin; k < end; ++k) {
            std::mt19937_64 rng(stream_seed(settings.seed, k));
            tallies[w].add(sample(ctx, rng), settings.full_cache);
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }
    Tally sum(n, m);
    for (const auto& t : tallies) sum.merge(t);

    SimEstimate est;
    est.realizations = total;
    est.successes = sum.successes;
    est.unserved = sum.unserved;
    est.sdp_hat = static_cast<double>(sum.successes) / static_cast<double>(total);
    est.standard_error = std::sqrt(est.sdp_hat * (1.0 - est.sdp_hat) / static_cast<double>(total));
    est.requests = std::move(sum.requests);
    est.association = std::move(sum.association);
    est.success = std::move(sum.success);
    est.bs_total = std::move(sum.bs_total);
    est.cache_trials = std::move(sum.cache_trials);
    est.cache_hits = std::move(sum.cache_hits);
    return est;
}

SdpReport to_report(const SimEstimate& estimate) {
    SdpReport report{estimate.sdp_hat, Matrix(estimate.success.rows, estimate.success.cols), SdpMode::monte_carlo,
                     estimate.standard_error};
    const auto n = static_cast<double>(estimate.realizations);
    for (std::size_t i = 0; i < estimate.success.rows; ++i)
        for (std::size_t j = 0; j < estimate.success.cols; ++j) report.per_pair(i, j) = estimate.success(i, j) / n;
    return report;
}

} // namespace hetcache
