#include "hetcache/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "hetcache/analytics.hpp"
#include "hetcache/errors.hpp"
#include "hetcache/specfun.hpp"
#include "hetcache/tradeoff.hpp"

namespace hetcache {

namespace {

// A row of the form p_j(x) = clamp((c_j x - offset_j) / g, 0, 1), nondecreasing
// in x. Used both for the multiplier search (x = 1/sqrt(eta)) and for the
// Euclidean projection onto the capped simplex (c = 1, offset = -y, g = 1).
struct RowSolve {
    std::vector<double> row;
    double level = 0.0;
};

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double row_sum_at(std::span<const double> c, std::span<const double> offset, double g, double x) {
    double sum = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j)
        if (c[j] > 0.0) sum += clamp01((c[j] * x - offset[j]) / g);
    return sum;
}

RowSolve solve_row(std::span<const double> c, std::span<const double> offset, double g, double budget,
                   double tol) {
    const std::size_t m = c.size();
    RowSolve out{std::vector<double>(m, 0.0), 0.0};
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::size_t usable = 0;
    for (std::size_t j = 0; j < m; ++j) {
        if (!(c[j] > 0.0)) continue;
        ++usable;
        lo = std::min(lo, offset[j] / c[j]);
        hi = std::max(hi, (offset[j] + g) / c[j]);
    }
    if (usable == 0 || budget >= static_cast<double>(usable)) {
        // Everything worth caching fits; spread any leftover over the rest.
        const std::size_t idle = m - usable;
        const double spare = idle ? std::min(1.0, (budget - static_cast<double>(usable)) / idle) : 0.0;
        for (std::size_t j = 0; j < m; ++j) out.row[j] = c[j] > 0.0 ? 1.0 : std::max(0.0, spare);
        out.level = usable ? hi : 0.0;
        return out;
    }
    if (budget <= 0.0) {
        out.level = lo;
        return out;
    }
    double s_lo = row_sum_at(c, offset, g, lo);
    double s_hi = row_sum_at(c, offset, g, hi);
    for (int it = 0; it < 400 && (hi - lo) > tol * std::max({std::abs(lo), std::abs(hi), 1e-300}); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double s = row_sum_at(c, offset, g, mid);
        if (s < budget) {
            lo = mid;
            s_lo = s;
        } else {
            hi = mid;
            s_hi = s;
        }
    }
    // The sum is linear between the two ends up to kinks inside a bracket of
    // relative width `tol`; interpolate for the final level.
    double x = hi;
    if (s_hi > s_lo) x = lo + (budget - s_lo) / (s_hi - s_lo) * (hi - lo);
    for (std::size_t j = 0; j < m; ++j)
        if (c[j] > 0.0) out.row[j] = clamp01((c[j] * x - offset[j]) / g);
    out.level = x;
    return out;
}

struct Problem {
    const NetworkConfig& config;
    const ContentCatalog& catalog;
    ObjectiveConstants oc;
    std::vector<double> weights;
    ChannelConstants k;
    std::vector<bool> free_row;

    Problem(const NetworkConfig& cfg, const ContentCatalog& cat)
        : config(cfg), catalog(cat), oc(objective_constants(cfg, cat)), weights(tier_weights(cfg)),
          k(channel_constants(cfg.sinr_threshold, cfg.path_loss_exponent)) {
        const auto m = static_cast<double>(cat.size());
        for (const auto& t : cfg.tiers) free_row.push_back(t.cache_size > 0.0 && t.cache_size < m);
    }

    std::size_t n() const { return config.tiers.size(); }
    std::size_t m() const { return catalog.size(); }
    double budget(std::size_t i) const { return config.tiers[i].cache_size; }

    double objective(const CachingPolicy& p) const { return interference_limited_sdp(weights, k, catalog, p); }

    // Best row i given the other rows; level is 1/sqrt(eta_i).
    RowSolve best_row(const CachingPolicy& p, std::size_t i, double tol) const {
        const std::size_t mm = m();
        std::vector<double> c(mm), offset(mm);
        for (std::size_t j = 0; j < mm; ++j) {
            double others = 0.0;
            for (std::size_t l = 0; l < n(); ++l)
                if (l != i) others += oc.G[l] * p(l, j);
            c[j] = std::sqrt(oc.V(i, j) * oc.E);
            offset[j] = others + oc.E;
        }
        return solve_row(c, offset, oc.G[i], budget(i), tol);
    }

    // objective(q) - objective(p) per column from the differences, free of cancellation
    double objective_change(const CachingPolicy& p, const CachingPolicy& q) const {
        double total = 0.0;
        for (std::size_t j = 0; j < m(); ++j) {
            double num = 0.0, den = oc.E, d_num = 0.0, d_den = 0.0;
            for (std::size_t l = 0; l < n(); ++l) {
                const double d = q(l, j) - p(l, j);
                num += oc.V(l, j) * p(l, j);
                den += oc.G[l] * p(l, j);
                d_num += oc.V(l, j) * d;
                d_den += oc.G[l] * d;
            }
            total += (d_num * den - num * d_den) / (den * (den + d_den));
        }
        return total;
    }

    Matrix gradient(const CachingPolicy& p) const {
        Matrix g(n(), m());
        for (std::size_t j = 0; j < m(); ++j) {
            double denom = oc.E;
            for (std::size_t l = 0; l < n(); ++l) denom += oc.G[l] * p(l, j);
            for (std::size_t i = 0; i < n(); ++i) g(i, j) = oc.V(i, j) * oc.E / (denom * denom);
        }
        return g;
    }

    CachingPolicy initial() const {
        CachingPolicy p = baseline_uniform(config, catalog);
        return p;
    }
};

double max_abs_diff(const Matrix& a, const Matrix& b) {
    double d = 0.0;
    const auto av = a.values();
    const auto bv = b.values();
    for (std::size_t k = 0; k < av.size(); ++k) d = std::max(d, std::abs(av[k] - bv[k]));
    return d;
}

// Projected gradient in the metric of the Hessian diagonal. Curvature of entry
// (i,j) scales with the popularity t_j, so an unscaled method crawls along the
// tail contents. Projection onto the capped simplex in that metric is
// p_j = clamp(y_j + nu / d_j, 0, 1), the same monotone row form as the
// multiplier search.
P1Solution run_projected_gradient(const Problem& prob, CachingPolicy p, const SolveOptions& opt) {
    const std::size_t n = prob.n();
    const std::size_t m = prob.m();
    Matrix metric(n, m);
    auto update_metric = [&](const CachingPolicy& at) {
        for (std::size_t j = 0; j < m; ++j) {
            double denom = prob.oc.E;
            for (std::size_t l = 0; l < n; ++l) denom += prob.oc.G[l] * at(l, j);
            for (std::size_t i = 0; i < n; ++i)
                metric(i, j) = 2.0 * prob.oc.V(i, j) * prob.oc.E * prob.oc.G[i] / (denom * denom * denom);
        }
    };
    auto project = [&](const Matrix& y) {
        CachingPolicy out{Matrix(n, m)};
        std::vector<double> c(m), offset(m);
        for (std::size_t i = 0; i < n; ++i) {
            if (!prob.free_row[i]) {
                const double fill = prob.budget(i) > 0.0 ? 1.0 : 0.0;
                for (std::size_t j = 0; j < m; ++j) out.probs(i, j) = fill;
                continue;
            }
            // zero-popularity entries have no gradient and no curvature; solve_row parks them
            for (std::size_t j = 0; j < m; ++j) {
                c[j] = metric(i, j) > 0.0 ? 1.0 / metric(i, j) : 0.0;
                offset[j] = -y(i, j);
            }
            const auto row = solve_row(c, offset, 1.0, prob.budget(i), opt.bisection_tol).row;
            std::copy(row.begin(), row.end(), out.probs.row(i).begin());
        }
        return out;
    };

    update_metric(p);
    p = project(p.probs);

    P1Solution sol;
    sol.method_used = SolveMethod::projected_gradient;
    int it = 0;
    for (; it < opt.max_outer_iters; ++it) {
        const Matrix g = prob.gradient(p);
        update_metric(p);
        std::vector<double> mu(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t j = 0; j < m; ++j)
                if (p(i, j) > 0.0 && p(i, j) < 1.0) {
                    sum += g(i, j);
                    ++count;
                }
            mu[i] = count ? sum / static_cast<double>(count) : 0.0;
        }
        CachingPolicy next;
        double unit_step = 0.0;
        bool accepted = false;
        double alpha = 1.0;
        for (int bt = 0; bt < 60; ++bt, alpha *= 0.5) {
            Matrix y = p.probs;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < m; ++j)
                    if (metric(i, j) > 0.0) y(i, j) += alpha * g(i, j) / metric(i, j);
            next = project(y);
            const double step = max_abs_diff(next.probs, p.probs);
            if (bt == 0) unit_step = step;
            if (unit_step < opt.convergence_tol) break;
            // Armijo on the Lagrangian: near the optimum the true ascent drops
            // below gradient * (row-sum rounding), so shift each row by mu_i
            double ascent = 0.0, drift = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < m; ++j) {
                    const double d = next.probs(i, j) - p(i, j);
                    ascent += (g(i, j) - mu[i]) * d;
                    drift += mu[i] * d;
                }
            if (prob.objective_change(p, next) - drift >= 1e-4 * ascent) {
                accepted = true;
                break;
            }
        }
        // the full scaled step is the stationarity measure; short backtracked steps are not
        if (unit_step < opt.convergence_tol) {
            sol.converged = true;
            ++it;
            break;
        }
        if (!accepted) break;
        p = std::move(next);
    }
    sol.iterations = it;
    sol.objective = prob.objective(p);
    sol.policy = std::move(p);
    return sol;
}

P1Solution run_block_kkt(const Problem& prob, CachingPolicy p, const SolveOptions& opt) {
    P1Solution sol;
    sol.method_used = SolveMethod::block_kkt;
    int it = 0;
    for (; it < opt.max_outer_iters; ++it) {
        double delta = 0.0;
        for (std::size_t i = 0; i < prob.n(); ++i) {
            if (!prob.free_row[i]) continue;
            const auto row = prob.best_row(p, i, opt.bisection_tol).row;
            for (std::size_t j = 0; j < prob.m(); ++j) {
                delta = std::max(delta, std::abs(row[j] - p(i, j)));
                p.probs(i, j) = row[j];
            }
        }
        if (delta < opt.convergence_tol) {
            sol.converged = true;
            ++it;
            break;
        }
    }
    sol.iterations = it;
    sol.objective = prob.objective(p);
    sol.policy = std::move(p);
    return sol;
}

KktCertificate certify(const Problem& prob, const CachingPolicy& p, double tol) {
    KktCertificate cert;
    cert.eta.assign(prob.n(), 0.0);
    for (std::size_t i = 0; i < prob.n(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < prob.m(); ++j) {
            const double v = p(i, j);
            sum += v;
            cert.box_residual = std::max({cert.box_residual, -v, v - 1.0});
        }
        cert.budget_residual = std::max(cert.budget_residual, std::abs(sum - prob.budget(i)));
        if (!prob.free_row[i]) {
            const double fill = prob.budget(i) > 0.0 ? 1.0 : 0.0;
            for (std::size_t j = 0; j < prob.m(); ++j)
                cert.stationarity_residual = std::max(cert.stationarity_residual, std::abs(p(i, j) - fill));
            continue;
        }
        const auto best = prob.best_row(p, i, tol);
        cert.eta[i] = best.level > 0.0 ? 1.0 / (best.level * best.level) : std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < prob.m(); ++j)
            cert.stationarity_residual = std::max(cert.stationarity_residual, std::abs(best.row[j] - p(i, j)));
    }
    return cert;
}

void check_solve_inputs(const NetworkConfig& config, const ContentCatalog& catalog, const SolveOptions& opt) {
    validate(config, catalog);
    if (opt.max_outer_iters < 1) throw InvalidArgument("max_outer_iters must be positive");
    if (!(opt.convergence_tol > 0.0) || !(opt.bisection_tol > 0.0))
        throw InvalidArgument("solver tolerances must be positive");
}

} // namespace

const char* to_string(SolveMethod method) noexcept {
    return method == SolveMethod::block_kkt ? "block-kkt" : "projected-gradient";
}

ObjectiveConstants objective_constants(const NetworkConfig& config, const ContentCatalog& catalog) {
    validate(config, catalog);
    const auto k = channel_constants(config.sinr_threshold, config.path_loss_exponent);
    const auto a = tier_weights(config);
    ObjectiveConstants oc{Matrix(a.size(), catalog.size()), std::vector<double>(a.size()), 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        oc.G[i] = a[i] * k.T;
        oc.E += k.D * a[i];
        for (std::size_t j = 0; j < catalog.size(); ++j) oc.V(i, j) = a[i] * catalog.popularity(j);
    }
    return oc;
}

P1Solution solve_p1(const NetworkConfig& config, const ContentCatalog& catalog, const SolveOptions& options) {
    check_solve_inputs(config, catalog, options);
    const Problem prob(config, catalog);
    if (options.method == SolveMethod::projected_gradient) {
        auto sol = run_projected_gradient(prob, prob.initial(), options);
        sol.certificate = certify(prob, sol.policy, options.bisection_tol);
        return sol;
    }
    auto sol = run_block_kkt(prob, prob.initial(), options);
    sol.certificate = certify(prob, sol.policy, options.bisection_tol);
    if (sol.certificate.accepted()) return sol;

    auto fallback = run_projected_gradient(prob, sol.policy, options);
    fallback.certificate = certify(prob, fallback.policy, options.bisection_tol);
    fallback.iterations += sol.iterations;
    if (fallback.certificate.accepted() ||
        fallback.certificate.stationarity_residual < sol.certificate.stationarity_residual)
        return fallback;
    return sol;
}

P1Solution solve_p1_projected_gradient(const NetworkConfig& config, const ContentCatalog& catalog,
                                       const CachingPolicy& start, const SolveOptions& options) {
    check_solve_inputs(config, catalog, options);
    if (start.tier_count() != config.tiers.size() || start.content_count() != catalog.size())
        throw InvalidArgument("starting policy has the wrong shape");
    const Problem prob(config, catalog);
    auto sol = run_projected_gradient(prob, start, options);
    sol.certificate = certify(prob, sol.policy, options.bisection_tol);
    return sol;
}

KktCertificate certify(const NetworkConfig& config, const ContentCatalog& catalog, const CachingPolicy& policy,
                       double bisection_tol) {
    validate(config, catalog);
    if (policy.tier_count() != config.tiers.size() || policy.content_count() != catalog.size())
        throw InvalidArgument("policy has the wrong shape");
    return certify(Problem(config, catalog), policy, bisection_tol);
}

CachingPolicy fixed_point_map(const NetworkConfig& config, const ContentCatalog& catalog,
                              const CachingPolicy& policy, const std::vector<double>& eta) {
    const Problem prob(config, catalog);
    if (eta.size() != prob.n()) throw InvalidArgument("one multiplier per tier is required");
    CachingPolicy out = policy;
    for (std::size_t i = 0; i < prob.n(); ++i) {
        if (!prob.free_row[i]) continue;
        for (std::size_t j = 0; j < prob.m(); ++j) {
            double others = 0.0;
            for (std::size_t l = 0; l < prob.n(); ++l)
                if (l != i) others += prob.oc.G[l] * policy(l, j);
            const double root = std::sqrt(prob.oc.V(i, j) * prob.oc.E / eta[i]);
            out.probs(i, j) = clamp01((root - others - prob.oc.E) / prob.oc.G[i]);
        }
    }
    return out;
}

SingleTierSolution solve_single_tier(const ContentCatalog& catalog, double cache_size, double tau, double beta,
                                     double bisection_tol) {
    const auto m = static_cast<double>(catalog.size());
    if (!(cache_size > 0.0) || !(cache_size < m))
        throw InvalidArgument("solve_single_tier: cache size must lie in (0, M)");
    const auto k = channel_constants(tau, beta);
    std::vector<double> c(catalog.size());
    const std::vector<double> offset(catalog.size(), k.D);
    for (std::size_t j = 0; j < catalog.size(); ++j) c[j] = std::sqrt(catalog.popularity(j) * k.D);
    auto row = solve_row(c, offset, k.T, cache_size, bisection_tol);
    return {std::move(row.row), 1.0 / (row.level * row.level)};
}

double single_tier_sdp(const ContentCatalog& catalog, const std::vector<double>& probs, double tau, double beta) {
    if (probs.size() != catalog.size()) throw InvalidArgument("single_tier_sdp: size mismatch");
    const auto k = channel_constants(tau, beta);
    double total = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) total += probs[j] * catalog.popularity(j) / (k.T * probs[j] + k.D);
    return total;
}

EquivalentSolution solve_p2_equivalent(const NetworkConfig& config, const ContentCatalog& catalog) {
    validate(config, catalog);
    const double q_e = equivalent_cache_size(config);
    if (!(q_e > 0.0) || !(q_e < static_cast<double>(catalog.size())))
        throw InvalidArgument("equivalent cache size must lie in (0, M)");
    auto single = solve_single_tier(catalog, q_e, config.sinr_threshold, config.path_loss_exponent);
    const double obj = single_tier_sdp(catalog, single.probs, config.sinr_threshold, config.path_loss_exponent);
    return {std::move(single.probs), q_e, obj};
}

CachingPolicy baseline_popular(const NetworkConfig& config, const ContentCatalog& catalog) {
    validate(config, catalog);
    const std::size_t m = catalog.size();
    CachingPolicy p{Matrix(config.tiers.size(), m)};
    for (std::size_t i = 0; i < config.tiers.size(); ++i) {
        double left = config.tiers[i].cache_size;
        for (std::size_t j = 0; j < m && left > 0.0; ++j) {
            p.probs(i, j) = std::min(1.0, left);
            left -= p.probs(i, j);
        }
    }
    return p;
}

CachingPolicy baseline_uniform(const NetworkConfig& config, const ContentCatalog& catalog) {
    validate(config, catalog);
    const auto m = static_cast<double>(catalog.size());
    CachingPolicy p{Matrix(config.tiers.size(), catalog.size())};
    for (std::size_t i = 0; i < config.tiers.size(); ++i) {
        const double v = config.tiers[i].cache_size / m;
        for (std::size_t j = 0; j < catalog.size(); ++j) p.probs(i, j) = v;
    }
    return p;
}

} // namespace hetcache
