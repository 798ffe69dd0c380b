#include <doctest.h>

#include <cmath>
#include <random>

#include "hetcache/analytics.hpp"
#include "hetcache/errors.hpp"
#include "hetcache/optimizer.hpp"
#include "hetcache/tradeoff.hpp"
#include "oracles.hpp"
#include "random_cases.hpp"

using namespace hetcache;

namespace {

NetworkConfig base(double q1, double q2) {
    NetworkConfig c;
    c.tiers = {{density_per_disc(1, 500), dbm_to_watts(53), q1}, {density_per_disc(5, 500), dbm_to_watts(33), q2}};
    return c;
}

double sdp(const NetworkConfig& c, const ContentCatalog& cat, const CachingPolicy& p) {
    return total_sdp_interference_limited(c, cat, p).total;
}

void check_feasible_and_certified(const NetworkConfig& c, const ContentCatalog& cat, const P1Solution& s) {
    CHECK(validate_policy(s.policy, c, cat).empty());
    CHECK(s.certificate.accepted());
    for (std::size_t i = 0; i < c.tiers.size(); ++i) {
        double row = 0;
        for (std::size_t j = 0; j < cat.size(); ++j) row += s.policy(i, j);
        CHECK(std::abs(row - c.tiers[i].cache_size) < 1e-9);
    }
    CHECK(std::abs(s.objective - sdp(c, cat, s.policy)) < 1e-8);
}

// Independent optimality check: no pairwise mass transfer inside a row can help.
double gap(const NetworkConfig& c, const ContentCatalog& cat, const CachingPolicy& p) {
    const auto k = channel_constants(c.sinr_threshold, c.path_loss_exponent);
    const auto g = oracle::sdp_gradient(tier_weights(c), cat.popularity(), cases::rows(p), k.T, k.D);
    double scale = 0;
    for (const auto& row : g)
        for (double v : row) scale = std::max(scale, std::abs(v));
    return oracle::swap_gap(g, cases::rows(p), 1e-6) / scale;
}

} // namespace

TEST_CASE("objective constants") {
    const auto c = base(20, 20);
    const auto cat = make_zipf_catalog(30, 0.8);
    const auto oc = objective_constants(c, cat);
    const auto a = tier_weights(c);
    const auto k = channel_constants(0.1, 4.0);
    CHECK(oc.V(1, 3) == doctest::Approx(a[1] * cat.popularity(3)).epsilon(1e-15));
    CHECK(oc.G[0] == doctest::Approx(a[0] * k.T).epsilon(1e-15));
    CHECK(oc.E == doctest::Approx(k.D * (a[0] + a[1])).epsilon(1e-15));
}

TEST_CASE("uniform popularity makes uniform caching optimal") {
    std::mt19937_64 rng(oracle::test_seed(30));
    for (std::size_t n : {1, 2, 3}) {
        auto c = cases::random_network(rng, n, 40);
        for (auto& t : c.tiers) t.cache_size = std::uniform_real_distribution<double>(1, 39)(rng);
        const auto cat = make_zipf_catalog(40, 0.0);
        const auto s = solve_p1(c, cat);
        check_feasible_and_certified(c, cat, s);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < 40; ++j) CHECK(std::abs(s.policy(i, j) - c.tiers[i].cache_size / 40) < 1e-9);
    }
}

TEST_CASE("nearly full single-tier cache saturates the head") {
    NetworkConfig c;
    c.tiers = {{1e-5, 1.0, 50 - 1e-3}};
    const auto cat = make_zipf_catalog(50, 1.0);
    const auto s = solve_p1(c, cat);
    check_feasible_and_certified(c, cat, s);
    for (std::size_t j = 0; j < 40; ++j) CHECK(s.policy(0, j) == 1.0);
    CHECK(s.policy(0, 49) < 1.0);
}

TEST_CASE("two-tier solutions beat both baselines and match the second method") {
    for (double gamma : {0.2, 0.6, 1.0, 1.4, 1.8}) {
        const auto c = base(200, 50);
        const auto cat = make_zipf_catalog(1000, gamma);
        const auto s = solve_p1(c, cat);
        check_feasible_and_certified(c, cat, s);
        CHECK(s.objective >= sdp(c, cat, baseline_popular(c, cat)) - 1e-12);
        CHECK(s.objective >= sdp(c, cat, baseline_uniform(c, cat)) - 1e-12);
        SolveOptions pg;
        pg.method = SolveMethod::projected_gradient;
        const auto t = solve_p1(c, cat, pg);
        CHECK(t.method_used == SolveMethod::projected_gradient);
        CHECK(std::abs(t.objective - s.objective) < 1e-6);
        CHECK(gap(c, cat, s.policy) < 1e-6);
    }
}

TEST_CASE("projected gradient certifies on skewed catalogs and tight thresholds") {
    // tail contents make the problem badly conditioned; a short backtracked
    // step must not be mistaken for convergence
    std::mt19937_64 rng(oracle::test_seed(35));
    SolveOptions pg;
    pg.method = SolveMethod::projected_gradient;
    for (int k = 0; k < 30; ++k) {
        const std::size_t n = 1 + k % 3, m = 200;
        const double tau = std::exp(std::uniform_real_distribution<double>(std::log(0.01), std::log(3.0))(rng));
        const auto c = cases::random_network(rng, n, 150, std::uniform_real_distribution<double>(2.6, 4.5)(rng), tau);
        const auto cat = make_zipf_catalog(m, std::uniform_real_distribution<double>(1.0, 2.0)(rng));
        const auto s = solve_p1(c, cat, pg);
        CHECK(s.method_used == SolveMethod::projected_gradient);
        CHECK(s.converged);
        CHECK(s.certificate.stationarity_residual < 1e-8);
        CHECK(std::abs(s.objective - solve_p1(c, cat).objective) < 1e-10);
        CHECK(gap(c, cat, s.policy) < 1e-6);
    }
}

TEST_CASE("single tier two contents against a grid search") {
    const ContentCatalog cat({0.9, 0.1});
    const auto sol = solve_single_tier(cat, 1.0, 0.1, 4.0);
    double best = -1, best_p = 0;
    for (int k = 0; k <= 1000000; ++k) {
        const double p1 = k * 1e-6;
        const double v = single_tier_sdp(cat, {p1, 1 - p1}, 0.1, 4.0);
        if (v > best) {
            best = v;
            best_p = p1;
        }
    }
    CHECK(std::abs(sol.probs[0] - best_p) < 2e-6);
    CHECK(std::abs(sol.probs[0] + sol.probs[1] - 1.0) < 1e-12);
    CHECK(single_tier_sdp(cat, sol.probs, 0.1, 4.0) >= best - 1e-12);
}

TEST_CASE("single tier structure") {
    const auto flat = make_zipf_catalog(30, 0.0);
    const auto u = solve_single_tier(flat, 7.5, 0.1, 4.0);
    for (double p : u.probs) CHECK(std::abs(p - 0.25) < 1e-12);

    std::mt19937_64 rng(oracle::test_seed(31));
    for (int k = 0; k < 100; ++k) {
        const std::size_t m = std::uniform_int_distribution<std::size_t>(3, 300)(rng);
        const auto cat = make_zipf_catalog(m, std::uniform_real_distribution<double>(0, 2.5)(rng));
        const double tau = std::exp(std::uniform_real_distribution<double>(-4, 2)(rng));
        const double beta = std::uniform_real_distribution<double>(2.5, 6)(rng);
        const double q = std::uniform_real_distribution<double>(0.1, m - 1.1)(rng);
        const auto a = solve_single_tier(cat, q, tau, beta);
        const auto b = solve_single_tier(cat, q + 1, tau, beta);
        double sum = 0;
        for (std::size_t j = 0; j < m; ++j) {
            sum += a.probs[j];
            if (j) CHECK(a.probs[j] <= a.probs[j - 1] + 1e-15);
            CHECK(b.probs[j] >= a.probs[j] - 1e-12);
        }
        CHECK(std::abs(sum - q) < 1e-9);
        CHECK(a.eta > b.eta);
    }
    CHECK_THROWS_AS(solve_single_tier(flat, 0.0, 0.1, 4.0), InvalidArgument);
    CHECK_THROWS_AS(solve_single_tier(flat, 30.0, 0.1, 4.0), InvalidArgument);
}

TEST_CASE("equivalent single-tier problem") {
    const auto cat = make_zipf_catalog(200, 0.8);
    CHECK(equivalent_cache_size(base(40, 10)) == doctest::Approx(30.0).epsilon(1e-14));
    CHECK(equivalent_cache_size(base(17, 17)) == doctest::Approx(17.0).epsilon(1e-14));
    const auto eq = solve_p2_equivalent(base(40, 10), cat);
    CHECK(eq.q_e == doctest::Approx(30.0).epsilon(1e-14));
    CHECK(eq.objective == doctest::Approx(single_tier_sdp(cat, eq.x, 0.1, 4.0)).epsilon(1e-15));

    // equal caches: bound attained, and every row equal to x* is optimal
    const auto c = base(20, 20);
    const auto s = solve_p1(c, cat);
    const auto p2 = solve_p2_equivalent(c, cat);
    CHECK(std::abs(s.objective - p2.objective) < 1e-6);
    CachingPolicy rows{Matrix(2, 200)};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 200; ++j) rows.probs(i, j) = p2.x[j];
    CHECK(validate_policy(rows, c, cat).empty());
    CHECK(std::abs(sdp(c, cat, rows) - p2.objective) < 1e-12);

    CHECK_THROWS_AS(solve_p2_equivalent(base(200, 200), cat), InvalidArgument);
    CHECK_THROWS_AS(solve_p2_equivalent(base(0, 0), cat), InvalidArgument);
}

TEST_CASE("the equivalent problem bounds the multi-tier optimum") {
    std::mt19937_64 rng(oracle::test_seed(32));
    for (int k = 0; k < 40; ++k) {
        const std::size_t n = 2 + k % 2, m = 60;
        const auto c = cases::random_network(rng, n, m - 1);
        const auto cat = make_zipf_catalog(m, std::uniform_real_distribution<double>(0.2, 2)(rng));
        const double q_e = equivalent_cache_size(c);
        if (q_e <= 0.0) continue;
        const auto s = solve_p1(c, cat);
        CHECK(s.certificate.accepted());
        CHECK(s.objective <= solve_p2_equivalent(c, cat).objective + 1e-8);

        auto equal = c;
        for (auto& t : equal.tiers) t.cache_size = c.tiers[0].cache_size;
        if (equal.tiers[0].cache_size > 0)
            CHECK(std::abs(solve_p1(equal, cat).objective - solve_p2_equivalent(equal, cat).objective) < 1e-6);
    }
}

TEST_CASE("baselines") {
    NetworkConfig c;
    c.tiers = {{1e-5, 1.0, 2.0}, {1e-5, 1.0, 2.5}, {1e-5, 1.0, 0.0}, {1e-5, 1.0, 4.0}};
    const auto cat = make_zipf_catalog(4, 1.0);
    const auto pop = baseline_popular(c, cat);
    CHECK(pop.probs.to_rows() == std::vector<std::vector<double>>{
                                     {1, 1, 0, 0}, {1, 1, 0.5, 0}, {0, 0, 0, 0}, {1, 1, 1, 1}});
    const auto uni = baseline_uniform(c, cat);
    CHECK(uni.probs.to_rows()[1] == std::vector<double>{0.625, 0.625, 0.625, 0.625});
    CHECK(uni.probs.to_rows()[2] == std::vector<double>{0, 0, 0, 0});
    CHECK(uni.probs.to_rows()[3] == std::vector<double>{1, 1, 1, 1});
    CHECK(validate_policy(pop, c, cat).empty());
    CHECK(validate_policy(uni, c, cat).empty());

    const auto net = base(200, 50);
    const auto skew = make_zipf_catalog(1000, 1.5);
    const double opt = solve_p1(net, skew).objective;
    CHECK(sdp(net, skew, baseline_popular(net, skew)) >= 0.98 * opt);
    CHECK(std::abs(sdp(base(20, 20), make_zipf_catalog(200, 0.8), baseline_uniform(base(20, 20), make_zipf_catalog(200, 0.8))) - 0.18) < 0.005);
}

TEST_CASE("certified solutions are global optima") {
    std::mt19937_64 rng(oracle::test_seed(33));
    for (int k = 0; k < 6; ++k) {
        const std::size_t n = 2 + k % 2, m = 25;
        const auto c = cases::random_network(rng, n, m - 1);
        const auto cat = make_zipf_catalog(m, std::uniform_real_distribution<double>(0.3, 1.5)(rng));
        const auto s = solve_p1(c, cat);
        REQUIRE(s.certificate.accepted());
        double best = -1;
        for (int r = 0; r < 20; ++r) {
            const auto start = cases::random_policy(rng, c, m);
            best = std::max(best, solve_p1_projected_gradient(c, cat, start).objective);
        }
        CHECK(s.objective >= best - 1e-5);
        CHECK(gap(c, cat, s.policy) < 1e-6);
    }
}

TEST_CASE("fixed-point map reproduces the solution") {
    std::mt19937_64 rng(oracle::test_seed(34));
    for (int k = 0; k < 20; ++k) {
        const std::size_t n = 1 + k % 3, m = 80;
        const auto c = cases::random_network(rng, n, m - 1);
        const auto cat = make_zipf_catalog(m, 0.9);
        const auto s = solve_p1(c, cat);
        const auto image = fixed_point_map(c, cat, s.policy, s.certificate.eta);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) CHECK(std::abs(image(i, j) - s.policy(i, j)) < 1e-6);
        for (std::size_t i = 0; i < n; ++i)
            if (c.tiers[i].cache_size > 0) CHECK(s.certificate.eta[i] > 0.0);
    }
}

TEST_CASE("more cache strictly helps") {
    std::mt19937_64 rng(oracle::test_seed(35));
    for (int k = 0; k < 20; ++k) {
        const std::size_t n = 1 + k % 3, m = 40;
        const auto c = cases::random_network(rng, n, m - 1);
        const auto cat = make_zipf_catalog(m, 0.8);
        const double before = solve_p1(c, cat).objective;
        auto more = c;
        more.tiers[k % n].cache_size += 0.5;
        CHECK(solve_p1(more, cat).objective > before);
    }
}

TEST_CASE("degenerate rows and ties") {
    auto c = base(0, 30);
    const auto cat = make_zipf_catalog(30, 1.0);
    auto s = solve_p1(c, cat);
    check_feasible_and_certified(c, cat, s);
    for (std::size_t j = 0; j < 30; ++j) {
        CHECK(s.policy(0, j) == 0.0);
        CHECK(s.policy(1, j) == 1.0);
    }

    const ContentCatalog tied({0.3, 0.2, 0.2, 0.2, 0.1});
    c = base(2, 1);
    s = solve_p1(c, tied);
    check_feasible_and_certified(c, tied, s);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(std::abs(s.policy(i, 1) - s.policy(i, 2)) < 1e-9);
        CHECK(std::abs(s.policy(i, 2) - s.policy(i, 3)) < 1e-9);
    }
}

TEST_CASE("solver input checks") {
    const auto cat = make_zipf_catalog(10, 1.0);
    CHECK_THROWS_AS(solve_p1(base(11, 1), cat), InvalidArgument);
    SolveOptions bad;
    bad.convergence_tol = 0;
    CHECK_THROWS_AS(solve_p1(base(1, 1), cat, bad), InvalidArgument);
    CHECK_THROWS_AS(solve_p1_projected_gradient(base(1, 1), cat, CachingPolicy{Matrix(3, 10)}), InvalidArgument);
}
