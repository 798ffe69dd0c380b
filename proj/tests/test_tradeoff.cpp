#include <doctest.h>

#include <cmath>
#include <random>

#include "hetcache/analytics.hpp"
#include "hetcache/errors.hpp"
#include "hetcache/specfun.hpp"
#include "hetcache/tradeoff.hpp"
#include "oracles.hpp"
#include "random_cases.hpp"

using namespace hetcache;

namespace {

NetworkConfig base(double s1_dbm, double q1, double q2) {
    NetworkConfig c;
    c.tiers = {{density_per_disc(1, 500), dbm_to_watts(s1_dbm), q1},
               {density_per_disc(5, 500), dbm_to_watts(33), q2}};
    return c;
}

// Q_e written out independently of the library.
double qe(const NetworkConfig& c) {
    double num = 0, den = 0;
    for (const auto& t : c.tiers) {
        const double a = t.density * std::pow(t.power, 2.0 / c.path_loss_exponent);
        num += a * t.cache_size;
        den += a;
    }
    return num / den;
}

double other_average(const NetworkConfig& c, std::size_t i) {
    double num = 0, den = 0;
    for (std::size_t j = 0; j < c.tiers.size(); ++j) {
        if (j == i) continue;
        const auto& t = c.tiers[j];
        const double a = t.density * std::pow(t.power, 2.0 / c.path_loss_exponent);
        num += a * t.cache_size;
        den += a;
    }
    return num / den;
}

std::vector<double> grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int k = 0; k < n; ++k) g.push_back(lo + (hi - lo) * k / (n - 1));
    return g;
}

void check_closure(const NetworkConfig& c, const TradeoffCurve& curve, double target, std::size_t m = 200) {
    const auto k = channel_constants(c.sinr_threshold, c.path_loss_exponent);
    const double target_sdp = target / (k.T * target + k.D * m);
    for (const auto& pt : curve.points) {
        const auto moved = apply_point(c, curve, pt);
        CHECK(std::abs(qe(moved) - target) < 1e-9);
        CHECK(std::abs(uniform_sdp_value(qe(moved), m, c.sinr_threshold, c.path_loss_exponent) - target_sdp) < 1e-9);
        CHECK(curve.validity_interval.contains(pt.q));
        CHECK(pt.value > 0);
    }
}

} // namespace

TEST_CASE("equivalent cache size") {
    CHECK(equivalent_cache_size(base(53, 40, 10)) == doctest::Approx(30.0).epsilon(1e-14));
    CHECK(equivalent_cache_size(base(43, 12, 12)) == doctest::Approx(12.0).epsilon(1e-14));
    std::mt19937_64 rng(oracle::test_seed(60));
    for (int k = 0; k < 100; ++k) {
        const auto c = cases::random_network(rng, 1 + k % 4, 100);
        const double q = equivalent_cache_size(c);
        CHECK(std::abs(q - qe(c)) < 1e-12 * std::max(1.0, q));
        double lo = 1e9, hi = -1;
        for (const auto& t : c.tiers) {
            lo = std::min(lo, t.cache_size);
            hi = std::max(hi, t.cache_size);
        }
        CHECK(q >= lo - 1e-12);
        CHECK(q <= hi + 1e-12);
        auto scaled = c;
        for (auto& t : scaled.tiers) t.density *= 37.5;
        CHECK(std::abs(equivalent_cache_size(scaled) - q) < 1e-12 * std::max(1.0, q));
    }
}

TEST_CASE("uniform SDP") {
    const auto cat = make_zipf_catalog(200, 0.8);
    const auto k = channel_constants(0.1, 4.0);
    const auto s = uniform_sdp(base(53, 25, 10), cat);
    CHECK(s.q_e == doctest::Approx(20.0).epsilon(1e-14));
    CHECK(s.sdp == doctest::Approx(20.0 / (0.6001240 * 20 + 0.4967294 * 200)).epsilon(1e-6));
    CHECK(s.sdp == doctest::Approx(0.1796).epsilon(1e-3));
    CHECK(uniform_sdp(base(53, 200, 200), cat).sdp == doctest::Approx(1.0 / (k.T + k.D)).epsilon(1e-14));
    CHECK(uniform_sdp(base(53, 0, 0), cat).sdp == 0.0);
    CHECK_THROWS_AS(uniform_sdp(base(53, 250, 250), cat), InvalidArgument);

    std::mt19937_64 rng(oracle::test_seed(61));
    for (int k2 = 0; k2 < 100; ++k2) {
        const std::size_t m = 30 + k2;
        const auto c = cases::random_network(rng, 1 + k2 % 3, m, std::uniform_real_distribution<double>(2.5, 5)(rng),
                                             std::exp(std::uniform_real_distribution<double>(-3, 2)(rng)));
        const auto cat2 = make_zipf_catalog(m, std::uniform_real_distribution<double>(0, 2)(rng));
        CachingPolicy p{Matrix(c.tiers.size(), m)};
        for (std::size_t i = 0; i < c.tiers.size(); ++i)
            for (std::size_t j = 0; j < m; ++j) p.probs(i, j) = c.tiers[i].cache_size / m;
        CHECK(std::abs(uniform_sdp(c, cat2).sdp - total_sdp_interference_limited(c, cat2, p).total) < 1e-12);
    }
}

TEST_CASE("same-tier density law on the two-tier reference setup") {
    for (double s1 : {43.0, 53.0}) {
        const auto c = base(s1, 25, 10);
        const auto curve = same_tier_density_curve(c, 0, 20.0, grid(0, 100, 101));
        // lambda_1 = lambda_2 sqrt(S_2 / S_1) (Q_e - Q_2) / (Q_1 - Q_e)
        const double k1 = c.tiers[1].density * std::sqrt(c.tiers[1].power / c.tiers[0].power) * 10.0;
        CHECK(*curve.constants.k1 == doctest::Approx(k1).epsilon(1e-13));
        bool found = false;
        for (const auto& pt : curve.points) {
            CHECK(pt.value * (pt.q - 20.0) == doctest::Approx(k1).epsilon(1e-12));
            if (pt.q == 30.0) {
                CHECK(pt.value == doctest::Approx(k1 / 10.0).epsilon(1e-13));
                found = true;
            }
        }
        CHECK(found);
        check_closure(c, curve, 20.0);
        CHECK(curve.validity_interval.lower == 20.0);
        CHECK(std::isinf(curve.validity_interval.upper));
        CHECK(!curve.validity_interval.lower_closed);
        CHECK(curve.points.size() == 80);
        CHECK(curve.rejected.size() == 21);
        for (const auto& r : curve.rejected) {
            if (r.q == 20.0) {
                CHECK(!r.value);
                CHECK(r.reason.rfind("singular", 0) == 0);
            } else {
                CHECK(r.q < 20.0);
                CHECK(*r.value < 0.0);
            }
        }
    }
}

TEST_CASE("K1 sign flips where the other tiers' average crosses the target") {
    auto c = base(53, 25, 30);  // other tier above the target
    auto curve = same_tier_density_curve(c, 0, 20.0, grid(0, 40, 41));
    CHECK(*curve.constants.k1 < 0);
    CHECK(curve.validity_interval.lower == 0.0);
    CHECK(curve.validity_interval.upper == 20.0);
    for (const auto& pt : curve.points) CHECK(pt.q < 20.0);
    check_closure(c, curve, 20.0);

    std::mt19937_64 rng(oracle::test_seed(62));
    for (int k = 0; k < 200; ++k) {
        const auto r = cases::random_network(rng, 2 + k % 3, 100);
        const double target = std::uniform_real_distribution<double>(1, 99)(rng);
        const auto d = same_tier_density_curve(r, 0, target, grid(0, 100, 51));
        CHECK((*d.constants.k1 > 0) == (target > other_average(r, 0)));
        check_closure(r, d, target);
        const auto p = same_tier_power_curve(r, 0, target, grid(0, 100, 51));
        CHECK((*p.constants.k2 > 0) == (target > other_average(r, 0)));
        check_closure(r, p, target);
        for (const auto& pt : d.points) CHECK(d.validity_interval.contains(pt.q));
        for (const auto& rej : d.rejected)
            if (rej.value && *rej.value <= 0) CHECK(!d.validity_interval.contains(rej.q));
    }
}

TEST_CASE("same-tier power law") {
    const auto c = base(53, 25, 10);
    const auto curve = same_tier_power_curve(c, 0, 20.0, grid(21, 100, 80));
    const double k2 = *curve.constants.k2;
    for (const auto& pt : curve.points)
        CHECK(pt.value == doctest::Approx(k2 * k2 / ((pt.q - 20) * (pt.q - 20))).epsilon(1e-12));
    CHECK(curve.points.size() == 80);
    check_closure(c, curve, 20.0);
}

TEST_CASE("cross-tier laws") {
    for (double s1 : {43.0, 53.0}) {
        // adjusted tier above the target: K3, K5, K6 > 0 and Q_1 in [0, K3 / K4)
        auto c = base(s1, 25, 30);
        auto dens = cross_tier_curve(c, TradeoffKind::cross_tier_density, 0, 1, 20.0, grid(0, 200, 201));
        CHECK(*dens.constants.k3 > 0);
        CHECK(*dens.constants.k5 > 0);
        CHECK(*dens.constants.k6 > 0);
        CHECK(dens.validity_interval.lower == 0.0);
        CHECK(dens.validity_interval.upper == doctest::Approx(*dens.constants.k3 / *dens.constants.k4).epsilon(1e-14));
        check_closure(c, dens, 20.0);
        for (std::size_t k = 1; k < dens.points.size(); ++k) {
            const auto& a = dens.points[k - 1];
            const auto& b = dens.points[k];
            CHECK((b.value - a.value) / (b.q - a.q) ==
                  doctest::Approx(-*dens.constants.k4 / *dens.constants.k5).epsilon(1e-6));
        }
        auto pow = cross_tier_curve(c, TradeoffKind::cross_tier_power, 0, 1, 20.0, grid(0, 200, 201));
        check_closure(c, pow, 20.0);
        CHECK(pow.points.size() == dens.points.size());

        // adjusted tier below the target: K5 < 0, valid beyond K3 / K4
        c = base(s1, 25, 5);
        dens = cross_tier_curve(c, TradeoffKind::cross_tier_density, 0, 1, 20.0, grid(0, 200, 201));
        CHECK(*dens.constants.k5 < 0);
        CHECK(*dens.constants.k3 > 0);
        CHECK(dens.validity_interval.lower == doctest::Approx(*dens.constants.k3 / *dens.constants.k4).epsilon(1e-14));
        CHECK(std::isinf(dens.validity_interval.upper));
        check_closure(c, dens, 20.0);
        CHECK(!dens.points.empty());
    }

    // degenerate: adjusted tier exactly at the target
    const auto flat = base(53, 25, 20);
    const auto deg = cross_tier_curve(flat, TradeoffKind::cross_tier_density, 0, 1, 20.0, {10, 20, 30});
    CHECK(deg.points.empty());
    CHECK(deg.validity_interval.empty);
    for (const auto& r : deg.rejected) CHECK(r.reason.rfind("degenerate", 0) == 0);

    CHECK_THROWS_AS(cross_tier_curve(flat, TradeoffKind::cross_tier_density, 1, 1, 20.0, {1}), InvalidArgument);
    CHECK_THROWS_AS(cross_tier_curve(flat, TradeoffKind::same_tier_density, 0, 1, 20.0, {1}), InvalidArgument);
}

TEST_CASE("cross-tier sign cases on random networks") {
    // Target is the network's own Q_e, so the current point lies on the curve.
    std::mt19937_64 rng(oracle::test_seed(63));
    int seen[3] = {0, 0, 0};
    for (int k = 0; k < 300; ++k) {
        const auto c = cases::random_network(rng, 2 + k % 3, 100);
        const double target = qe(c);
        const auto curve = cross_tier_curve(c, TradeoffKind::cross_tier_density, 0, 1, target, grid(0, 100, 41));
        const auto& k_ = curve.constants;
        const auto a = tier_weights(c);
        double rest = 0, rest_w = 0;
        for (std::size_t t = 2; t < a.size(); ++t) rest += a[t] * c.tiers[t].cache_size;
        for (std::size_t t = 0; t < a.size(); ++t)
            if (t != 1) rest_w += a[t];
        const double q2 = c.tiers[1].cache_size;
        CHECK(*k_.k4 > 0);
        CHECK((*k_.k5 > 0) == (q2 > target));
        CHECK((*k_.k6 > 0) == (q2 > target));
        if (q2 > target) {
            ++seen[0];
            CHECK(*k_.k3 > 0);
            CHECK(curve.validity_interval.lower == 0.0);
        } else if (target > rest / rest_w) {
            ++seen[1];
            CHECK(*k_.k3 > 0);
            CHECK(std::isinf(curve.validity_interval.upper));
        } else {
            ++seen[2];
            CHECK(*k_.k3 < 0);
            CHECK(curve.validity_interval.lower == 0.0);
            CHECK(std::isinf(curve.validity_interval.upper));
        }
        // the network's own Q_1 is a valid point reproducing its own lambda_2
        CHECK(curve.validity_interval.contains(c.tiers[0].cache_size));
        const double own = (*k_.k3 - *k_.k4 * c.tiers[0].cache_size) / *k_.k5;
        CHECK(own == doctest::Approx(c.tiers[1].density).epsilon(1e-9));
        check_closure(c, curve, target);
        const auto pc = cross_tier_curve(c, TradeoffKind::cross_tier_power, 0, 1, target, grid(0, 100, 41));
        check_closure(c, pc, target);
    }
    CHECK(seen[0] > 0);
    CHECK(seen[1] > 0);
}

TEST_CASE("uniform SDP sensitivity signs") {
    std::mt19937_64 rng(oracle::test_seed(64));
    const std::size_t m = 200;
    for (int k = 0; k < 100; ++k) {
        const auto c = cases::random_network(rng, 2 + k % 3, 150);
        auto at = [&](const NetworkConfig& x) { return uniform_sdp_value(qe(x), m, x.sinr_threshold, x.path_loss_exponent); };
        const std::size_t i = k % c.tiers.size();
        auto up = c, down = c;
        up.tiers[i].density *= 1.001;
        down.tiers[i].density /= 1.001;
        const double d_lambda = at(up) - at(down);
        const bool above = c.tiers[i].cache_size >= other_average(c, i);
        if (std::abs(c.tiers[i].cache_size - other_average(c, i)) > 1e-6) CHECK((d_lambda >= 0) == above);

        // d/dQ_i > 0 and ordered like the tier weights
        const auto a = tier_weights(c);
        std::vector<double> slope;
        for (std::size_t t = 0; t < c.tiers.size(); ++t) {
            auto q_up = c, q_down = c;
            q_up.tiers[t].cache_size += 1e-4;
            q_down.tiers[t].cache_size -= 1e-4;
            slope.push_back((at(q_up) - at(q_down)) / 2e-4);
            CHECK(slope.back() > 0);
        }
        for (std::size_t s = 0; s < a.size(); ++s)
            for (std::size_t t = 0; t < a.size(); ++t)
                if (a[s] > a[t] * 1.01) CHECK(slope[s] > slope[t]);
    }
}

TEST_CASE("curve input checks") {
    NetworkConfig one;
    one.tiers = {{1e-5, 1.0, 3}};
    CHECK_THROWS_AS(same_tier_density_curve(one, 0, 2.0, {1}), InvalidArgument);
    CHECK_THROWS_AS(same_tier_density_curve(base(53, 1, 1), 2, 2.0, {1}), InvalidArgument);
    CHECK_THROWS_AS(same_tier_density_curve(base(53, 1, 1), 0, 2.0, {-1}), InvalidArgument);
}
