#include "hetcache/specfun.hpp"

#include <cmath>
#include <sstream>

#include "hetcache/errors.hpp"

namespace hetcache {

namespace {

constexpr int kMaxSeriesTerms = 10000;
constexpr double kSeriesRelTol = 1e-16;

bool is_nonpositive_integer(double c) { return c <= 0.0 && std::floor(c) == c; }

// Power series of 2F1 for 0 <= w < 1.
double series_2f1(double a, double b, double c, double w) {
    double term = 1.0;
    double sum = 1.0;
    for (int n = 0; n < kMaxSeriesTerms; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * w;
        sum += term;
        if (std::abs(term) <= kSeriesRelTol * std::abs(sum)) return sum;
    }
    std::ostringstream os;
    os.precision(17);
    os << "2F1 series did not converge in " << kMaxSeriesTerms << " terms (a=" << a << ", b=" << b
       << ", c=" << c << ", w=" << w << ", last term=" << term << ", partial sum=" << sum << ")";
    throw NumericalFailure(os.str());
}

} // namespace

double gauss_2f1_neg_arg(double a, double b, double c, double z) {
    if (!(z <= 0.0)) throw InvalidArgument("gauss_2f1_neg_arg: z must be <= 0");
    if (is_nonpositive_integer(c)) throw InvalidArgument("gauss_2f1_neg_arg: c is a nonpositive integer");
    if (z == 0.0) return 1.0;
    const double w = z / (z - 1.0);  // in (0, 1)
    return std::pow(1.0 - z, -a) * series_2f1(a, c - b, c, w);
}

double beta_fn(double x, double y) {
    if (!(x > 0.0) || !(y > 0.0)) throw InvalidArgument("beta_fn: arguments must be positive");
    // Gamma itself is exact to a few ulps well below its overflow point.
    if (x + y < 100.0) return std::tgamma(x) * std::tgamma(y) / std::tgamma(x + y);
    return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
}

ChannelConstants channel_constants(double tau, double beta) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("channel_constants: tau must be positive");
    if (!(beta > 2.0) || !std::isfinite(beta)) throw InvalidArgument("channel_constants: beta must exceed 2");
    const double s = 2.0 / beta;
    ChannelConstants k;
    k.tau = tau;
    k.beta = beta;
    k.D = s * std::pow(tau, s) * beta_fn(s, 1.0 - s);
    if (tau <= 1.0) {
        k.H = 2.0 * tau / (beta - 2.0) * gauss_2f1_neg_arg(1.0, 1.0 - s, 2.0 - s, -tau);
    } else {
        // Complement of the exclusion-disc integral: the full-plane part is D,
        // the inner part over mu in (0, 1/tau) has a fast series in -1/tau.
        const double inner = gauss_2f1_neg_arg(1.0, s, 1.0 + s, -1.0 / tau);
        k.H = k.D - inner;
    }
    k.T = k.H - k.D + 1.0;
    return k;
}

} // namespace hetcache
