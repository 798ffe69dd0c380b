#pragma once

namespace hetcache {

/// Interference constants of the Rayleigh-faded PPP model for a given SINR
/// threshold and path-loss exponent.
///
/// `H` is the Laplace-functional exponent of interferers that also cache the
/// requested content (they lie outside the serving exclusion disc), `D` that
/// of interferers which do not cache it (they may lie arbitrarily close), and
/// `T = H - D + 1`.
struct ChannelConstants {
    double H = 0.0;
    double D = 0.0;
    double T = 0.0;
    double tau = 0.0;
    double beta = 0.0;
};

/// Gauss hypergeometric 2F1(a, b; c; z) for z <= 0.
///
/// The argument is mapped into [0, 1) by the Pfaff transformation
/// 2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1)) and the power series is
/// summed until a term drops below 1e-16 of the partial sum. Throws
/// InvalidArgument for z > 0 or c a nonpositive integer, and NumericalFailure
/// if 10000 terms do not suffice.
double gauss_2f1_neg_arg(double a, double b, double c, double z);

/// Euler Beta function B(x, y) = Gamma(x) Gamma(y) / Gamma(x + y), evaluated
/// through log-gamma. Throws InvalidArgument unless x, y > 0.
double beta_fn(double x, double y);

/// H, D and T for tau > 0, beta > 2.
ChannelConstants channel_constants(double tau, double beta);

} // namespace hetcache
