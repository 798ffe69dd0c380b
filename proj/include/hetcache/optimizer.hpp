#pragma once

// Maximization of the interference-limited SDP over the caching polytope
//   0 <= p_ij <= 1,  sum_j p_ij = Q_i.
//
// The objective is a sum over contents of x / (T x + D)-type ratios in the
// weighted column sums, hence concave; at the optimum each row i satisfies
//   p_ij = min{ [ (sqrt(V_ij E / eta_i) - sum_{k != i} G_k p_kj - E) / G_i ]^+, 1 }
// for a multiplier eta_i chosen so the row meets its budget.

#include <cstddef>
#include <optional>
#include <vector>

#include "hetcache/matrix.hpp"
#include "hetcache/model.hpp"

namespace hetcache {

/// V_ij = a_i t_j, G_i = a_i T, E = D sum_i a_i with a_i = lambda_i S_i^(2/beta).
struct ObjectiveConstants {
    Matrix V;
    std::vector<double> G;
    double E = 0.0;
};

ObjectiveConstants objective_constants(const NetworkConfig& config, const ContentCatalog& catalog);

/// Residuals accepted below this value.
inline constexpr double kKktAcceptance = 1e-6;

struct KktCertificate {
    std::vector<double> eta;            // per-tier budget multipliers (0 for fixed rows)
    double stationarity_residual = 0.0; // max |p_ij - clamp(fixed-point rhs)|
    double budget_residual = 0.0;       // max_i |sum_j p_ij - Q_i|
    double box_residual = 0.0;          // max distance outside [0, 1]

    bool accepted() const noexcept {
        return stationarity_residual < kKktAcceptance && budget_residual < kKktAcceptance &&
               box_residual < kKktAcceptance;
    }
};

enum class SolveMethod { block_kkt, projected_gradient };

const char* to_string(SolveMethod method) noexcept;

struct SolveOptions {
    int max_outer_iters = 5000;
    double convergence_tol = 1e-9;  // on max |delta P| between outer iterations
    double bisection_tol = 1e-12;   // relative, on the multiplier search
    SolveMethod method = SolveMethod::block_kkt;
};

struct P1Solution {
    CachingPolicy policy;
    KktCertificate certificate;
    double objective = 0.0;
    int iterations = 0;
    SolveMethod method_used = SolveMethod::block_kkt;
    bool converged = false;
};

/// Optimal caching probabilities for an N-tier network.
///
/// block-kkt sweeps the tiers in order, replacing each row by its exact
/// maximizer given the others (a one-dimensional multiplier search). If the
/// sweep does not certify, projected-gradient ascent continues from the best
/// iterate. Rows with Q_i = 0 are fixed to zero, rows with Q_i = M to one.
/// A non-converged solve is returned with `converged == false`.
P1Solution solve_p1(const NetworkConfig& config, const ContentCatalog& catalog, const SolveOptions& options = {});

/// Projected-gradient ascent from a caller-supplied feasible starting point.
P1Solution solve_p1_projected_gradient(const NetworkConfig& config, const ContentCatalog& catalog,
                                       const CachingPolicy& start, const SolveOptions& options = {});

/// Multipliers and residuals of a candidate policy.
KktCertificate certify(const NetworkConfig& config, const ContentCatalog& catalog, const CachingPolicy& policy,
                       double bisection_tol = 1e-12);

/// Right-hand side of the row fixed-point condition for given multipliers.
CachingPolicy fixed_point_map(const NetworkConfig& config, const ContentCatalog& catalog,
                              const CachingPolicy& policy, const std::vector<double>& eta);

struct SingleTierSolution {
    std::vector<double> probs;
    double eta = 0.0;  // multiplier in the normalization V = t_j, G = T, E = D
};

/// Closed-form single-tier optimum for 0 < Q < M:
/// p_j = min{ [ (sqrt(t_j D / eta) - D) / T ]^+, 1 } with sum_j p_j = Q.
SingleTierSolution solve_single_tier(const ContentCatalog& catalog, double cache_size, double tau, double beta,
                                     double bisection_tol = 1e-12);

/// Single-tier SDP sum_j x_j t_j / (T x_j + D).
double single_tier_sdp(const ContentCatalog& catalog, const std::vector<double>& probs, double tau, double beta);

struct EquivalentSolution {
    std::vector<double> x;
    double q_e = 0.0;
    double objective = 0.0;  // upper bound on the N-tier optimum
};

/// Single-tier relaxation with the weighted-average cache size Q_e.
/// Throws InvalidArgument unless 0 < Q_e < M.
EquivalentSolution solve_p2_equivalent(const NetworkConfig& config, const ContentCatalog& catalog);

/// Every BS caches the floor(Q_i) most popular contents, plus the fractional
/// remainder of the budget on the next one.
CachingPolicy baseline_popular(const NetworkConfig& config, const ContentCatalog& catalog);

/// p_ij = Q_i / M.
CachingPolicy baseline_uniform(const NetworkConfig& config, const ContentCatalog& catalog);

} // namespace hetcache
