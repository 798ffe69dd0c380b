#include "hetcache/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hetcache/analytics.hpp"
#include "hetcache/errors.hpp"
#include "hetcache/simulator.hpp"

namespace hetcache {

using json = nlohmann::json;

namespace {

// Reads fields of one JSON object and rejects whatever was not read.
class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
    }

    [[noreturn]] static void fail(const std::string& path, const std::string& what) {
        throw SpecError((path.empty() ? std::string("spec") : path) + ": " + what);
    }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json* get(const std::string& key) {
        if (!j_.contains(key)) return nullptr;
        seen_.insert(key);
        return &j_.at(key);
    }

    const json& require(const std::string& key) {
        const json* v = get(key);
        if (!v) fail(at(key), "missing");
        return *v;
    }

    double number(const std::string& key, double fallback) {
        const json* v = get(key);
        return v ? as_number(*v, at(key)) : fallback;
    }

    std::optional<double> maybe_number(const std::string& key) {
        const json* v = get(key);
        if (!v) return std::nullopt;
        return as_number(*v, at(key));
    }

    std::uint64_t count(const std::string& key, std::uint64_t fallback) {
        const json* v = get(key);
        return v ? as_count(*v, at(key)) : fallback;
    }

    std::string string(const std::string& key, const std::string& fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_string()) fail(at(key), "expected a string");
        return v->get<std::string>();
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) fail(at(it.key()), "unknown key");
    }

    static double as_number(const json& v, const std::string& path) {
        if (!v.is_number()) fail(path, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(path, "must be finite");
        return x;
    }

    static std::uint64_t as_count(const json& v, const std::string& path) {
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            fail(path, "expected a nonnegative integer");
        return v.get<std::uint64_t>();
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string index_path(const std::string& base, std::size_t k) { return base + "[" + std::to_string(k) + "]"; }

double parse_density(const json& v, const std::string& path) {
    if (v.is_number()) return Fields::as_number(v, path);
    Fields f(v, path);
    const double k = Fields::as_number(f.require("k"), f.at("k"));
    const double r = Fields::as_number(f.require("r"), f.at("r"));
    f.finish();
    if (!(r > 0.0)) Fields::fail(f.at("r"), "must be positive");
    return density_per_disc(k, r);
}

std::optional<double> parse_power(Fields& f) {
    const bool w = f.has("power_w");
    const bool dbm = f.has("power_dbm");
    if (w && dbm) Fields::fail(f.at("power_w"), "give either power_w or power_dbm, not both");
    if (w) return f.maybe_number("power_w");
    if (dbm) return dbm_to_watts(*f.maybe_number("power_dbm"));
    return std::nullopt;
}

std::size_t parse_tier_index(const json& v, const std::string& path, std::size_t tiers) {
    const auto t = Fields::as_count(v, path);
    if (t < 1 || t > tiers) Fields::fail(path, "tier must be between 1 and " + std::to_string(tiers));
    return static_cast<std::size_t>(t - 1);
}

std::vector<double> parse_grid(const json& v, const std::string& path) {
    std::vector<double> out;
    if (v.is_array()) {
        for (std::size_t k = 0; k < v.size(); ++k) out.push_back(Fields::as_number(v[k], index_path(path, k)));
        return out;
    }
    Fields f(v, path);
    const double start = Fields::as_number(f.require("start"), f.at("start"));
    const double stop = Fields::as_number(f.require("stop"), f.at("stop"));
    const auto n = Fields::as_count(f.require("count"), f.at("count"));
    f.finish();
    if (n < 1) Fields::fail(f.at("count"), "must be at least 1");
    if (n == 1) return {start};
    for (std::uint64_t k = 0; k < n; ++k)
        out.push_back(k + 1 == n ? stop : start + (stop - start) * static_cast<double>(k) / static_cast<double>(n - 1));
    return out;
}

NetworkConfig parse_network(const json& v) {
    Fields f(v, "network");
    NetworkConfig net;
    const json& tiers = f.require("tiers");
    if (!tiers.is_array() || tiers.empty()) Fields::fail(f.at("tiers"), "expected a non-empty array");
    for (std::size_t k = 0; k < tiers.size(); ++k) {
        const std::string path = index_path(f.at("tiers"), k);
        Fields t(tiers[k], path);
        TierParams tp;
        tp.density = parse_density(t.require("density"), t.at("density"));
        const auto power = parse_power(t);
        if (!power) Fields::fail(t.at("power_w"), "missing (power_w or power_dbm)");
        tp.power = *power;
        tp.cache_size = Fields::as_number(t.require("cache_size"), t.at("cache_size"));
        t.finish();
        net.tiers.push_back(tp);
    }
    net.path_loss_exponent = f.number("path_loss_exponent", 4.0);
    if (f.has("sinr_threshold") && f.has("sinr_threshold_db"))
        Fields::fail(f.at("sinr_threshold"), "give either sinr_threshold or sinr_threshold_db, not both");
    if (f.has("sinr_threshold_db"))
        net.sinr_threshold = db_to_linear(*f.maybe_number("sinr_threshold_db"));
    else
        net.sinr_threshold = f.number("sinr_threshold", 0.1);
    if (f.has("noise_power_w") && f.has("noise_power_dbm"))
        Fields::fail(f.at("noise_power_w"), "give either noise_power_w or noise_power_dbm, not both");
    if (f.has("noise_power_dbm"))
        net.noise_power = dbm_to_watts(*f.maybe_number("noise_power_dbm"));
    else
        net.noise_power = f.number("noise_power_w", 0.0);
    f.finish();
    try {
        validate(net);
    } catch (const InvalidArgument& e) {
        Fields::fail("network", e.what());
    }
    return net;
}

CatalogSpec parse_catalog(const json& v) {
    Fields f(v, "catalog");
    CatalogSpec c;
    if (const json* pop = f.get("popularity")) {
        if (!pop->is_array() || pop->empty()) Fields::fail(f.at("popularity"), "expected a non-empty array");
        for (std::size_t k = 0; k < pop->size(); ++k)
            c.popularity.push_back(Fields::as_number((*pop)[k], index_path(f.at("popularity"), k)));
        if (f.has("gamma")) Fields::fail(f.at("gamma"), "not allowed with an explicit popularity vector");
        c.size = static_cast<std::size_t>(f.count("size", c.popularity.size()));
        if (c.size != c.popularity.size()) Fields::fail(f.at("size"), "does not match the popularity vector");
    } else {
        c.size = static_cast<std::size_t>(f.count("size", c.size));
        c.gamma = f.number("gamma", c.gamma);
    }
    f.finish();
    try {
        build_catalog(c);
    } catch (const InvalidArgument& e) {
        Fields::fail("catalog", e.what());
    }
    return c;
}

PolicySpec parse_policy(const json& v) {
    PolicySpec p;
    if (v.is_string()) {
        const auto name = v.get<std::string>();
        if (name == "uniform") p.kind = PolicyKind::uniform;
        else if (name == "popular") p.kind = PolicyKind::popular;
        else if (name == "optimal") p.kind = PolicyKind::optimal;
        else Fields::fail("policy", "expected uniform, popular, optimal or {\"matrix\": [...]}");
        return p;
    }
    Fields f(v, "policy");
    const json& m = f.require("matrix");
    f.finish();
    if (!m.is_array() || m.empty()) Fields::fail("policy.matrix", "expected a non-empty array of rows");
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const std::string path = index_path("policy.matrix", i);
        if (!m[i].is_array()) Fields::fail(path, "expected an array");
        auto& row = rows.emplace_back();
        for (std::size_t j = 0; j < m[i].size(); ++j) row.push_back(Fields::as_number(m[i][j], index_path(path, j)));
        if (row.size() != rows.front().size()) Fields::fail(path, "rows differ in length");
    }
    p.kind = PolicyKind::explicit_matrix;
    p.matrix = Matrix::from_rows(rows);
    return p;
}

SimSpec parse_sim(const json& v) {
    Fields f(v, "sim");
    SimSpec s;
    s.window_side = f.number("window_side", s.window_side);
    s.realizations = f.count("realizations", s.realizations);
    if (const json* seed = f.get("seed"); seed && !seed->is_null()) s.seed = Fields::as_count(*seed, f.at("seed"));
    s.workers = static_cast<unsigned>(f.count("workers", 0));
    if (const json* fc = f.get("full_cache")) {
        if (!fc->is_boolean()) Fields::fail(f.at("full_cache"), "expected true or false");
        s.full_cache = fc->get<bool>();
    }
    f.finish();
    if (!(s.window_side > 0.0)) Fields::fail(f.at("window_side"), "must be positive");
    if (s.realizations < 1) Fields::fail(f.at("realizations"), "must be at least 1");
    return s;
}

const char* axis_name(SweepAxis a) {
    switch (a) {
    case SweepAxis::gamma: return "gamma";
    case SweepAxis::cache_size: return "cache_size";
    case SweepAxis::density: return "density";
    case SweepAxis::power_w: return "power_w";
    case SweepAxis::power_dbm: return "power_dbm";
    case SweepAxis::sinr_threshold_db: return "sinr_threshold_db";
    }
    return "gamma";
}

SweepSpec parse_sweep(const json& v, std::size_t tiers) {
    Fields f(v, "sweep");
    SweepSpec s;
    const auto axis = f.string("axis", "gamma");
    bool known = false;
    for (auto a : {SweepAxis::gamma, SweepAxis::cache_size, SweepAxis::density, SweepAxis::power_w,
                   SweepAxis::power_dbm, SweepAxis::sinr_threshold_db})
        if (axis == axis_name(a)) {
            s.axis = a;
            known = true;
        }
    if (!known) Fields::fail(f.at("axis"), "unknown axis '" + axis + "'");
    if (const json* t = f.get("tier")) s.tier = parse_tier_index(*t, f.at("tier"), tiers);
    s.values = parse_grid(f.require("values"), f.at("values"));
    f.finish();
    if (s.values.empty()) Fields::fail(f.at("values"), "must not be empty");
    return s;
}

std::optional<TradeoffKind> parse_tradeoff_kind(const std::string& name) {
    for (auto k : {TradeoffKind::same_tier_density, TradeoffKind::same_tier_power, TradeoffKind::cross_tier_density,
                   TradeoffKind::cross_tier_power})
        if (name == to_string(k)) return k;
    return std::nullopt;
}

TradeoffSpec parse_tradeoff(const json& v, std::size_t tiers) {
    Fields f(v, "tradeoff");
    TradeoffSpec t;
    const auto kind = parse_tradeoff_kind(f.string("kind", to_string(t.kind)));
    if (!kind) Fields::fail(f.at("kind"), "unknown tradeoff kind");
    t.kind = *kind;
    t.source_tier = parse_tier_index(f.require("source_tier"), f.at("source_tier"), tiers);
    const bool cross = t.kind == TradeoffKind::cross_tier_density || t.kind == TradeoffKind::cross_tier_power;
    if (const json* a = f.get("adjusted_tier"))
        t.adjusted_tier = parse_tier_index(*a, f.at("adjusted_tier"), tiers);
    else if (cross)
        Fields::fail(f.at("adjusted_tier"), "missing");
    else
        t.adjusted_tier = t.source_tier;
    if (cross && t.adjusted_tier == t.source_tier)
        Fields::fail(f.at("adjusted_tier"), "must differ from source_tier");
    if (!cross && t.adjusted_tier != t.source_tier)
        Fields::fail(f.at("adjusted_tier"), "must equal source_tier for same-tier laws");
    t.target_qe = f.maybe_number("target_qe");
    t.grid = parse_grid(f.require("grid"), f.at("grid"));
    if (const json* cases = f.get("cases")) {
        if (!cases->is_array()) Fields::fail(f.at("cases"), "expected an array");
        for (std::size_t k = 0; k < cases->size(); ++k) {
            const std::string path = index_path(f.at("cases"), k);
            Fields c((*cases)[k], path);
            TradeoffCase tc;
            tc.label = c.string("label", "");
            if (const json* ov = c.get("tiers")) {
                if (!ov->is_array()) Fields::fail(c.at("tiers"), "expected an array");
                for (std::size_t q = 0; q < ov->size(); ++q) {
                    Fields o((*ov)[q], index_path(c.at("tiers"), q));
                    TierOverride to;
                    to.tier = parse_tier_index(o.require("tier"), o.at("tier"), tiers);
                    if (const json* d = o.get("density")) to.density = parse_density(*d, o.at("density"));
                    to.power = parse_power(o);
                    to.cache_size = o.maybe_number("cache_size");
                    o.finish();
                    tc.tiers.push_back(to);
                }
            }
            c.finish();
            t.cases.push_back(std::move(tc));
        }
    }
    f.finish();
    return t;
}

SolveOptions parse_optimizer(const json& v) {
    Fields f(v, "optimizer");
    SolveOptions o;
    const auto method = f.string("method", to_string(o.method));
    if (method == to_string(SolveMethod::block_kkt)) o.method = SolveMethod::block_kkt;
    else if (method == to_string(SolveMethod::projected_gradient)) o.method = SolveMethod::projected_gradient;
    else Fields::fail(f.at("method"), "expected block-kkt or projected-gradient");
    o.max_outer_iters = static_cast<int>(f.count("max_outer_iters", static_cast<std::uint64_t>(o.max_outer_iters)));
    o.convergence_tol = f.number("convergence_tol", o.convergence_tol);
    o.bisection_tol = f.number("bisection_tol", o.bisection_tol);
    f.finish();
    if (o.max_outer_iters < 1) Fields::fail(f.at("max_outer_iters"), "must be at least 1");
    if (!(o.convergence_tol > 0.0)) Fields::fail(f.at("convergence_tol"), "must be positive");
    if (!(o.bisection_tol > 0.0)) Fields::fail(f.at("bisection_tol"), "must be positive");
    return o;
}

NetworkConfig apply_overrides(NetworkConfig net, const TradeoffCase& c) {
    for (const auto& o : c.tiers) {
        auto& t = net.tiers.at(o.tier);
        if (o.density) t.density = *o.density;
        if (o.power) t.power = *o.power;
        if (o.cache_size) t.cache_size = *o.cache_size;
    }
    return net;
}

// ---- running -------------------------------------------------------------

CachingPolicy resolve_policy(const PolicySpec& spec, const NetworkConfig& net, const ContentCatalog& catalog,
                             const SolveOptions& opt) {
    switch (spec.kind) {
    case PolicyKind::uniform: return baseline_uniform(net, catalog);
    case PolicyKind::popular: return baseline_popular(net, catalog);
    case PolicyKind::optimal: {
        auto sol = solve_p1(net, catalog, opt);
        if (!sol.certificate.accepted() && !sol.converged)
            throw NumericalFailure("optimizer did not converge (stationarity residual " +
                                   format_double(sol.certificate.stationarity_residual) + ")");
        return sol.policy;
    }
    case PolicyKind::explicit_matrix:
        if (spec.matrix.rows() != net.tiers.size() || spec.matrix.cols() != catalog.size())
            throw SpecError("policy.matrix: expected " + std::to_string(net.tiers.size()) + " x " +
                            std::to_string(catalog.size()));
        return CachingPolicy{spec.matrix};
    }
    return baseline_uniform(net, catalog);
}

SdpReport analytic_sdp(const NetworkConfig& net, const ContentCatalog& catalog, const CachingPolicy& p) {
    return net.noise_power > 0.0 ? total_sdp_general(net, catalog, p) : total_sdp_interference_limited(net, catalog, p);
}

SimSettings sim_settings(const ExperimentSpec& spec) {
    if (!spec.sim.seed) throw SpecError("sim.seed: required for randomized commands (or pass --seed)");
    SimSettings s;
    s.window_side = spec.sim.window_side;
    s.realizations = spec.sim.realizations;
    s.seed = *spec.sim.seed;
    s.noise_power = spec.network.noise_power;
    s.workers = spec.sim.workers;
    s.full_cache = spec.sim.full_cache;
    return s;
}

std::string tier_label(std::size_t tier) { return std::to_string(tier + 1); }

RunResult run_eval(const ExperimentSpec& spec) {
    const auto catalog = build_catalog(spec.catalog);
    validate(spec.network, catalog);
    const auto policy = resolve_policy(spec.policy, spec.network, catalog, spec.optimizer);
    const auto report = analytic_sdp(spec.network, catalog, policy);
    const auto assoc = association_matrix(spec.network, catalog, policy);
    RunResult r;
    r.table.header = {"tier", "content", "popularity", "caching_probability", "association", "delivery", "contribution"};
    // delivery: W * C given a request for j; contribution weights it by popularity
    for (std::size_t i = 0; i < policy.tier_count(); ++i)
        for (std::size_t j = 0; j < catalog.size(); ++j)
            r.table.rows.push_back({tier_label(i), std::to_string(j + 1), format_double(catalog.popularity(j)),
                                    format_double(policy(i, j)), format_double(assoc.w(i, j)),
                                    format_double(report.per_pair(i, j)),
                                    format_double(catalog.popularity(j) * report.per_pair(i, j))});
    r.summary = "sdp=" + format_double(report.total) + " mode=" + to_string(report.mode) +
                " q_e=" + format_double(equivalent_cache_size(spec.network));
    return r;
}

RunResult run_optimize(const ExperimentSpec& spec) {
    const auto catalog = build_catalog(spec.catalog);
    const auto sol = solve_p1(spec.network, catalog, spec.optimizer);
    RunResult r;
    r.table.header = {"tier", "content", "probability"};
    for (std::size_t i = 0; i < sol.policy.tier_count(); ++i)
        for (std::size_t j = 0; j < catalog.size(); ++j)
            r.table.rows.push_back({tier_label(i), std::to_string(j + 1), format_double(sol.policy(i, j))});
    std::ostringstream s;
    s << "optimum=" << format_double(sol.objective) << " method=" << to_string(sol.method_used)
      << " iterations=" << sol.iterations << " converged=" << (sol.converged ? "yes" : "no")
      << " stationarity=" << format_double(sol.certificate.stationarity_residual)
      << " budget=" << format_double(sol.certificate.budget_residual)
      << " box=" << format_double(sol.certificate.box_residual);
    const double q_e = equivalent_cache_size(spec.network);
    if (q_e > 0.0 && q_e < static_cast<double>(catalog.size()))
        s << " single_tier_bound=" << format_double(solve_p2_equivalent(spec.network, catalog).objective);
    r.summary = s.str();
    if (!sol.certificate.accepted() && !sol.converged)
        throw NumericalFailure("optimizer did not certify: " + r.summary);
    return r;
}

RunResult run_simulate(const ExperimentSpec& spec) {
    const auto settings = sim_settings(spec);
    const auto catalog = build_catalog(spec.catalog);
    validate(spec.network, catalog);
    const auto policy = resolve_policy(spec.policy, spec.network, catalog, spec.optimizer);
    const auto est = estimate_sdp(spec.network, catalog, policy, settings);
    const auto analytic = analytic_sdp(spec.network, catalog, policy);
    RunResult r;
    r.table.header = {"realizations", "successes", "unserved", "sdp_hat", "stderr", "sdp_analytic"};
    r.table.rows.push_back({std::to_string(est.realizations), std::to_string(est.successes),
                            std::to_string(est.unserved), format_double(est.sdp_hat),
                            format_double(est.standard_error), format_double(analytic.total)});
    r.summary = "sdp_hat=" + format_double(est.sdp_hat) + " stderr=" + format_double(est.standard_error) +
                " analytic=" + format_double(analytic.total);
    return r;
}

std::string sweep_column(const SweepSpec& s) {
    const std::string t = tier_label(s.tier);
    switch (s.axis) {
    case SweepAxis::gamma: return "gamma";
    case SweepAxis::cache_size: return "Q" + t;
    case SweepAxis::density: return "lambda" + t;
    case SweepAxis::power_w: return "S" + t + "_w";
    case SweepAxis::power_dbm: return "S" + t + "_dbm";
    case SweepAxis::sinr_threshold_db: return "sinr_threshold_db";
    }
    return "value";
}

void apply_sweep(const SweepSpec& s, double v, NetworkConfig& net, CatalogSpec& cat) {
    switch (s.axis) {
    case SweepAxis::gamma:
        if (!cat.popularity.empty()) throw SpecError("sweep.axis: gamma sweep needs a Zipf catalog");
        cat.gamma = v;
        break;
    case SweepAxis::cache_size: net.tiers.at(s.tier).cache_size = v; break;
    case SweepAxis::density: net.tiers.at(s.tier).density = v; break;
    case SweepAxis::power_w: net.tiers.at(s.tier).power = v; break;
    case SweepAxis::power_dbm: net.tiers.at(s.tier).power = dbm_to_watts(v); break;
    case SweepAxis::sinr_threshold_db: net.sinr_threshold = db_to_linear(v); break;
    }
}

RunResult run_sweep(const ExperimentSpec& spec) {
    if (!spec.sweep) throw SpecError("sweep: required by the sweep command");
    const auto& sw = *spec.sweep;
    RunResult r;
    r.table.header = {sweep_column(sw), "sdp", "q_e", "sdp_uniform", "sdp_single_tier_bound"};
    double best = -1.0;
    for (double v : sw.values) {
        NetworkConfig net = spec.network;
        CatalogSpec cs = spec.catalog;
        apply_sweep(sw, v, net, cs);
        const auto catalog = build_catalog(cs);
        try {
            validate(net, catalog);
        } catch (const InvalidArgument& e) {
            throw SpecError("sweep value " + format_double(v) + ": " + e.what());
        }
        const auto policy = resolve_policy(spec.policy, net, catalog, spec.optimizer);
        const double sdp = analytic_sdp(net, catalog, policy).total;
        const auto uni = uniform_sdp(net, catalog);
        std::string bound;
        if (uni.q_e > 0.0 && uni.q_e < static_cast<double>(catalog.size()))
            bound = format_double(solve_p2_equivalent(net, catalog).objective);
        r.table.rows.push_back({format_double(v), format_double(sdp), format_double(uni.q_e), format_double(uni.sdp),
                                bound});
        best = std::max(best, sdp);
    }
    r.summary = "points=" + std::to_string(r.table.rows.size()) + " max_sdp=" + format_double(best);
    return r;
}

RunResult run_compare(const ExperimentSpec& spec) {
    auto settings = sim_settings(spec);
    std::vector<double> gammas{spec.catalog.gamma};
    if (spec.sweep) {
        if (spec.sweep->axis != SweepAxis::gamma) throw SpecError("sweep.axis: compare sweeps gamma only");
        gammas = spec.sweep->values;
    }
    if (!spec.catalog.popularity.empty()) throw SpecError("catalog: compare needs a Zipf catalog");
    RunResult r;
    r.table.header = {"gamma", "sdp_optimal", "sdp_popular", "sdp_uniform", "sdp_sim_optimal", "sim_stderr"};
    for (double g : gammas) {
        CatalogSpec cs = spec.catalog;
        cs.gamma = g;
        const auto catalog = build_catalog(cs);
        validate(spec.network, catalog);
        const auto opt = resolve_policy({PolicyKind::optimal, {}}, spec.network, catalog, spec.optimizer);
        const double s_opt = analytic_sdp(spec.network, catalog, opt).total;
        const double s_pop = analytic_sdp(spec.network, catalog, baseline_popular(spec.network, catalog)).total;
        const double s_uni = analytic_sdp(spec.network, catalog, baseline_uniform(spec.network, catalog)).total;
        const auto est = estimate_sdp(spec.network, catalog, opt, settings);
        r.table.rows.push_back({format_double(g), format_double(s_opt), format_double(s_pop), format_double(s_uni),
                                format_double(est.sdp_hat), format_double(est.standard_error)});
    }
    r.summary = "gammas=" + std::to_string(gammas.size()) + " realizations=" + std::to_string(settings.realizations);
    return r;
}

std::string status_code(const std::string& reason) {
    const auto end = reason.find_first_of(": ");
    return reason.substr(0, end);
}

RunResult run_tradeoff(const ExperimentSpec& spec) {
    if (!spec.tradeoff) throw SpecError("tradeoff: required by the tradeoff command");
    const auto& t = *spec.tradeoff;
    std::vector<TradeoffCase> cases = t.cases;
    if (cases.empty()) cases.push_back({});
    const bool density = t.kind == TradeoffKind::same_tier_density || t.kind == TradeoffKind::cross_tier_density;
    const std::string value_name = (density ? "lambda" : "S") + tier_label(t.adjusted_tier);

    RunResult r;
    r.table.header.push_back("Q" + tier_label(t.source_tier));
    for (std::size_t c = 0; c < cases.size(); ++c) r.table.header.push_back(value_name + "_case" + std::to_string(c + 1));
    for (std::size_t c = 0; c < cases.size(); ++c) r.table.header.push_back("status_case" + std::to_string(c + 1));
    r.table.rows.assign(t.grid.size(), std::vector<std::string>(1 + 2 * cases.size()));
    for (std::size_t g = 0; g < t.grid.size(); ++g) r.table.rows[g][0] = format_double(t.grid[g]);

    std::ostringstream s;
    s << "tradeoff kind=" << to_string(t.kind);
    for (std::size_t c = 0; c < cases.size(); ++c) {
        NetworkConfig net = apply_overrides(spec.network, cases[c]);
        try {
            validate(net);
        } catch (const InvalidArgument& e) {
            throw SpecError(index_path("tradeoff.cases", c) + ": " + e.what());
        }
        const double target = t.target_qe ? *t.target_qe : equivalent_cache_size(net);
        auto make_curve = [&](const std::vector<double>& grid) {
            switch (t.kind) {
            case TradeoffKind::same_tier_density: return same_tier_density_curve(net, t.source_tier, target, grid);
            case TradeoffKind::same_tier_power: return same_tier_power_curve(net, t.source_tier, target, grid);
            default: return cross_tier_curve(net, t.kind, t.source_tier, t.adjusted_tier, target, grid);
            }
        };
        const TradeoffCurve curve = make_curve(t.grid);
        // One grid value at a time keeps each row's verdict next to its Q.
        for (std::size_t g = 0; g < t.grid.size(); ++g) {
            const auto one = make_curve({t.grid[g]});
            auto& row = r.table.rows[g];
            if (!one.points.empty()) {
                row[1 + c] = format_double(one.points.front().value);
                row[1 + cases.size() + c] = "ok";
            } else {
                row[1 + cases.size() + c] = status_code(one.rejected.front().reason);
            }
        }
        const auto& vi = curve.validity_interval;
        s << " case" << c + 1 << ":q_e=" << format_double(target) << ",points=" << curve.points.size()
          << ",rejected=" << curve.rejected.size() << ",valid="
          << (vi.empty ? std::string("empty")
                       : std::string(vi.lower_closed ? "[" : "(") + format_double(vi.lower) + "," +
                             format_double(vi.upper) + (vi.upper_closed ? "]" : ")"));
    }
    r.summary = s.str();
    return r;
}

json network_json(const NetworkConfig& net) {
    json tiers = json::array();
    for (const auto& t : net.tiers)
        tiers.push_back({{"density", t.density}, {"power_w", t.power}, {"cache_size", t.cache_size}});
    return {{"tiers", tiers},
            {"path_loss_exponent", net.path_loss_exponent},
            {"sinr_threshold", net.sinr_threshold},
            {"noise_power_w", net.noise_power}};
}

} // namespace

const char* to_string(Command command) noexcept {
    switch (command) {
    case Command::eval: return "eval";
    case Command::optimize: return "optimize";
    case Command::simulate: return "simulate";
    case Command::tradeoff: return "tradeoff";
    case Command::sweep: return "sweep";
    case Command::compare: return "compare";
    }
    return "eval";
}

std::optional<Command> parse_command(const std::string& name) {
    for (auto c : {Command::eval, Command::optimize, Command::simulate, Command::tradeoff, Command::sweep,
                   Command::compare})
        if (name == to_string(c)) return c;
    return std::nullopt;
}

bool ExperimentSpec::operator==(const ExperimentSpec& o) const {
    return command == o.command && network == o.network && catalog == o.catalog && policy == o.policy &&
           sim == o.sim && sweep == o.sweep && tradeoff == o.tradeoff &&
           optimizer.method == o.optimizer.method && optimizer.max_outer_iters == o.optimizer.max_outer_iters &&
           optimizer.convergence_tol == o.optimizer.convergence_tol &&
           optimizer.bisection_tol == o.optimizer.bisection_tol && output == o.output;
}

ContentCatalog build_catalog(const CatalogSpec& spec) {
    if (!spec.popularity.empty()) return ContentCatalog(spec.popularity);
    return make_zipf_catalog(spec.size, spec.gamma);
}

ExperimentSpec parse_spec(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SpecError(std::string("spec: not valid JSON: ") + e.what());
    }
    Fields f(root, "");
    ExperimentSpec spec;
    const auto cmd = f.string("command", "");
    if (cmd.empty()) Fields::fail("command", "missing");
    const auto parsed = parse_command(cmd);
    if (!parsed) Fields::fail("command", "unknown command '" + cmd + "'");
    spec.command = *parsed;
    spec.network = parse_network(f.require("network"));
    if (const json* c = f.get("catalog")) spec.catalog = parse_catalog(*c);
    if (const json* p = f.get("policy")) spec.policy = parse_policy(*p);
    if (const json* s = f.get("sim")) spec.sim = parse_sim(*s);
    if (const json* s = f.get("sweep"); s && !s->is_null()) spec.sweep = parse_sweep(*s, spec.network.tiers.size());
    if (const json* t = f.get("tradeoff"); t && !t->is_null())
        spec.tradeoff = parse_tradeoff(*t, spec.network.tiers.size());
    if (const json* o = f.get("optimizer")) spec.optimizer = parse_optimizer(*o);
    spec.output = f.string("output", "");
    f.finish();
    try {
        validate(spec.network, build_catalog(spec.catalog));
    } catch (const SpecError&) {
        throw;
    } catch (const InvalidArgument& e) {
        throw SpecError(std::string("network: ") + e.what());
    }
    return spec;
}

ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecError("--spec: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spec(buf.str());
}

std::string dump_spec(const ExperimentSpec& spec) {
    json root;
    root["command"] = to_string(spec.command);
    root["network"] = network_json(spec.network);
    if (!spec.catalog.popularity.empty())
        root["catalog"] = {{"popularity", spec.catalog.popularity}};
    else
        root["catalog"] = {{"size", spec.catalog.size}, {"gamma", spec.catalog.gamma}};
    switch (spec.policy.kind) {
    case PolicyKind::uniform: root["policy"] = "uniform"; break;
    case PolicyKind::popular: root["policy"] = "popular"; break;
    case PolicyKind::optimal: root["policy"] = "optimal"; break;
    case PolicyKind::explicit_matrix: root["policy"] = {{"matrix", spec.policy.matrix.to_rows()}}; break;
    }
    json sim = {{"window_side", spec.sim.window_side},
                {"realizations", spec.sim.realizations},
                {"workers", spec.sim.workers},
                {"full_cache", spec.sim.full_cache}};
    sim["seed"] = spec.sim.seed ? json(*spec.sim.seed) : json(nullptr);
    root["sim"] = sim;
    if (spec.sweep)
        root["sweep"] = {{"axis", axis_name(spec.sweep->axis)}, {"tier", spec.sweep->tier + 1},
                         {"values", spec.sweep->values}};
    if (spec.tradeoff) {
        const auto& t = *spec.tradeoff;
        json cases = json::array();
        for (const auto& c : t.cases) {
            json tiers = json::array();
            for (const auto& o : c.tiers) {
                json e = {{"tier", o.tier + 1}};
                if (o.density) e["density"] = *o.density;
                if (o.power) e["power_w"] = *o.power;
                if (o.cache_size) e["cache_size"] = *o.cache_size;
                tiers.push_back(e);
            }
            cases.push_back({{"label", c.label}, {"tiers", tiers}});
        }
        json tj = {{"kind", to_string(t.kind)},
                   {"source_tier", t.source_tier + 1},
                   {"adjusted_tier", t.adjusted_tier + 1},
                   {"grid", t.grid},
                   {"cases", cases}};
        if (t.target_qe) tj["target_qe"] = *t.target_qe;
        root["tradeoff"] = tj;
    }
    root["optimizer"] = {{"method", to_string(spec.optimizer.method)},
                         {"max_outer_iters", spec.optimizer.max_outer_iters},
                         {"convergence_tol", spec.optimizer.convergence_tol},
                         {"bisection_tol", spec.optimizer.bisection_tol}};
    root["output"] = spec.output;
    return root.dump(2) + "\n";
}

ExperimentSpec default_spec(Command command) {
    ExperimentSpec spec;
    spec.command = command;
    spec.network.tiers = {{density_per_disc(1, 500), dbm_to_watts(53), 20},
                          {density_per_disc(5, 500), dbm_to_watts(33), 20}};
    spec.network.path_loss_exponent = 4.0;
    spec.network.sinr_threshold = db_to_linear(-10);
    spec.catalog = {200, 0.8, {}};
    spec.output = std::string(to_string(command)) + ".csv";
    switch (command) {
    case Command::optimize:
    case Command::compare: spec.policy.kind = PolicyKind::optimal; break;
    default: break;
    }
    if (command == Command::simulate || command == Command::compare) spec.sim.seed = 1;
    if (command == Command::sweep || command == Command::compare)
        spec.sweep = SweepSpec{SweepAxis::gamma, 0, {0.2, 0.6, 1.0, 1.4, 1.8}};
    if (command == Command::tradeoff) {
        TradeoffSpec t;
        t.kind = TradeoffKind::same_tier_density;
        t.target_qe = 20.0;
        t.grid = {10, 15, 20, 21, 22, 25, 30, 40, 60, 100, 200};
        t.cases = {{"S1=43dBm", {{0, std::nullopt, dbm_to_watts(43), std::nullopt}}},
                   {"S1=53dBm", {{0, std::nullopt, dbm_to_watts(53), std::nullopt}}}};
        spec.network.tiers[1].cache_size = 10;
        spec.tradeoff = t;
    }
    return spec;
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const CsvTable& table) {
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) out << ',';
            out << cells[k];
        }
        out << '\n';
    };
    line(table.header);
    for (const auto& row : table.rows) line(row);
}

RunResult run_experiment(const ExperimentSpec& spec) {
    switch (spec.command) {
    case Command::eval: return run_eval(spec);
    case Command::optimize: return run_optimize(spec);
    case Command::simulate: return run_simulate(spec);
    case Command::tradeoff: return run_tradeoff(spec);
    case Command::sweep: return run_sweep(spec);
    case Command::compare: return run_compare(spec);
    }
    throw SpecError("command: unsupported");
}

} // namespace hetcache
