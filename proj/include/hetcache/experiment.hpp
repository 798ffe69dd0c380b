#pragma once

// Experiment specs (JSON), their canonical form, and the runner behind the
// command-line tool. Tier indices in spec files are 1-based; everything in
// memory is 0-based.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hetcache/errors.hpp"
#include "hetcache/matrix.hpp"
#include "hetcache/model.hpp"
#include "hetcache/optimizer.hpp"
#include "hetcache/tradeoff.hpp"

namespace hetcache {

enum class Command { eval, optimize, simulate, tradeoff, sweep, compare };

const char* to_string(Command command) noexcept;
std::optional<Command> parse_command(const std::string& name);

struct CatalogSpec {
    std::size_t size = 200;
    double gamma = 0.8;
    std::vector<double> popularity;  // explicit; overrides (size, gamma) when non-empty

    bool operator==(const CatalogSpec&) const = default;
};

enum class PolicyKind { uniform, popular, optimal, explicit_matrix };

struct PolicySpec {
    PolicyKind kind = PolicyKind::uniform;
    Matrix matrix;  // explicit_matrix only

    bool operator==(const PolicySpec&) const = default;
};

struct SimSpec {
    double window_side = 5000.0;
    std::uint64_t realizations = 10000;
    std::optional<std::uint64_t> seed;
    unsigned workers = 0;
    bool full_cache = false;

    bool operator==(const SimSpec&) const = default;
};

enum class SweepAxis { gamma, cache_size, density, power_w, power_dbm, sinr_threshold_db };

struct SweepSpec {
    SweepAxis axis = SweepAxis::gamma;
    std::size_t tier = 0;
    std::vector<double> values;

    bool operator==(const SweepSpec&) const = default;
};

struct TierOverride {
    std::size_t tier = 0;
    std::optional<double> density;
    std::optional<double> power;  // W
    std::optional<double> cache_size;

    bool operator==(const TierOverride&) const = default;
};

struct TradeoffCase {
    std::string label;
    std::vector<TierOverride> tiers;

    bool operator==(const TradeoffCase&) const = default;
};

struct TradeoffSpec {
    TradeoffKind kind = TradeoffKind::same_tier_density;
    std::size_t source_tier = 0;
    std::size_t adjusted_tier = 0;
    std::optional<double> target_qe;  // defaults to Q_e of each case's network
    std::vector<double> grid;
    std::vector<TradeoffCase> cases;  // empty: the network as given

    bool operator==(const TradeoffSpec&) const = default;
};

struct ExperimentSpec {
    Command command = Command::eval;
    NetworkConfig network;
    CatalogSpec catalog;
    PolicySpec policy;
    SimSpec sim;
    std::optional<SweepSpec> sweep;
    std::optional<TradeoffSpec> tradeoff;
    SolveOptions optimizer;
    std::string output;

    bool operator==(const ExperimentSpec& o) const;
};

/// Raised for malformed or inconsistent specs; the message names the field.
class SpecError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

ExperimentSpec parse_spec(const std::string& json_text);
ExperimentSpec load_spec(const std::string& path);

/// Canonical JSON: SI units, linear threshold, every field explicit.
std::string dump_spec(const ExperimentSpec& spec);

/// Two-tier network with the usual evaluation defaults.
ExperimentSpec default_spec(Command command);

ContentCatalog build_catalog(const CatalogSpec& spec);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Shortest representation that reads back to the same double.
std::string format_double(double value);
void write_csv(std::ostream& out, const CsvTable& table);

struct RunResult {
    CsvTable table;
    std::string summary;
};

RunResult run_experiment(const ExperimentSpec& spec);

/// Whole command-line program; returns the process exit code
/// (0 success, 2 invalid input, 3 numerical failure).
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace hetcache
