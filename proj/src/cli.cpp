#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "hetcache/errors.hpp"
#include "hetcache/experiment.hpp"

namespace hetcache {

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Successful delivery probability of probabilistic caching in multi-tier networks"};
    app.require_subcommand(1);

    struct Options {
        std::string spec;
        std::string out;
        std::optional<std::uint64_t> seed;
        std::optional<std::uint64_t> realizations;
        bool dump_defaults = false;
    } opt;

    const char* help[] = {"analytic SDP of a caching policy",
                          "optimal caching probabilities",
                          "Monte Carlo SDP estimate",
                          "density / power versus cache-size tradeoff curves",
                          "analytic SDP along one parameter axis",
                          "optimal vs popular vs uniform caching, with simulation"};
    const Command commands[] = {Command::eval,     Command::optimize, Command::simulate,
                                Command::tradeoff, Command::sweep,    Command::compare};
    for (std::size_t k = 0; k < 6; ++k) {
        auto* sub = app.add_subcommand(to_string(commands[k]), help[k]);
        sub->add_option("--spec", opt.spec, "experiment spec (JSON)");
        sub->add_option("--out", opt.out, "CSV output path (overrides the spec)");
        sub->add_option("--seed", opt.seed, "random seed (overrides the spec)");
        sub->add_option("--realizations", opt.realizations, "Monte Carlo realizations (overrides the spec)");
        sub->add_flag("--dump-defaults", opt.dump_defaults, "print a default spec for this command and exit");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    Command command = Command::eval;
    for (std::size_t k = 0; k < 6; ++k)
        if (app.got_subcommand(to_string(commands[k]))) command = commands[k];

    try {
        if (opt.dump_defaults) {
            out << dump_spec(default_spec(command));
            return 0;
        }
        if (opt.spec.empty()) throw SpecError("--spec: required");
        ExperimentSpec spec = load_spec(opt.spec);
        if (spec.command != command)
            throw SpecError(std::string("command: spec says '") + to_string(spec.command) + "' but '" +
                            to_string(command) + "' was requested");
        if (opt.seed) spec.sim.seed = *opt.seed;
        if (opt.realizations) {
            if (*opt.realizations < 1) throw SpecError("--realizations: must be at least 1");
            spec.sim.realizations = *opt.realizations;
        }
        if (!opt.out.empty()) spec.output = opt.out;
        if (spec.output.empty()) spec.output = std::string(to_string(command)) + ".csv";

        const RunResult result = run_experiment(spec);
        std::ofstream file(spec.output, std::ios::binary | std::ios::trunc);
        if (!file) throw SpecError("output: cannot write '" + spec.output + "'");
        write_csv(file, result.table);
        file.close();
        if (!file) throw SpecError("output: write to '" + spec.output + "' failed");
        out << result.summary << '\n';
        return 0;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        err << "invalid input: " << e.what() << '\n';
        return 2;
    }
}

} // namespace hetcache
