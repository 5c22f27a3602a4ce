// Command-line front end for the inclusion-process experiments.
//
//   incpd verify [--suite NAME] [--inject-fault]
//   incpd moment-compare --config FILE.json [--out DIR]
//   incpd partition-tv --config FILE.json [--out DIR]
//   incpd sweep --config FILE.json --ns 8,16,32,64 [--out FILE.csv]
//   incpd simulate --config FILE.json --events K [--trace FILE.csv]
//
// Exit codes: 0 pass, 1 bound or invariant violation, 2 usage or config error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "incpd/harness.hpp"

namespace {

constexpr int exit_pass = 0;
constexpr int exit_violation = 1;
constexpr int exit_usage = 2;

int report(const incpd::ResultRecord& r, const std::string& out_dir) {
    std::cout << incpd::to_json(r).dump(2) << '\n';
    if (!out_dir.empty()) incpd::persist(r, out_dir);
    return r.pass ? exit_pass : exit_violation;
}

std::string output_dir(const std::string& flag, const incpd::ExperimentConfig& cfg) {
    return flag.empty() ? cfg.output : flag;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inclusion process vs Poisson-Dirichlet: exact oracles, bounds and Monte Carlo experiments"};
    app.require_subcommand(1);

    std::string suite;
    bool inject_fault = false;
    std::uint64_t verify_seed = incpd::VerifyOptions{}.seed;
    auto* verify = app.add_subcommand("verify", "Run the invariant suites");
    verify->add_option("--suite", suite, "Run only suites whose name contains NAME");
    verify->add_flag("--inject-fault", inject_fault, "Corrupt the stationary weights (fault-injection test mode)");
    verify->add_option("--seed", verify_seed, "Seed for randomized suites");

    std::string config_path, out;
    auto* moment = app.add_subcommand("moment-compare", "Compare E h(W) with E h(Z) against the moment bound");
    moment->add_option("--config", config_path, "Experiment config (JSON)")->required();
    moment->add_option("--out", out, "Directory for result.json and results.csv");

    auto* partition = app.add_subcommand("partition-tv", "Sampling-partition TV distance against its bound");
    partition->add_option("--config", config_path, "Experiment config (JSON)")->required();
    partition->add_option("--out", out, "Directory for result.json and results.csv");

    std::vector<long> ns;
    auto* sweep = app.add_subcommand("sweep", "Thermodynamic-limit sweep with L = round(N / theta)");
    sweep->add_option("--config", config_path, "Base config (JSON)")->required();
    sweep->add_option("--ns", ns, "Particle counts, strictly increasing")->delimiter(',')->required();
    sweep->add_option("--out", out, "Write the CSV table here instead of stdout");

    std::uint64_t events = 0;
    std::string trace;
    auto* sim = app.add_subcommand("simulate", "Run the event-driven simulator from the balanced configuration");
    sim->add_option("--config", config_path, "Experiment config (JSON)")->required();
    sim->add_option("--events", events, "Number of jump events")->required();
    sim->add_option("--trace", trace, "CSV trajectory sink");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_usage;
    }

    try {
        if (verify->parsed()) {
            incpd::VerifyOptions opt;
            opt.seed = verify_seed;
            opt.inject_fault = inject_fault;
            const auto results = incpd::cmd_verify(suite, opt);
            bool ok = true;
            std::printf("%-24s %8s %14s %10s %s\n", "suite", "cases", "worst", "tolerance", "status");
            for (const auto& r : results) {
                std::printf("%-24s %8zu %14.3e %10.1e %s\n", r.name.c_str(), r.cases, r.worst, r.tolerance,
                            r.passed ? "PASS" : "FAIL");
                if (!r.passed) {
                    ok = false;
                    std::cerr << "violation in suite " << r.name << ": " << r.failing_case.dump() << '\n';
                }
            }
            return ok ? exit_pass : exit_violation;
        }
        const auto cfg = incpd::load_config(config_path);
        if (moment->parsed()) return report(incpd::cmd_moment_compare(cfg), output_dir(out, cfg));
        if (partition->parsed()) return report(incpd::cmd_partition_tv(cfg), output_dir(out, cfg));
        if (sweep->parsed()) {
            const auto rows = incpd::cmd_sweep(cfg, ns);
            const auto csv = incpd::sweep_csv(rows);
            if (out.empty()) {
                std::cout << csv;
            } else {
                std::ofstream f(out);
                f << csv;
            }
            for (const auto& r : rows)
                if (!r.pass) return exit_violation;
            return exit_pass;
        }
        if (sim->parsed()) {
            if (events == 0) throw incpd::ConfigError("--events must be positive");
            incpd::InclusionSimulator s(cfg.model, incpd::ParticleConfiguration::balanced(cfg.model),
                                        incpd::make_rng(cfg.seed, 0));
            if (trace.empty()) {
                s.run(incpd::SimulationBudget::events(events));
            } else {
                std::ofstream f(trace);
                if (!f) throw incpd::ConfigError("cannot open trace file " + trace);
                s.run(incpd::SimulationBudget::events(events), incpd::TrajectoryCsv(f));
            }
            const auto counts = s.configuration().counts();
            nlohmann::json snapshot = std::vector<long>(counts.begin(), counts.end());
            std::cout << snapshot.dump() << '\n';
            return exit_pass;
        }
    } catch (const incpd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_violation;
    }
    return exit_usage;
}
