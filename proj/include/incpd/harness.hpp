#pragma once

// Experiment orchestration: configuration, result records, the comparison
// commands and the invariant suites behind `incpd verify`.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bounds.hpp"
#include "dirichlet.hpp"
#include "dual.hpp"
#include "inclusion.hpp"
#include "measures.hpp"
#include "oracles.hpp"
#include "partitions.hpp"
#include "rng.hpp"

namespace incpd {

using nlohmann::json;

// Raised for malformed or infeasible configurations (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Method { exact, rejection, polya, mcmc };

inline std::string to_string(Method m) {
    switch (m) {
        case Method::exact: return "exact";
        case Method::rejection: return "rejection";
        case Method::polya: return "polya";
        case Method::mcmc: return "mcmc";
    }
    return "?";
}

inline Method parse_method(const std::string& s) {
    if (s == "exact") return Method::exact;
    if (s == "rejection") return Method::rejection;
    if (s == "polya") return Method::polya;
    if (s == "mcmc") return Method::mcmc;
    throw ConfigError("unknown method '" + s + "' (expected exact, rejection, polya or mcmc)");
}

inline StationarySampler sampler_for(Method m, std::uint64_t burn_in) {
    switch (m) {
        case Method::rejection: return {SamplerMethod::rejection, burn_in};
        case Method::mcmc: return {SamplerMethod::mcmc, burn_in};
        default: return {SamplerMethod::polya, burn_in};
    }
}

struct ExperimentConfig {
    std::uint64_t seed = 1;
    InclusionModel model{};
    std::optional<ProductTestFunction> test_function;
    Method method = Method::exact;
    std::size_t replicas = 1000;
    std::uint64_t burn_in_events = 0;  // 0: 20 N L
    int sample_size = 2;
    std::string output;
    double enumeration_cap = default_enumeration_cap;

    void validate() const {
        if (model.N < 1) throw ConfigError("model.N must be positive");
        if (model.L < 1) throw ConfigError("model.L must be positive");
        if (method == Method::exact) {
            const double count = composition_count(model.N, model.L);
            if (count > enumeration_cap)
                throw ConfigError(EnumerationTooLarge(count).what());
        } else if (replicas < 2) {
            throw ConfigError("replicas must be at least 2 for Monte Carlo methods");
        }
        if (sample_size < 1) throw ConfigError("sample_size must be positive");
    }

    const ProductTestFunction& phi() const {
        if (!test_function) throw ConfigError("config has no test_function");
        return *test_function;
    }
};

inline json to_json(const ExperimentConfig& c) {
    json j = {{"seed", c.seed},
              {"model", {{"N", c.model.N}, {"L", c.model.L}, {"theta", c.model.theta}}},
              {"method", to_string(c.method)},
              {"replicas", c.replicas},
              {"burn_in_events", c.burn_in_events},
              {"sample_size", c.sample_size},
              {"output", c.output},
              {"enumeration_cap", c.enumeration_cap}};
    if (c.test_function) j["test_function"] = to_json(*c.test_function);
    return j;
}

inline ExperimentConfig config_from_json(const json& j) {
    try {
        ExperimentConfig c;
        c.seed = j.value("seed", std::uint64_t{1});
        const auto& m = j.at("model");
        c.model = InclusionModel(m.at("N").get<long>(), m.at("L").get<long>(), m.at("theta").get<double>());
        if (j.contains("test_function")) c.test_function = test_function_from_json(j.at("test_function"));
        c.method = parse_method(j.value("method", std::string("exact")));
        c.replicas = j.value("replicas", std::size_t{1000});
        c.burn_in_events = j.value("burn_in_events", std::uint64_t{0});
        c.sample_size = j.value("sample_size", 2);
        c.output = j.value("output", std::string());
        c.enumeration_cap = j.value("enumeration_cap", default_enumeration_cap);
        return c;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse config " + path + ": " + e.what());
    }
    return config_from_json(j);
}

// Seeds listed in a record; longer replica runs keep only the leading ones.
inline constexpr std::size_t recorded_seed_limit = 1024;

struct ResultRecord {
    std::string command;
    json config;
    double estimate = 0.0;
    double standard_error = 0.0;
    BoundBreakdown bound;
    bool pass = false;
    double wall_clock_seconds = 0.0;
    std::vector<std::uint64_t> replica_seeds;
    json details = json::object();

    // Everything except wall-clock time.
    bool same_outcome(const ResultRecord& o) const {
        return command == o.command && config == o.config && estimate == o.estimate &&
               standard_error == o.standard_error && bound == o.bound && pass == o.pass &&
               replica_seeds == o.replica_seeds && details == o.details;
    }
    friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

inline json to_json(const ResultRecord& r) {
    json b;
    to_json(b, r.bound);
    return {{"command", r.command},   {"config", r.config},
            {"estimate", r.estimate}, {"standard_error", r.standard_error},
            {"bound", b},             {"pass", r.pass},
            {"wall_clock_seconds", r.wall_clock_seconds},
            {"replica_seeds", r.replica_seeds},
            {"details", r.details}};
}

inline ResultRecord record_from_json(const json& j) {
    ResultRecord r;
    r.command = j.at("command").get<std::string>();
    r.config = j.at("config");
    r.estimate = j.at("estimate").get<double>();
    r.standard_error = j.at("standard_error").get<double>();
    from_json(j.at("bound"), r.bound);
    r.pass = j.at("pass").get<bool>();
    r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
    r.replica_seeds = j.at("replica_seeds").get<std::vector<std::uint64_t>>();
    r.details = j.at("details");
    return r;
}

inline const char* results_csv_header =
    "N,L,theta,k_or_n,method,estimate,se,bound_total,bound_t1,bound_t2,bound_t3,pass,seed";

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_row(const ResultRecord& r) {
    std::ostringstream os;
    const auto& m = r.config.at("model");
    os << m.at("N").get<long>() << ',' << m.at("L").get<long>() << ',' << fmt_double(m.at("theta").get<double>())
       << ',' << r.bound.order << ',' << r.config.at("method").get<std::string>() << ',' << fmt_double(r.estimate)
       << ',' << fmt_double(r.standard_error) << ',' << fmt_double(r.bound.total) << ','
       << fmt_double(r.bound.term_riemann) << ',' << fmt_double(r.bound.term_mutation) << ','
       << fmt_double(r.bound.term_third) << ',' << (r.pass ? 1 : 0) << ','
       << r.config.at("seed").get<std::uint64_t>();
    return os.str();
}

// Writes result.json and appends to results.csv (header on first write).
inline void persist(const ResultRecord& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "result.json");
        out << to_json(r).dump(2) << '\n';
    }
    const auto csv = dir / "results.csv";
    const bool fresh = !std::filesystem::exists(csv) || std::filesystem::file_size(csv) == 0;
    std::ofstream out(csv, std::ios::app);
    if (fresh) out << results_csv_header << '\n';
    out << csv_row(r) << '\n';
}

namespace detail {

inline std::vector<std::uint64_t> seeds_for(std::uint64_t master, std::size_t replicas) {
    std::vector<std::uint64_t> out;
    for (std::size_t r = 0; r < std::min(replicas, recorded_seed_limit); ++r) out.push_back(mix_seed(master, r));
    return out;
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

// |E h(W) - E h(Z)| against the moment bound.
inline ResultRecord cmd_moment_compare(const ExperimentConfig& cfg, unsigned workers = 0) {
    cfg.validate();
    detail::Stopwatch clock;
    const auto& phi = cfg.phi();
    const double z_dual = dp_moment_dual(cfg.model.theta, phi);
    const double z_sum = dp_moment_partition_sum(cfg.model.theta, phi);
    if (std::abs(z_dual - z_sum) > 1e-10 * std::max(1.0, std::abs(z_sum)))
        throw std::logic_error("DP moment oracles disagree: " + fmt_double(z_dual) + " vs " + fmt_double(z_sum));

    ResultRecord r;
    r.command = "moment-compare";
    r.config = to_json(cfg);
    double w_moment = 0.0;
    if (cfg.method == Method::exact) {
        w_moment = exact_moment(cfg.model, phi, cfg.enumeration_cap);
    } else {
        const auto est = empirical_moment(cfg.model, phi, cfg.replicas, cfg.seed,
                                          sampler_for(cfg.method, cfg.burn_in_events), workers);
        w_moment = est.estimate;
        r.standard_error = est.standard_error;
        r.replica_seeds = detail::seeds_for(cfg.seed, cfg.replicas);
    }
    r.estimate = std::abs(w_moment - z_dual);
    r.bound = theorem1_bound(cfg.model.N, cfg.model.L, cfg.model.theta, static_cast<int>(phi.k()), phi.sup_norm());
    r.pass = r.estimate <= r.bound.total + 3.0 * r.standard_error;
    r.details = {{"w_moment", w_moment}, {"z_moment_dual", z_dual}, {"z_moment_partition_sum", z_sum},
                 {"signed_difference", w_moment - z_dual}};
    r.wall_clock_seconds = clock.seconds();
    return r;
}

// Empirical shape distribution of `replicas` partitions from W, with the
// standard error of each cell frequency.
struct EmpiricalShapes {
    std::map<IntegerPartition, double> frequency;
    std::map<IntegerPartition, double> standard_error;
};

inline EmpiricalShapes empirical_partition_distribution_W(const InclusionModel& m, int n, std::size_t replicas,
                                                          std::uint64_t seed, const StationarySampler& sampler) {
    std::map<IntegerPartition, std::size_t> counts;
    for (std::size_t r = 0; r < replicas; ++r) {
        Rng rng = make_rng(seed, r);
        ++counts[sample_partition_from_W(m, n, rng, sampler)];
    }
    EmpiricalShapes out;
    const double R = static_cast<double>(replicas);
    for (const auto& [p, c] : counts) {
        const double f = static_cast<double>(c) / R;
        out.frequency[p] = f;
        out.standard_error[p] = std::sqrt(f * (1.0 - f) / R);
    }
    return out;
}

// d_TV(S_n(W), S_n(Z)) against the partition bound.
inline ResultRecord cmd_partition_tv(const ExperimentConfig& cfg) {
    cfg.validate();
    detail::Stopwatch clock;
    const int n = cfg.sample_size;
    const auto esf = esf_distribution(cfg.model.theta, n);
    ResultRecord r;
    r.command = "partition-tv";
    r.config = to_json(cfg);
    json dists;
    dists["esf"] = to_json(esf);
    if (cfg.method == Method::exact) {
        const auto w = exact_partition_distribution_W(cfg.model, n, cfg.enumeration_cap);
        r.estimate = tv_distance(w, esf);
        dists["w"] = to_json(w);
    } else {
        const auto emp = empirical_partition_distribution_W(cfg.model, n, cfg.replicas, cfg.seed,
                                                            sampler_for(cfg.method, cfg.burn_in_events));
        std::map<IntegerPartition, double> probs = emp.frequency;
        double total = 0.0;
        for (auto& [p, v] : probs) total += v;
        for (auto& [p, v] : probs) v /= total;
        const PartitionDistribution w(n, probs);
        r.estimate = tv_distance(w, esf);
        double se = 0.0;
        json cells = json::object();
        for (const auto& [p, s] : emp.standard_error) {
            se += s;
            cells[shape_key(p)] = s;
        }
        r.standard_error = 0.5 * se;
        dists["w"] = to_json(w);
        dists["w_cell_standard_error"] = cells;
        r.replica_seeds = detail::seeds_for(cfg.seed, cfg.replicas);
    }
    r.bound = corollary_bound(cfg.model.N, cfg.model.L, cfg.model.theta, n);
    r.pass = r.estimate <= r.bound.total + 3.0 * r.standard_error;
    r.details = dists;
    r.wall_clock_seconds = clock.seconds();
    return r;
}

struct SweepRow {
    long N;
    long L;
    double theta;
    int k;
    double estimate;
    double standard_error;
    BoundBreakdown bound;
    bool pass;
};

inline const char* sweep_csv_header =
    "N,L,theta,k,estimate,se,bound_total,bound_t1,bound_t2,bound_t3,estimate_times_N,bound_times_N,pass";

// Thermodynamic-limit sweep: L = round(N / theta) for each N. Monte Carlo
// replicas use the configured sampler (exact sequential placement unless
// the config selects rejection or mcmc); method "exact" enumerates.
inline std::vector<SweepRow> cmd_sweep(const ExperimentConfig& base, std::span<const long> Ns, unsigned workers = 0) {
    const auto& phi = base.phi();
    const double theta = base.model.theta;
    const double z = dp_moment_dual(theta, phi);
    std::vector<SweepRow> rows;
    long previous = 0;
    for (long N : Ns) {
        if (N <= previous) throw ConfigError("sweep: N values must be strictly increasing");
        previous = N;
        const long L = std::max(1L, std::lround(static_cast<double>(N) / theta));
        const InclusionModel m(N, L, theta);
        SweepRow row{N, L, theta, static_cast<int>(phi.k()), 0.0, 0.0, {}, false};
        if (base.method == Method::exact) {
            row.estimate = std::abs(exact_moment(m, phi, base.enumeration_cap) - z);
        } else {
            if (base.replicas < 2) throw ConfigError("replicas must be at least 2");
            const auto est = empirical_moment(m, phi, base.replicas, mix_seed(base.seed, static_cast<std::uint64_t>(N)),
                                              sampler_for(base.method, base.burn_in_events), workers);
            row.estimate = std::abs(est.estimate - z);
            row.standard_error = est.standard_error;
        }
        row.bound = theorem1_bound(N, L, theta, row.k, phi.sup_norm());
        row.pass = row.estimate <= row.bound.total + 3.0 * row.standard_error;
        rows.push_back(row);
    }
    return rows;
}

inline std::string sweep_csv(std::span<const SweepRow> rows) {
    std::ostringstream os;
    os << sweep_csv_header << '\n';
    for (const auto& r : rows) {
        os << r.N << ',' << r.L << ',' << fmt_double(r.theta) << ',' << r.k << ',' << fmt_double(r.estimate) << ','
           << fmt_double(r.standard_error) << ',' << fmt_double(r.bound.total) << ','
           << fmt_double(r.bound.term_riemann) << ',' << fmt_double(r.bound.term_mutation) << ','
           << fmt_double(r.bound.term_third) << ',' << fmt_double(r.estimate * static_cast<double>(r.N)) << ','
           << fmt_double(r.bound.total * static_cast<double>(r.N)) << ',' << (r.pass ? 1 : 0) << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Verification suites

struct SuiteResult {
    std::string name;
    std::size_t cases = 0;
    double worst = 0.0;      // largest observed violation measure
    double tolerance = 0.0;
    bool passed = true;
    json failing_case;       // first violating case, replayable
};

inline SuiteResult new_suite(std::string name, double tolerance) {
    SuiteResult s;
    s.name = std::move(name);
    s.tolerance = tolerance;
    return s;
}

struct VerifyOptions {
    std::uint64_t seed = 20240501;
    // Perturbs the stationary log weight of configurations with an odd
    // occupation at site 0; used to check that the suites catch a bad law.
    bool inject_fault = false;
    std::size_t derivative_probes = 10000;
};

// Random polynomial of degree 0..max_degree with coefficients in [-1, 1].
inline PolyFactor random_poly(Rng& rng, std::size_t max_degree) {
    const auto d = static_cast<std::size_t>(uniform_below(rng, max_degree + 1));
    std::vector<double> c(d + 1);
    for (double& v : c) v = 2.0 * uniform_open(rng) - 1.0;
    return PolyFactor(std::move(c));
}

inline ProductTestFunction random_test_function(Rng& rng, std::size_t k, std::size_t max_degree = 3) {
    std::vector<PolyFactor> f;
    for (std::size_t j = 0; j < k; ++j) f.push_back(random_poly(rng, max_degree));
    return ProductTestFunction(std::move(f));
}

// Probability measure with 1..max_atoms atoms at uniform locations.
inline AtomicMeasure random_probability_measure(Rng& rng, std::size_t max_atoms = 5) {
    const std::size_t n = 1 + static_cast<std::size_t>(uniform_below(rng, max_atoms));
    std::vector<Atom> atoms;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = -std::log(uniform_open(rng));
        atoms.push_back({uniform_open(rng), w});
        total += w;
    }
    for (auto& a : atoms) a.weight /= total;
    return AtomicMeasure::probability(std::move(atoms));
}

inline json measure_json(const AtomicMeasure& mu) {
    json atoms = json::array();
    for (const auto& a : mu.atoms()) atoms.push_back({a.location, a.weight});
    return atoms;
}

inline std::string hex(double v) {
    std::ostringstream os;
    os << std::hexfloat << v;
    return os.str();
}

inline const std::vector<InclusionModel>& stationary_oracle_models() {
    static const std::vector<InclusionModel> models{{2, 2, 1.0}, {3, 2, 2.0}, {3, 3, 1.5}, {4, 3, 0.7}};
    return models;
}

namespace detail {
inline double faulty_log_weight(const InclusionModel& m, const ParticleConfiguration& c, bool fault) {
    const double w = stationary_log_weight(m, c);
    return fault && (c[0] % 2 == 1) ? w + 1e-3 : w;
}
}  // namespace detail

inline SuiteResult suite_detailed_balance(const VerifyOptions& opt) {
    auto s = new_suite("detailed_balance", 1e-10);
    std::vector<InclusionModel> grid = stationary_oracle_models();
    for (long N : {1L, 2L, 5L})
        for (long L : {2L, 3L, 4L})
            for (double th : {0.5, 1.0, 3.0}) grid.emplace_back(N, L, th);
    for (const auto& m : grid) {
        const double v = detailed_balance_violation(
            m, [&](const ParticleConfiguration& c) { return detail::faulty_log_weight(m, c, opt.inject_fault); });
        ++s.cases;
        s.worst = std::max(s.worst, v);
        if (v > s.tolerance && s.passed) {
            s.passed = false;
            s.failing_case = {{"model", {{"N", m.N}, {"L", m.L}, {"theta", m.theta}}}, {"violation", v}};
        }
    }
    return s;
}

inline SuiteResult suite_null_vector(const VerifyOptions& opt) {
    auto s = new_suite("null_vector", 1e-10);
    for (const auto& m : stationary_oracle_models()) {
        const auto g = generator_matrix(m);
        const Eigen::VectorXd pi = null_vector(g.Q);
        std::vector<double> w;
        double z = 0.0;
        for (const auto& c : g.states) z += w.emplace_back(std::exp(detail::faulty_log_weight(m, c, opt.inject_fault)));
        for (std::size_t a = 0; a < w.size(); ++a) {
            const double err = std::abs(pi(static_cast<Eigen::Index>(a)) - w[a] / z);
            ++s.cases;
            s.worst = std::max(s.worst, err);
            if (err > s.tolerance && s.passed) {
                s.passed = false;
                s.failing_case = {{"model", {{"N", m.N}, {"L", m.L}, {"theta", m.theta}}},
                                  {"state", std::vector<long>(g.states[a].counts().begin(), g.states[a].counts().end())},
                                  {"null_vector", hex(pi(static_cast<Eigen::Index>(a)))},
                                  {"product_form", hex(w[a] / z)}};
            }
        }
    }
    return s;
}

inline SuiteResult suite_generator_stationarity(const VerifyOptions& opt) {
    auto s = new_suite("generator_stationarity", 1e-9);
    Rng rng = make_rng(opt.seed, 11);
    for (const auto& m : stationary_oracle_models()) {
        const auto states = enumerate_stationary(m);
        for (int t = 0; t < 20; ++t) {
            const auto phi = random_test_function(rng, 1 + uniform_below(rng, 3));
            double acc = 0.0;
            for (const auto& st : states)
                acc += st.probability * apply_generator(m, st.config, [&](const ParticleConfiguration& c) {
                           return eval_moment(phi, to_measure(m, c));
                       });
            ++s.cases;
            s.worst = std::max(s.worst, std::abs(acc));
            if (std::abs(acc) > s.tolerance && s.passed) {
                s.passed = false;
                s.failing_case = {{"model", {{"N", m.N}, {"L", m.L}, {"theta", m.theta}}},
                                  {"test_function", to_json(phi)},
                                  {"expected_generator", hex(acc)}};
            }
        }
    }
    return s;
}

inline SuiteResult suite_moment_oracles(const VerifyOptions& opt) {
    auto s = new_suite("moment_oracles", 1e-10);
    Rng rng = make_rng(opt.seed, 12);
    auto check = [&](double theta, const ProductTestFunction& phi) {
        const double a = dp_moment_dual(theta, phi);
        const double b = dp_moment_partition_sum(theta, phi);
        // Relative gap with an absolute floor for moments near zero.
        const double measure = std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-5});
        ++s.cases;
        s.worst = std::max(s.worst, measure);
        if (measure > s.tolerance && s.passed) {
            s.passed = false;
            s.failing_case = {{"theta", theta}, {"test_function", to_json(phi)}, {"dual", hex(a)},
                              {"partition_sum", hex(b)}};
        }
    };
    for (double theta : {0.5, 1.0, 2.0}) {
        for (int t = 0; t < 50; ++t) check(theta, random_test_function(rng, 1 + uniform_below(rng, 5)));
    }
    // Hand value 7/24 at theta = 1, phi(x, y) = x y.
    const std::size_t deg[] = {1, 1};
    const auto xy = ProductTestFunction::monomials(deg);
    const double hand = dp_moment_dual(1.0, xy);
    ++s.cases;
    if (std::abs(hand - 7.0 / 24.0) > 1e-14) {
        s.passed = false;
        s.failing_case = {{"hand_value", hex(hand)}, {"expected", "7/24"}};
    }
    check(1.0, xy);
    return s;
}

inline SuiteResult suite_stein_residual(const VerifyOptions& opt) {
    auto s = new_suite("stein_residual", 1e-8);
    Rng rng = make_rng(opt.seed, 13);
    for (double theta : {0.5, 1.0, 2.0}) {
        for (int t = 0; t < 200; ++t) {
            const auto phi = random_test_function(rng, 1 + uniform_below(rng, 3));
            const auto mu = random_probability_measure(rng);
            const double res = stein_residual(theta, phi, mu);
            ++s.cases;
            s.worst = std::max(s.worst, std::abs(res));
            if (!(std::abs(res) < s.tolerance) && s.passed) {
                s.passed = false;
                s.failing_case = {{"theta", theta}, {"test_function", to_json(phi)}, {"measure", measure_json(mu)},
                                  {"residual", hex(res)}};
            }
        }
    }
    return s;
}

// worst is the largest margin |derivative| - bound over all three orders;
// negative when every probe is strictly inside its bound.
inline SuiteResult suite_stein_factors(const VerifyOptions& opt) {
    auto s = new_suite("stein_factors", 1e-9);
    s.worst = -std::numeric_limits<double>::infinity();
    Rng rng = make_rng(opt.seed, 14);
    const std::size_t per_function = 40;
    const std::size_t functions = std::max<std::size_t>(1, opt.derivative_probes / per_function);
    const double thetas[] = {0.5, 1.0, 2.0};
    for (std::size_t f = 0; f < functions; ++f) {
        const double theta = thetas[f % 3];
        const auto k = static_cast<int>(1 + uniform_below(rng, 4));
        const auto phi = random_test_function(rng, static_cast<std::size_t>(k));
        const SteinSolution sol(theta, phi);
        const auto bounds = stein_factors(theta, k, phi.sup_norm());
        for (std::size_t p = 0; p < per_function; ++p) {
            const auto mu = random_probability_measure(rng);
            const double pts[3] = {uniform_open(rng), uniform_open(rng), uniform_open(rng)};
            const double d1 = std::abs(sol.derivative(mu, std::span<const double>(pts, 1)));
            const double d2 = std::abs(sol.derivative(mu, std::span<const double>(pts, 2)));
            const double d3 = std::abs(sol.derivative(mu, std::span<const double>(pts, 3)));
            const double margin = std::max({d1 - bounds.first, d2 - bounds.second, d3 - bounds.third});
            ++s.cases;
            s.worst = std::max(s.worst, margin);
            if (margin > s.tolerance && s.passed) {
                s.passed = false;
                s.failing_case = {{"theta", theta},       {"test_function", to_json(phi)},
                                  {"measure", measure_json(mu)}, {"points", pts},
                                  {"derivatives", {hex(d1), hex(d2), hex(d3)}},
                                  {"bounds", {bounds.first, bounds.second, bounds.third}}};
            }
        }
    }
    return s;
}

struct NamedSuite {
    std::string name;
    std::function<SuiteResult(const VerifyOptions&)> run;
};

inline std::vector<NamedSuite> verification_suites() {
    return {{"detailed_balance", suite_detailed_balance},
            {"null_vector", suite_null_vector},
            {"generator_stationarity", suite_generator_stationarity},
            {"moment_oracles", suite_moment_oracles},
            {"stein_residual", suite_stein_residual},
            {"stein_factors", suite_stein_factors}};
}

// Runs the suites whose name contains `filter` (all when empty).
inline std::vector<SuiteResult> cmd_verify(const std::string& filter, const VerifyOptions& opt) {
    std::vector<SuiteResult> out;
    for (const auto& s : verification_suites())
        if (filter.empty() || s.name.find(filter) != std::string::npos) out.push_back(s.run(opt));
    if (out.empty()) throw ConfigError("no suite matches '" + filter + "'");
    return out;
}

}  // namespace incpd
