#pragma once

// Discrete inclusion process: N particles on L sites at lattice locations
// x_i = i/L. A particle moves from site i to site j != i at rate
// n_i (n_j + theta/L). The stationary law is the Dirichlet-multinomial
// pi(n) ~ prod_i Gamma(theta/L + n_i) / (Gamma(theta/L) n_i!).
//
// Sites are 0-based in this API; site i sits at location (i + 1) / L.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "measures.hpp"
#include "partitions.hpp"
#include "rate_index.hpp"
#include "rng.hpp"

namespace incpd {

struct InclusionModel {
    long N = 1;
    long L = 2;
    double theta = 1.0;

    InclusionModel() = default;
    InclusionModel(long n, long l, double th) : N(n), L(l), theta(th) {
        if (N < 0) throw std::invalid_argument("InclusionModel: N must be non-negative");
        if (L < 1) throw std::invalid_argument("InclusionModel: L must be positive");
        if (!(theta > 0.0) || !std::isfinite(theta)) throw std::invalid_argument("InclusionModel: theta must be positive");
    }

    // Per-site inclusion parameter theta / L.
    double k_site() const noexcept { return theta / static_cast<double>(L); }
    double location(std::size_t site) const noexcept {
        return static_cast<double>(site + 1) / static_cast<double>(L);
    }

    friend bool operator==(const InclusionModel&, const InclusionModel&) = default;
};

class ParticleConfiguration {
public:
    ParticleConfiguration() = default;
    explicit ParticleConfiguration(std::vector<long> counts) : counts_(std::move(counts)) {
        for (long c : counts_)
            if (c < 0) throw std::invalid_argument("ParticleConfiguration: negative count");
    }

    // N/L particles per site, the remainder on the leading sites.
    static ParticleConfiguration balanced(const InclusionModel& m) {
        std::vector<long> c(static_cast<std::size_t>(m.L), m.N / m.L);
        for (long i = 0; i < m.N % m.L; ++i) ++c[static_cast<std::size_t>(i)];
        return ParticleConfiguration(std::move(c));
    }

    static ParticleConfiguration concentrated(const InclusionModel& m, std::size_t site = 0) {
        std::vector<long> c(static_cast<std::size_t>(m.L), 0);
        c.at(site) = m.N;
        return ParticleConfiguration(std::move(c));
    }

    std::span<const long> counts() const noexcept { return counts_; }
    long operator[](std::size_t i) const { return counts_.at(i); }
    std::size_t sites() const noexcept { return counts_.size(); }
    long total() const noexcept { return std::accumulate(counts_.begin(), counts_.end(), 0L); }

    void move(std::size_t from, std::size_t to) {
        if (counts_.at(from) <= 0) throw std::logic_error("ParticleConfiguration: move from empty site");
        --counts_[from];
        ++counts_.at(to);
    }

    friend bool operator==(const ParticleConfiguration&, const ParticleConfiguration&) = default;
    friend auto operator<=>(const ParticleConfiguration&, const ParticleConfiguration&) = default;

private:
    std::vector<long> counts_;
};

inline void check_conforms(const InclusionModel& m, const ParticleConfiguration& c) {
    if (static_cast<long>(c.sites()) != m.L)
        throw std::invalid_argument("configuration has " + std::to_string(c.sites()) + " sites, model has " +
                                    std::to_string(m.L));
    if (c.total() != m.N)
        throw std::invalid_argument("configuration holds " + std::to_string(c.total()) + " particles, model has " +
                                    std::to_string(m.N));
}

// W = sum_i (n_i / N) delta_{x_i}.
inline AtomicMeasure to_measure(const InclusionModel& m, const ParticleConfiguration& c) {
    if (m.N < 1) throw std::invalid_argument("to_measure: empty configuration");
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < c.sites(); ++i)
        if (c[i] > 0) atoms.push_back({m.location(i), static_cast<double>(c[i]) / static_cast<double>(m.N)});
    return AtomicMeasure::probability(std::move(atoms));
}

inline double jump_rate(const InclusionModel& m, const ParticleConfiguration& c, std::size_t i, std::size_t j) {
    if (i >= static_cast<std::size_t>(m.L) || j >= static_cast<std::size_t>(m.L))
        throw std::out_of_range("jump_rate: site index out of range");
    if (i == j) return 0.0;
    return static_cast<double>(c[i]) * (static_cast<double>(c[j]) + m.k_site());
}

// Sum over i != j of n_i (n_j + theta/L) = N^2 - sum n_i^2 + (theta/L) N (L-1).
inline double total_rate(const InclusionModel& m, const ParticleConfiguration& c) {
    double sq = 0.0;
    for (long n : c.counts()) sq += static_cast<double>(n) * static_cast<double>(n);
    const double N = static_cast<double>(m.N);
    return N * N - sq + m.k_site() * N * static_cast<double>(m.L - 1);
}

// (A_1 F)(n) = sum_{i != j} n_i (n_j + theta/L) [F(n - e_i + e_j) - F(n)].
template <typename F>
double apply_generator(const InclusionModel& m, const ParticleConfiguration& c, F&& f) {
    const double base = f(c);
    double acc = 0.0;
    for (std::size_t i = 0; i < c.sites(); ++i) {
        if (c[i] == 0) continue;
        for (std::size_t j = 0; j < c.sites(); ++j) {
            if (i == j) continue;
            auto next = c;
            next.move(i, j);
            acc += jump_rate(m, c, i, j) * (f(next) - base);
        }
    }
    return acc;
}

// Unnormalized log stationary weight.
inline double stationary_log_weight(const InclusionModel& m, const ParticleConfiguration& c) {
    const double k = m.k_site();
    const double lg_k = std::lgamma(k);
    double acc = 0.0;
    for (long n : c.counts()) {
        if (n == 0) continue;
        acc += std::lgamma(k + static_cast<double>(n)) - lg_k - std::lgamma(static_cast<double>(n) + 1.0);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Exact enumeration

inline constexpr double default_enumeration_cap = 1e7;

class EnumerationTooLarge : public std::runtime_error {
public:
    explicit EnumerationTooLarge(double count)
        : std::runtime_error("too large for exact enumeration: " + std::to_string(static_cast<long double>(count)) +
                             " configurations"),
          count_(count) {}
    double count() const noexcept { return count_; }

private:
    double count_;
};

// C(N + L - 1, L - 1), as a double.
inline double composition_count(long N, long L) {
    return std::round(std::exp(std::lgamma(static_cast<double>(N + L)) - std::lgamma(static_cast<double>(N) + 1.0) -
                               std::lgamma(static_cast<double>(L))));
}

inline std::vector<ParticleConfiguration> compositions(long N, long L, double cap = default_enumeration_cap) {
    const double count = composition_count(N, L);
    if (count > cap) throw EnumerationTooLarge(count);
    std::vector<ParticleConfiguration> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<long> cur(static_cast<std::size_t>(L), 0);
    auto rec = [&](auto&& self, std::size_t site, long remaining) -> void {
        if (site + 1 == cur.size()) {
            cur[site] = remaining;
            out.emplace_back(cur);
            return;
        }
        for (long n = remaining; n >= 0; --n) {
            cur[site] = n;
            self(self, site + 1, remaining - n);
        }
    };
    rec(rec, 0, N);
    return out;
}

struct StationaryState {
    ParticleConfiguration config;
    double probability;
};

inline std::vector<StationaryState> enumerate_stationary(const InclusionModel& m,
                                                         double cap = default_enumeration_cap) {
    auto configs = compositions(m.N, m.L, cap);
    std::vector<double> logw;
    logw.reserve(configs.size());
    for (const auto& c : configs) logw.push_back(stationary_log_weight(m, c));
    const double top = *std::max_element(logw.begin(), logw.end());
    double z = 0.0;
    for (double& lw : logw) z += (lw = std::exp(lw - top));
    std::vector<StationaryState> out;
    out.reserve(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) out.push_back({std::move(configs[i]), logw[i] / z});
    return out;
}

// E h(W) under the stationary law, by enumeration.
inline double exact_moment(const InclusionModel& m, const ProductTestFunction& phi,
                           double cap = default_enumeration_cap) {
    double acc = 0.0;
    for (const auto& s : enumerate_stationary(m, cap)) acc += s.probability * eval_moment(phi, to_measure(m, s.config));
    return acc;
}

// Sum over injections of blocks into distinct sites of
// prod_b W_{site(b)}^{|b|}.
inline double injection_sum(std::span<const double> site_weights, const IntegerPartition& blocks) {
    const std::size_t r = blocks.size();
    const std::size_t full = (std::size_t{1} << r) - 1;
    std::vector<double> dp(full + 1, 0.0);
    dp[0] = 1.0;
    for (double w : site_weights) {
        if (w == 0.0) continue;
        std::vector<double> powers(r);
        for (std::size_t b = 0; b < r; ++b) powers[b] = std::pow(w, blocks[b]);
        for (std::size_t mask = full + 1; mask-- > 0;) {
            if (dp[mask] == 0.0) continue;
            for (std::size_t b = 0; b < r; ++b)
                if (!(mask & (std::size_t{1} << b))) dp[mask | (std::size_t{1} << b)] += dp[mask] * powers[b];
        }
    }
    return dp[full];
}

inline constexpr int exact_partition_max_n = 8;

// Law of the partition shape induced by n iid draws from W.
inline PartitionDistribution exact_partition_distribution_W(const InclusionModel& m, int n,
                                                            double cap = default_enumeration_cap) {
    if (n < 1 || n > exact_partition_max_n)
        throw std::invalid_argument("exact_partition_distribution_W: n must lie in [1, 8]");
    const auto states = enumerate_stationary(m, cap);
    const auto shapes = integer_partitions(n);
    std::map<IntegerPartition, double> probs;
    std::vector<double> weights(static_cast<std::size_t>(m.L));
    for (const auto& p : shapes) probs[p] = 0.0;
    for (const auto& s : states) {
        for (std::size_t i = 0; i < weights.size(); ++i)
            weights[i] = static_cast<double>(s.config[i]) / static_cast<double>(m.N);
        for (const auto& p : shapes) probs[p] += s.probability * injection_sum(weights, p);
    }
    for (auto& [p, v] : probs) v *= set_partitions_of_shape(p);
    return PartitionDistribution(n, std::move(probs));
}

// ---------------------------------------------------------------------------
// Event-driven simulation

struct JumpEvent {
    std::uint64_t index;
    double time;
    std::size_t source;
    std::size_t target;
};

struct SimulationBudget {
    std::optional<std::uint64_t> max_events;
    std::optional<double> time_horizon;

    static SimulationBudget events(std::uint64_t n) { return {n, std::nullopt}; }
    static SimulationBudget horizon(double t) { return {std::nullopt, t}; }
};

// Gillespie simulation with O(log L) event selection. The source site is
// drawn with probability proportional to its total outflow
//   n_i (N - n_i) + (theta/L)(L - 1) n_i,
// split into an integer part (index over n_i (N - n_i)) and a mutation part
// (index over n_i). The target, given the source, is drawn proportional to
// n_j + theta/L over j != i, again as a mixture of the count index with the
// source excluded and a uniform site. All indices hold exact integers.
class InclusionSimulator {
public:
    InclusionSimulator(const InclusionModel& model, ParticleConfiguration start, Rng rng)
        : model_(model), config_(std::move(start)), rng_(std::move(rng)) {
        check_conforms(model_, config_);
        if (model_.N >= 1 && model_.L < 2)
            throw std::invalid_argument("InclusionSimulator: zero total rate needs N >= 1 and L >= 2");
        const auto L = static_cast<std::size_t>(model_.L);
        std::vector<std::int64_t> counts(L), pairs(L);
        for (std::size_t i = 0; i < L; ++i) {
            counts[i] = config_[i];
            pairs[i] = counts[i] * (model_.N - counts[i]);
        }
        counts_ = RateIndex<std::int64_t>(std::span<const std::int64_t>(counts));
        pairs_ = RateIndex<std::int64_t>(std::span<const std::int64_t>(pairs));
        mutation_weight_ = model_.k_site() * static_cast<double>(model_.L - 1);
    }

    const InclusionModel& model() const noexcept { return model_; }
    const ParticleConfiguration& configuration() const noexcept { return config_; }
    double time() const noexcept { return time_; }
    std::uint64_t events() const noexcept { return events_; }

    double total_rate() const noexcept {
        return static_cast<double>(pairs_.total()) + mutation_weight_ * static_cast<double>(model_.N);
    }

    // Runs until the event budget is spent or the next event would fall
    // after the horizon (the clock is then advanced to the horizon).
    template <typename Sink>
    void run(const SimulationBudget& budget, Sink&& sink) {
        if (!budget.max_events && !budget.time_horizon)
            throw std::invalid_argument("simulate: budget must bound events or time");
        if (budget.max_events && *budget.max_events == 0) throw std::invalid_argument("simulate: budget must be positive");
        if (budget.time_horizon && !(*budget.time_horizon > 0.0))
            throw std::invalid_argument("simulate: time horizon must be positive");
        if (model_.N == 0) {
            if (budget.time_horizon) time_ = std::max(time_, *budget.time_horizon);
            return;
        }
        const std::uint64_t stop = budget.max_events ? events_ + *budget.max_events
                                                     : std::numeric_limits<std::uint64_t>::max();
        while (events_ < stop) {
            const double rate = total_rate();
            const double dt = exponential(rng_, rate);
            if (budget.time_horizon && time_ + dt > *budget.time_horizon) {
                time_ = *budget.time_horizon;
                return;
            }
            time_ += dt;
            const auto [i, j] = choose_event(rate);
            apply(i, j);
            sink(JumpEvent{events_, time_, i, j});
            ++events_;
        }
    }

    void run(const SimulationBudget& budget) {
        run(budget, [](const JumpEvent&) {});
    }

private:
    std::pair<std::size_t, std::size_t> choose_event(double rate) {
        const auto N = model_.N;
        std::size_t i;
        if (uniform_open(rng_) * rate < static_cast<double>(pairs_.total()))
            i = pairs_.find(static_cast<std::int64_t>(uniform_below(rng_, static_cast<std::uint64_t>(pairs_.total()))));
        else
            i = counts_.find(static_cast<std::int64_t>(uniform_below(rng_, static_cast<std::uint64_t>(N))));

        const std::int64_t others = N - counts_.value(i);
        const double target_total = static_cast<double>(others) + mutation_weight_;
        std::size_t j;
        if (others > 0 && uniform_open(rng_) * target_total < static_cast<double>(others)) {
            auto u = static_cast<std::int64_t>(uniform_below(rng_, static_cast<std::uint64_t>(others)));
            if (u >= counts_.prefix(i)) u += counts_.value(i);
            j = counts_.find(u);
        } else {
            j = static_cast<std::size_t>(uniform_below(rng_, static_cast<std::uint64_t>(model_.L - 1)));
            if (j >= i) ++j;
        }
        return {i, j};
    }

    void apply(std::size_t i, std::size_t j) {
        const auto N = model_.N;
        config_.move(i, j);
        counts_.add(i, -1);
        counts_.add(j, +1);
        const std::int64_t ni = config_[i];
        const std::int64_t nj = config_[j];
        pairs_.set(i, ni * (N - ni));
        pairs_.set(j, nj * (N - nj));
        if (counts_.total() != N) throw std::logic_error("InclusionSimulator: particle number not conserved");
    }

    InclusionModel model_;
    ParticleConfiguration config_;
    Rng rng_;
    RateIndex<std::int64_t> counts_;
    RateIndex<std::int64_t> pairs_;
    double mutation_weight_ = 0.0;
    double time_ = 0.0;
    std::uint64_t events_ = 0;
};

inline ParticleConfiguration simulate(const InclusionModel& m, ParticleConfiguration start,
                                      const SimulationBudget& budget, Rng& rng) {
    InclusionSimulator sim(m, std::move(start), Rng{rng()});
    sim.run(budget);
    return sim.configuration();
}

// CSV rows event_index,time,source_site,target_site with sites numbered 1..L.
class TrajectoryCsv {
public:
    explicit TrajectoryCsv(std::ostream& out) : out_(out) { out_ << "event_index,time,source_site,target_site\n"; }
    void operator()(const JumpEvent& e) {
        out_ << e.index << ',' << e.time << ',' << e.source + 1 << ',' << e.target + 1 << '\n';
    }

private:
    std::ostream& out_;
};

// ---------------------------------------------------------------------------
// Stationary samplers

inline constexpr std::uint64_t default_rejection_attempts = 10'000'000;

// P(sum of L iid NegBin(theta/L, p) = N) at the mean-matching p.
inline double rejection_acceptance_probability(const InclusionModel& m) {
    const double N = static_cast<double>(m.N);
    const double p = N / (N + m.theta);
    if (m.N == 0) return 1.0;
    return std::exp(std::lgamma(m.theta + N) - std::lgamma(m.theta) - std::lgamma(N + 1.0) + N * std::log(p) +
                    m.theta * std::log1p(-p));
}

// Exact sampler: iid NegBin(theta/L, p) site counts with p = N / (N + theta)
// (mean total N), accepted when the total is N.
inline ParticleConfiguration sample_stationary_exact(const InclusionModel& m, Rng& rng,
                                                     std::uint64_t max_attempts = default_rejection_attempts) {
    const auto L = static_cast<std::size_t>(m.L);
    std::vector<long> counts(L, 0);
    if (m.N == 0) return ParticleConfiguration(std::move(counts));
    // NegBin(r, p) as Poisson(Gamma(r, p / (1 - p))).
    std::gamma_distribution<double> gamma(m.k_site(), static_cast<double>(m.N) / m.theta);
    for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
        long total = 0;
        std::size_t i = 0;
        for (; i < L; ++i) {
            const double lambda = gamma(rng);
            const long c = lambda > 0.0 ? static_cast<long>(std::poisson_distribution<long>(lambda)(rng)) : 0;
            counts[i] = c;
            total += c;
            if (total > m.N) break;
        }
        if (i == L && total == m.N) return ParticleConfiguration(std::move(counts));
    }
    throw std::runtime_error("sample_stationary_exact: no acceptance in " + std::to_string(max_attempts) +
                             " attempts (acceptance probability " +
                             std::to_string(rejection_acceptance_probability(m)) + ")");
}

// Exact sampler by sequential placement (Polya urn): particle t + 1 lands on
// site j with probability (n_j + theta/L) / (t + theta).
inline ParticleConfiguration sample_stationary_polya(const InclusionModel& m, Rng& rng) {
    const auto L = static_cast<std::size_t>(m.L);
    std::vector<long> counts(L, 0);
    std::vector<std::size_t> placed;
    placed.reserve(static_cast<std::size_t>(m.N));
    for (long t = 0; t < m.N; ++t) {
        const double u = uniform_open(rng) * (static_cast<double>(t) + m.theta);
        std::size_t site;
        if (u < static_cast<double>(t))
            site = placed[static_cast<std::size_t>(u)];
        else
            site = static_cast<std::size_t>(uniform_below(rng, L));
        ++counts[site];
        placed.push_back(site);
    }
    return ParticleConfiguration(std::move(counts));
}

inline std::uint64_t default_burn_in(const InclusionModel& m) {
    return static_cast<std::uint64_t>(20 * m.N * m.L);
}

// Runs the process from the balanced configuration for a time horizon at
// which burn_in_events events are expected from the start, and returns the
// state at that time. The state after a fixed number of jumps would follow
// the jump chain's law, which is tilted by the total exit rate.
inline ParticleConfiguration sample_stationary_mcmc(const InclusionModel& m, Rng& rng, std::uint64_t burn_in_events) {
    if (burn_in_events < 1) throw std::invalid_argument("sample_stationary_mcmc: burn-in must be at least 1");
    auto start = ParticleConfiguration::balanced(m);
    if (m.N == 0) return start;
    const double horizon = static_cast<double>(burn_in_events) / total_rate(m, start);
    InclusionSimulator sim(m, std::move(start), Rng{rng()});
    sim.run(SimulationBudget::horizon(horizon));
    return sim.configuration();
}

enum class SamplerMethod { rejection, polya, mcmc };

inline std::string to_string(SamplerMethod s) {
    switch (s) {
        case SamplerMethod::rejection: return "rejection";
        case SamplerMethod::polya: return "polya";
        case SamplerMethod::mcmc: return "mcmc";
    }
    return "?";
}

struct StationarySampler {
    SamplerMethod method = SamplerMethod::polya;
    std::uint64_t burn_in_events = 0;  // 0 selects default_burn_in

    ParticleConfiguration operator()(const InclusionModel& m, Rng& rng) const {
        switch (method) {
            case SamplerMethod::rejection: return sample_stationary_exact(m, rng);
            case SamplerMethod::polya: return sample_stationary_polya(m, rng);
            case SamplerMethod::mcmc:
                return sample_stationary_mcmc(m, rng, burn_in_events ? burn_in_events : default_burn_in(m));
        }
        throw std::logic_error("StationarySampler: unknown method");
    }
};

// ---------------------------------------------------------------------------
// Monte Carlo estimates

struct MonteCarloEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
    std::size_t replicas = 0;
};

inline MonteCarloEstimate summarize(std::span<const double> values) {
    MonteCarloEstimate out;
    out.replicas = values.size();
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.estimate = sum / static_cast<double>(values.size());
    if (values.size() < 2) return out;
    double ss = 0.0;
    for (double v : values) ss += (v - out.estimate) * (v - out.estimate);
    const double var = ss / static_cast<double>(values.size() - 1);
    out.standard_error = std::sqrt(var / static_cast<double>(values.size()));
    return out;
}

// Evaluates f(r, rng_r) for r in [0, replicas) with rng_r = make_rng(seed, r),
// spreading replicas across worker threads. The output is indexed by replica,
// so the result does not depend on the number of workers.
template <typename F>
std::vector<double> run_replicas(std::size_t replicas, std::uint64_t seed, F&& f, unsigned workers = 0) {
    std::vector<double> out(replicas);
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(replicas, 1)));
    auto job = [&](unsigned w) {
        for (std::size_t r = w; r < replicas; r += workers) {
            Rng rng = make_rng(seed, r);
            out[r] = f(r, rng);
        }
    };
    if (workers == 1) {
        job(0);
        return out;
    }
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(job, w);
    pool.clear();
    return out;
}

inline MonteCarloEstimate empirical_moment(const InclusionModel& m, const ProductTestFunction& phi,
                                           std::size_t replicas, std::uint64_t seed,
                                           const StationarySampler& sampler = {}, unsigned workers = 0) {
    if (replicas < 2) throw std::invalid_argument("empirical_moment: need at least 2 replicas");
    const auto values = run_replicas(
        replicas, seed, [&](std::size_t, Rng& rng) { return eval_moment(phi, to_measure(m, sampler(m, rng))); },
        workers);
    return summarize(values);
}

// Shape of the partition induced by n iid draws y_1..y_n from W, where
// i ~ j iff y_i = y_j.
inline IntegerPartition partition_from_configuration(const ParticleConfiguration& c, int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_partition_from_W: n must be at least 1");
    std::vector<long> cumulative(c.sites());
    std::partial_sum(c.counts().begin(), c.counts().end(), cumulative.begin());
    const long N = cumulative.empty() ? 0 : cumulative.back();
    if (N < 1) throw std::invalid_argument("sample_partition_from_W: empty configuration");
    std::map<std::size_t, int> groups;
    for (int t = 0; t < n; ++t) {
        const auto u = static_cast<long>(uniform_below(rng, static_cast<std::uint64_t>(N)));
        const auto site =
            static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        ++groups[site];
    }
    std::vector<int> sizes;
    for (auto [site, s] : groups) sizes.push_back(s);
    return canonical_shape(std::move(sizes));
}

inline IntegerPartition sample_partition_from_W(const InclusionModel& m, int n, Rng& rng,
                                                const StationarySampler& sampler = {}) {
    return partition_from_configuration(sampler(m, rng), n, rng);
}

}  // namespace incpd
