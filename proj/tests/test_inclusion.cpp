#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "incpd/harness.hpp"
#include "incpd/inclusion.hpp"
#include "incpd/oracles.hpp"
#include "incpd/rate_index.hpp"

using namespace incpd;

namespace {

ParticleConfiguration cfg(std::vector<long> c) { return ParticleConfiguration(std::move(c)); }

double chi_square_p_approx(double stat, int dof) {
    // Wilson-Hilferty upper tail.
    const double z = (std::cbrt(stat / dof) - (1.0 - 2.0 / (9.0 * dof))) / std::sqrt(2.0 / (9.0 * dof));
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

}  // namespace

TEST(InclusionModel, DerivedQuantities) {
    const InclusionModel m(10, 7, 2.1);
    EXPECT_NEAR(m.k_site() * m.L, m.theta, 1e-14 * m.theta);
    for (std::size_t i = 0; i + 1 < 7; ++i) EXPECT_LT(m.location(i), m.location(i + 1));
    EXPECT_GT(m.location(0), 0.0);
    EXPECT_EQ(m.location(6), 1.0);
    EXPECT_THROW(InclusionModel(3, 0, 1.0), std::invalid_argument);
    EXPECT_THROW(InclusionModel(3, 2, 0.0), std::invalid_argument);
}

TEST(JumpRate, WorkedExamples) {
    const InclusionModel m(3, 3, 3.0);
    EXPECT_DOUBLE_EQ(jump_rate(m, cfg({2, 1, 0}), 0, 1), 4.0);
    EXPECT_DOUBLE_EQ(jump_rate(m, cfg({2, 1, 0}), 2, 0), 0.0);
    EXPECT_DOUBLE_EQ(jump_rate(m, cfg({2, 1, 0}), 1, 1), 0.0);
    EXPECT_THROW(jump_rate(m, cfg({2, 1, 0}), 3, 0), std::out_of_range);
}

TEST(JumpRate, TotalRateClosedForm) {
    const InclusionModel m(7, 4, 1.3);
    for (const auto& c : compositions(7, 4)) {
        double sum = 0.0;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) sum += jump_rate(m, c, i, j);
        ASSERT_NEAR(sum, total_rate(m, c), 1e-12);
    }
}

TEST(StationaryLogWeight, UniformWhenThetaEqualsL) {
    const InclusionModel m(5, 4, 4.0);
    for (const auto& c : compositions(5, 4)) EXPECT_NEAR(stationary_log_weight(m, c), 0.0, 1e-13);
    EXPECT_EQ(stationary_log_weight(InclusionModel(0, 3, 1.0), cfg({0, 0, 0})), 0.0);
}

TEST(EnumerateStationary, SmallCases) {
    EXPECT_EQ(enumerate_stationary(InclusionModel(2, 2, 1.0)).size(), 3u);
    EXPECT_EQ(enumerate_stationary(InclusionModel(3, 3, 1.0)).size(), 10u);
    std::map<ParticleConfiguration, double> law;
    for (const auto& s : enumerate_stationary(InclusionModel(2, 2, 1.0))) law[s.config] = s.probability;
    EXPECT_NEAR(law[cfg({2, 0})], 0.375, 1e-15);
    EXPECT_NEAR(law[cfg({1, 1})], 0.25, 1e-15);
    EXPECT_NEAR(law[cfg({0, 2})], 0.375, 1e-15);
}

TEST(EnumerateStationary, FrozenRationalValues) {
    // tests/oracles/frozen_values.py: (N, L, theta) = (3, 3, 3/2).
    std::map<ParticleConfiguration, double> law;
    double total = 0.0;
    for (const auto& s : enumerate_stationary(InclusionModel(3, 3, 1.5))) total += (law[s.config] = s.probability);
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_NEAR(law[cfg({3, 0, 0})], 1.0 / 7.0, 1e-14);
    EXPECT_NEAR(law[cfg({2, 1, 0})], 3.0 / 35.0, 1e-14);
    EXPECT_NEAR(law[cfg({1, 1, 1})], 2.0 / 35.0, 1e-14);
}

TEST(EnumerateStationary, CapIsEnforced) {
    try {
        enumerate_stationary(InclusionModel(40, 40, 1.0));
        FAIL() << "expected EnumerationTooLarge";
    } catch (const EnumerationTooLarge& e) {
        EXPECT_GT(e.count(), 1e7);
        EXPECT_NE(std::string(e.what()).find("too large for exact enumeration"), std::string::npos);
    }
}

TEST(StationaryOracle, DetailedBalanceAndNullVector) {
    for (const auto& m : stationary_oracle_models()) {
        EXPECT_LT(detailed_balance_violation(m), 1e-10);
        const auto g = generator_matrix(m);
        const Eigen::VectorXd pi = null_vector(g.Q);
        const auto law = enumerate_stationary(m);
        ASSERT_EQ(law.size(), g.states.size());
        for (std::size_t a = 0; a < law.size(); ++a) {
            ASSERT_EQ(law[a].config, g.states[a]);
            EXPECT_NEAR(pi(static_cast<Eigen::Index>(a)), law[a].probability, 1e-10);
        }
    }
}

TEST(StationaryOracle, FaultyWeightsAreDetected) {
    const InclusionModel m(3, 3, 1.5);
    const double v = detailed_balance_violation(
        m, [&](const ParticleConfiguration& c) { return stationary_log_weight(m, c) + 0.01 * c[0]; });
    EXPECT_GT(v, 1e-4);
}

TEST(ExactMoment, WorkedExamples) {
    const std::size_t lin[] = {1};
    const auto x = ProductTestFunction::monomials(lin);
    EXPECT_NEAR(exact_moment(InclusionModel(2, 2, 1.0), x), 0.75, 1e-15);
    EXPECT_NEAR(exact_moment(InclusionModel(4, 3, 0.7), ProductTestFunction::constant_one(3)), 1.0, 1e-13);
    // Site symmetry: E<g, W> = sum_i g(x_i) / L.
    const ProductTestFunction g({PolyFactor({0.3, -1.0, 2.0})});
    for (const auto& m : stationary_oracle_models()) {
        double lattice = 0.0;
        for (std::size_t i = 0; i < static_cast<std::size_t>(m.L); ++i) lattice += g.factors()[0](m.location(i));
        EXPECT_NEAR(exact_moment(m, g), lattice / m.L, 1e-13);
    }
}

TEST(ExactMoment, FrozenRationalValues) {
    const std::size_t xy[] = {1, 1};
    EXPECT_NEAR(exact_moment(InclusionModel(6, 4, 1.0), ProductTestFunction::monomials(xy)), 335.0 / 768.0, 1e-14);
    const ProductTestFunction a({PolyFactor({0, 1}), PolyFactor({0, 0, 1}), PolyFactor({0, 1})});
    EXPECT_NEAR(exact_moment(InclusionModel(4, 3, 0.5), a), 3497.0 / 9720.0, 1e-14);
}

TEST(ExactPartitionDistribution, WorkedExamples) {
    const auto d = exact_partition_distribution_W(InclusionModel(2, 2, 1.0), 2);
    EXPECT_NEAR(d[{2}], 0.875, 1e-15);
    EXPECT_NEAR((d[{1, 1}]), 0.125, 1e-15);
    for (int n = 1; n <= 5; ++n) EXPECT_NEAR(exact_partition_distribution_W(InclusionModel(1, 3, 1.0), n)[{n}], 1.0, 1e-15);
    EXPECT_THROW(exact_partition_distribution_W(InclusionModel(2, 2, 1.0), 9), std::invalid_argument);
}

TEST(ExactPartitionDistribution, FrozenRationalValues) {
    const auto d = exact_partition_distribution_W(InclusionModel(4, 3, 1.0), 3);
    EXPECT_NEAR(d[{3}], 91.0 / 144.0, 1e-14);
    EXPECT_NEAR((d[{2, 1}]), 17.0 / 48.0, 1e-14);
    EXPECT_NEAR((d[{1, 1, 1}]), 1.0 / 72.0, 1e-14);
}

TEST(ExactPartitionDistribution, InjectionSumMatchesBruteForce) {
    const std::vector<double> w{0.1, 0.0, 0.35, 0.25, 0.3};
    for (const auto& shape : integer_partitions(4)) {
        // Sum over ordered tuples of distinct sites.
        double brute = 0.0;
        std::vector<std::size_t> sites(shape.size());
        auto rec = [&](auto&& self, std::size_t b, double acc) -> void {
            if (b == shape.size()) {
                brute += acc;
                return;
            }
            for (std::size_t s = 0; s < w.size(); ++s) {
                if (std::find(sites.begin(), sites.begin() + static_cast<long>(b), s) != sites.begin() + static_cast<long>(b)) continue;
                sites[b] = s;
                self(self, b + 1, acc * std::pow(w[s], shape[b]));
            }
        };
        rec(rec, 0, 1.0);
        EXPECT_NEAR(injection_sum(w, shape), brute, 1e-15);
    }
}

TEST(GeneratorStationarity, ExpectationOfGeneratorVanishes) {
    Rng rng = make_rng(9, 0);
    for (const auto& m : stationary_oracle_models()) {
        const auto law = enumerate_stationary(m);
        for (int t = 0; t < 20; ++t) {
            const auto phi = random_test_function(rng, 1 + uniform_below(rng, 3));
            double acc = 0.0;
            for (const auto& s : law)
                acc += s.probability * apply_generator(m, s.config, [&](const ParticleConfiguration& c) {
                           return eval_moment(phi, to_measure(m, c));
                       });
            EXPECT_NEAR(acc, 0.0, 1e-9);
        }
    }
}

TEST(RateIndex, SamplingAndPrefixSums) {
    const std::vector<std::int64_t> w{3, 0, 5, 1, 0, 2};
    RateIndex<std::int64_t> idx{std::span<const std::int64_t>(w)};
    EXPECT_EQ(idx.total(), 11);
    std::vector<int> hits(w.size(), 0);
    for (std::int64_t u = 0; u < idx.total(); ++u) ++hits[idx.find(u)];
    for (std::size_t i = 0; i < w.size(); ++i) EXPECT_EQ(hits[i], w[i]);
    idx.add(1, 4);
    EXPECT_EQ(idx.prefix(2), 7);
    EXPECT_EQ(idx.find(3), 1u);
}

TEST(RateIndex, FloatingTotalsStayInSync) {
    Rng rng = make_rng(10, 0);
    RateIndex<double> idx(1000);
    for (int t = 0; t < 300000; ++t) {
        const auto i = uniform_below(rng, 1000);
        idx.set(i, uniform_open(rng) * 10.0);
        if (t % 50000 == 0) {
            ASSERT_LT(idx.drift(), 1e-9);
        }
    }
    EXPECT_LT(idx.drift(), 1e-9);
    for (int t = 0; t < 10000; ++t) {
        const std::size_t i = idx.find(uniform_open(rng) * idx.total());
        ASSERT_GT(idx.value(i), 0.0);
    }
}

TEST(Simulator, Determinism) {
    const InclusionModel m(20, 10, 1.5);
    const auto start = ParticleConfiguration::balanced(m);
    Rng a = make_rng(77, 0), b = make_rng(77, 0), c = make_rng(78, 0);
    const auto fa = simulate(m, start, SimulationBudget::events(5000), a);
    const auto fb = simulate(m, start, SimulationBudget::events(5000), b);
    const auto fc = simulate(m, start, SimulationBudget::events(5000), c);
    EXPECT_EQ(fa, fb);
    EXPECT_NE(fa, fc);
}

TEST(Simulator, FirstEventLeavesTheOccupiedSite) {
    const InclusionModel m(6, 5, 1.0);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng = make_rng(seed, 0);
        const auto out = simulate(m, ParticleConfiguration::concentrated(m), SimulationBudget::events(1), rng);
        ASSERT_EQ(out[0], 5);
        ASSERT_EQ(out.total(), 6);
    }
}

TEST(Simulator, SingleParticleSpendsHalfTheTimeOnEachSite) {
    const InclusionModel m(1, 2, 2.0);
    InclusionSimulator sim(m, ParticleConfiguration::concentrated(m), make_rng(12, 0));
    // Each visit lasts Exp(1); site 0 fraction over 10^6 events.
    double on0 = 0.0, last = 0.0;
    std::size_t site = 0;
    std::vector<double> stints;
    sim.run(SimulationBudget::events(1000000), [&](const JumpEvent& e) {
        const double stint = e.time - last;
        if (site == 0) on0 += stint;
        stints.push_back(stint);
        last = e.time;
        site = e.target;
    });
    const double frac = on0 / last;
    // Alternating iid Exp(1) stints: the fraction has sd ~ 1 / sqrt(2 n).
    const double se = 1.0 / std::sqrt(2.0 * stints.size());
    EXPECT_NEAR(frac, 0.5, 3 * se);
}

TEST(Simulator, EventMarginalsMatchRates) {
    // From a fixed configuration, the first event (i, j) has probability
    // rate(i, j) / total_rate.
    const InclusionModel m(6, 4, 0.8);
    const auto start = cfg({3, 0, 2, 1});
    std::map<std::pair<std::size_t, std::size_t>, long> hits;
    const long draws = 400000;
    for (long t = 0; t < draws; ++t) {
        InclusionSimulator sim(m, start, make_rng(99, static_cast<std::uint64_t>(t)));
        sim.run(SimulationBudget::events(1), [&](const JumpEvent& e) { ++hits[{e.source, e.target}]; });
    }
    const double total = total_rate(m, start);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            const double p = jump_rate(m, start, i, j) / total;
            const double f = static_cast<double>(hits[{i, j}]) / draws;
            EXPECT_NEAR(f, p, 4 * std::sqrt(p * (1 - p) / draws) + 1e-12) << i << "->" << j;
        }
}

TEST(Simulator, RejectsDegenerateInputs) {
    EXPECT_THROW(InclusionSimulator(InclusionModel(3, 1, 1.0), cfg({3}), Rng{1}), std::invalid_argument);
    EXPECT_THROW(InclusionSimulator(InclusionModel(3, 2, 1.0), cfg({1, 1}), Rng{1}), std::invalid_argument);
    InclusionSimulator sim(InclusionModel(3, 2, 1.0), cfg({2, 1}), Rng{1});
    EXPECT_THROW(sim.run(SimulationBudget::events(0)), std::invalid_argument);
    EXPECT_THROW(sim.run(SimulationBudget{}), std::invalid_argument);
}

TEST(Simulator, TimeHorizonStopsOnTime) {
    InclusionSimulator sim(InclusionModel(10, 5, 1.0), cfg({2, 2, 2, 2, 2}), make_rng(3, 0));
    sim.run(SimulationBudget::horizon(2.5));
    EXPECT_EQ(sim.time(), 2.5);
    EXPECT_GT(sim.events(), 0u);
}

TEST(Simulator, TrajectoryCsvFormat) {
    std::ostringstream os;
    InclusionSimulator sim(InclusionModel(4, 3, 1.0), cfg({4, 0, 0}), make_rng(4, 0));
    sim.run(SimulationBudget::events(3), TrajectoryCsv(os));
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "event_index,time,source_site,target_site");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 3);
    }
    EXPECT_EQ(rows, 3);
    EXPECT_EQ(os.str().substr(os.str().find('\n') + 1, 2), "0,");
}

TEST(Samplers, RejectionSamplerMatchesEnumeration) {
    const InclusionModel m(2, 2, 1.0);
    Rng rng = make_rng(21, 0);
    const long draws = 1000000;
    long both = 0;
    for (long t = 0; t < draws; ++t) {
        const auto c = sample_stationary_exact(m, rng);
        ASSERT_EQ(c.total(), 2);
        both += (c[0] == 1);
    }
    const double f = static_cast<double>(both) / draws;
    EXPECT_NEAR(f, 0.25, 3 * std::sqrt(0.25 * 0.75 / draws));
}

TEST(Samplers, UniformWhenThetaEqualsL) {
    const InclusionModel m(3, 3, 3.0);
    for (auto method : {SamplerMethod::rejection, SamplerMethod::polya}) {
        Rng rng = make_rng(22, static_cast<std::uint64_t>(method));
        std::map<ParticleConfiguration, long> hits;
        const long draws = 200000;
        for (long t = 0; t < draws; ++t) ++hits[StationarySampler{method}(m, rng)];
        ASSERT_EQ(hits.size(), 10u);
        for (const auto& [c, h] : hits) EXPECT_NEAR(static_cast<double>(h) / draws, 0.1, 3 * std::sqrt(0.09 / draws));
    }
}

TEST(Samplers, PolyaMatchesEnumeration) {
    const InclusionModel m(4, 3, 0.7);
    Rng rng = make_rng(23, 0);
    std::map<ParticleConfiguration, long> hits;
    const long draws = 400000;
    for (long t = 0; t < draws; ++t) ++hits[sample_stationary_polya(m, rng)];
    for (const auto& s : enumerate_stationary(m)) {
        const double p = s.probability;
        EXPECT_NEAR(static_cast<double>(hits[s.config]) / draws, p, 4 * std::sqrt(p * (1 - p) / draws));
    }
}

TEST(Samplers, RejectionAttemptCapReportsAcceptance) {
    Rng rng = make_rng(24, 0);
    try {
        sample_stationary_exact(InclusionModel(50, 10, 0.1), rng, 1);
        SUCCEED();  // lucky first acceptance is allowed
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("acceptance probability"), std::string::npos);
    }
}

TEST(Samplers, McmcMarginalCloseToExact) {
    const InclusionModel m(10, 5, 1.0);
    std::vector<double> exact(11, 0.0);
    for (const auto& s : enumerate_stationary(m)) exact[static_cast<std::size_t>(s.config[0])] += s.probability;
    const long draws = 20000;
    std::vector<double> freq(11, 0.0);
    for (long t = 0; t < draws; ++t) {
        Rng rng = make_rng(25, static_cast<std::uint64_t>(t));
        const auto c = sample_stationary_mcmc(m, rng, default_burn_in(m));
        ASSERT_EQ(c.total(), 10);
        freq[static_cast<std::size_t>(c[0])] += 1.0 / draws;
    }
    double tv = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) tv += 0.5 * std::abs(exact[i] - freq[i]);
    EXPECT_LT(tv, 0.02);
}

TEST(Samplers, McmcSeedsAgreeByChiSquare) {
    const InclusionModel m(10, 5, 1.0);
    const long draws = 10000;
    std::vector<double> a(11, 0), b(11, 0);
    for (long t = 0; t < draws; ++t) {
        Rng r1 = make_rng(26, static_cast<std::uint64_t>(t)), r2 = make_rng(27, static_cast<std::uint64_t>(t));
        a[static_cast<std::size_t>(sample_stationary_mcmc(m, r1, 1000)[0])] += 1;
        b[static_cast<std::size_t>(sample_stationary_mcmc(m, r2, 1000)[0])] += 1;
    }
    double stat = 0.0;
    int dof = -1;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] + b[i] == 0) continue;
        stat += (a[i] - b[i]) * (a[i] - b[i]) / (a[i] + b[i]);
        ++dof;
    }
    EXPECT_GT(chi_square_p_approx(stat, dof), 0.001);
}

TEST(EmpiricalMoment, ConstantHasZeroError) {
    const auto est = empirical_moment(InclusionModel(6, 4, 1.0), ProductTestFunction::constant_one(2), 100, 1);
    EXPECT_EQ(est.estimate, 1.0);
    EXPECT_EQ(est.standard_error, 0.0);
    EXPECT_THROW(empirical_moment(InclusionModel(6, 4, 1.0), ProductTestFunction::constant_one(2), 1, 1),
                 std::invalid_argument);
}

TEST(EmpiricalMoment, AgreesWithExactMoment) {
    const InclusionModel m(6, 4, 1.0);
    const std::size_t xy[] = {1, 1};
    const auto phi = ProductTestFunction::monomials(xy);
    const double exact = exact_moment(m, phi);
    for (auto method : {SamplerMethod::rejection, SamplerMethod::polya}) {
        const auto est = empirical_moment(m, phi, 50000, 31, {method});
        EXPECT_NEAR(est.estimate, exact, 4 * est.standard_error) << to_string(method);
    }
}

TEST(EmpiricalMoment, StandardErrorShrinksWithReplicas) {
    const InclusionModel m(6, 4, 1.0);
    const std::size_t xy[] = {1, 1};
    const auto phi = ProductTestFunction::monomials(xy);
    const auto small = empirical_moment(m, phi, 20000, 5);
    const auto large = empirical_moment(m, phi, 80000, 6);
    EXPECT_NEAR(small.standard_error / large.standard_error, 2.0, 0.2);
}

TEST(EmpiricalMoment, WorkerCountDoesNotChangeResult) {
    const InclusionModel m(8, 5, 0.9);
    const std::size_t deg[] = {2, 1};
    const auto phi = ProductTestFunction::monomials(deg);
    const auto one = empirical_moment(m, phi, 3001, 8, {}, 1);
    const auto four = empirical_moment(m, phi, 3001, 8, {}, 4);
    EXPECT_EQ(one.estimate, four.estimate);
    EXPECT_EQ(one.standard_error, four.standard_error);
}

TEST(SamplePartition, EdgeCases) {
    Rng rng = make_rng(40, 0);
    for (int t = 0; t < 100; ++t) {
        EXPECT_EQ(sample_partition_from_W(InclusionModel(1, 4, 1.0), 5, rng), (IntegerPartition{5}));
        EXPECT_EQ(sample_partition_from_W(InclusionModel(7, 4, 1.0), 1, rng), (IntegerPartition{1}));
    }
    EXPECT_THROW(sample_partition_from_W(InclusionModel(7, 4, 1.0), 0, rng), std::invalid_argument);
}

TEST(SamplePartition, TwoBlockFrequency) {
    const InclusionModel m(2, 2, 1.0);
    Rng rng = make_rng(41, 0);
    const long draws = 1000000;
    long two = 0;
    for (long t = 0; t < draws; ++t) two += sample_partition_from_W(m, 2, rng, {SamplerMethod::rejection}).size() == 2;
    const double f = static_cast<double>(two) / draws;
    EXPECT_NEAR(f, 0.125, 3 * std::sqrt(0.125 * 0.875 / draws));
}

TEST(Performance, EventCostGrowsSublinearlyInL) {
    auto ns_per_event = [](long L) {
        const InclusionModel m(L, L, 1.0);
        InclusionSimulator sim(m, ParticleConfiguration::balanced(m), make_rng(50, 0));
        sim.run(SimulationBudget::events(200000));  // warm-up
        const auto t0 = std::chrono::steady_clock::now();
        sim.run(SimulationBudget::events(1000000));
        return std::chrono::duration<double, std::nano>(std::chrono::steady_clock::now() - t0).count() / 1e6;
    };
    const double small = ns_per_event(1 << 10);
    const double large = ns_per_event(1 << 14);
    RecordProperty("ns_per_event_L1024", std::to_string(small));
    RecordProperty("ns_per_event_L16384", std::to_string(large));
    EXPECT_LT(large / small, 4.0);
}
