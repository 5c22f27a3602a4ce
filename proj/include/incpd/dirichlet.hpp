#pragma once

// The limit object Z ~ DP(theta, U[0,1]): stick-breaking sampling, the
// Chinese restaurant process, the Ewens sampling formula, and exact moments
// E<phi, Z^k> by summing over set partitions.

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "measures.hpp"
#include "partitions.hpp"
#include "rng.hpp"

namespace incpd {

inline constexpr int esf_max_n = 30;
inline constexpr std::size_t partition_sum_max_k = 10;
inline constexpr double default_truncation = 1e-10;

// log of theta (theta+1) ... (theta+n-1)
inline double log_rising_factorial(double theta, int n) {
    return std::lgamma(theta + n) - std::lgamma(theta);
}

// Size-biased (GEM) stick-breaking weights, truncated once the unbroken
// remainder drops below the threshold.
struct GemSample {
    std::vector<double> weights;
    double residual = 1.0;
};

inline GemSample sample_gem(double theta, double eps, Rng& rng) {
    if (!(theta > 0.0)) throw std::invalid_argument("sample_gem: theta must be positive");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("sample_gem: eps must lie in (0,1)");
    GemSample out;
    double rest = 1.0;
    while (rest >= eps) {
        // V ~ Beta(1, theta) by inversion: 1 - V = U^{1/theta}.
        const double keep = std::pow(uniform_open(rng), 1.0 / theta);
        const double next = rest * keep;
        const double w = rest - next;
        if (w <= 0.0) continue;
        out.weights.push_back(w);
        rest = next;
    }
    out.residual = rest;
    return out;
}

// Z = sum_i P_i delta_{xi_i} with xi_i iid uniform. The truncated remainder
// becomes one extra uniform atom.
inline AtomicMeasure sample_dp(double theta, double eps, Rng& rng) {
    auto gem = sample_gem(theta, eps, rng);
    std::vector<Atom> atoms;
    atoms.reserve(gem.weights.size() + 1);
    for (double w : gem.weights) atoms.push_back({uniform_open(rng), w});
    atoms.push_back({uniform_open(rng), gem.residual});
    double total = 0.0;
    for (const auto& a : atoms) total += a.weight;
    for (auto& a : atoms) a.weight /= total;
    return AtomicMeasure::probability(std::move(atoms));
}

// Shape of the Chinese restaurant process after n customers.
inline IntegerPartition crp_sample(double theta, int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("crp_sample: n must be at least 1");
    if (!(theta > 0.0)) throw std::invalid_argument("crp_sample: theta must be positive");
    std::vector<int> table_of;
    std::vector<int> sizes;
    table_of.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        // t customers seated: join an existing table w.p. t/(t+theta).
        const double u = uniform_open(rng) * (t + theta);
        if (u < t) {
            const int table = table_of[static_cast<std::size_t>(u)];
            ++sizes[static_cast<std::size_t>(table)];
            table_of.push_back(table);
        } else {
            table_of.push_back(static_cast<int>(sizes.size()));
            sizes.push_back(1);
        }
    }
    return canonical_shape(std::move(sizes));
}

// log Ewens probability of one particular set partition with the given
// block sizes: theta^b prod (|B|-1)! / theta^(n).
inline double log_esf_set_partition(double theta, std::span<const int> block_sizes) {
    int n = 0;
    double acc = 0.0;
    for (int s : block_sizes) {
        n += s;
        acc += std::log(theta) + std::lgamma(static_cast<double>(s));
    }
    return acc - log_rising_factorial(theta, n);
}

// Ewens sampling formula collapsed to shapes:
// n! / prod_s (s^{m_s} m_s!) * theta^b / theta^(n).
inline PartitionDistribution esf_distribution(double theta, int n) {
    if (!(theta > 0.0)) throw std::invalid_argument("esf_distribution: theta must be positive");
    if (n < 1 || n > esf_max_n)
        throw std::invalid_argument("esf_distribution: n must lie in [1, " + std::to_string(esf_max_n) + "]");
    std::map<IntegerPartition, double> probs;
    double total = 0.0;
    for (auto& p : integer_partitions(n)) {
        const double lp = log_set_partitions_of_shape(p) + log_esf_set_partition(theta, p);
        const double v = std::exp(lp);
        probs[p] = v;
        total += v;
    }
    for (auto& [p, v] : probs) v /= total;
    return PartitionDistribution(n, std::move(probs));
}

// E <phi, Z^k> = sum over set partitions rho of {1..k} of
// P_ESF(rho) * prod_{B in rho} int_0^1 prod_{j in B} g_j(x) dx.
inline double dp_moment_partition_sum(double theta, const ProductTestFunction& phi) {
    if (!(theta > 0.0)) throw std::invalid_argument("dp_moment_partition_sum: theta must be positive");
    const int k = static_cast<int>(phi.k());
    if (phi.k() > partition_sum_max_k)
        throw std::invalid_argument("dp_moment_partition_sum: k exceeds " + std::to_string(partition_sum_max_k));
    const auto factors = phi.factors();
    double acc = 0.0;
    for_each_set_partition(k, [&](std::span<const int> labels, int blocks) {
        std::vector<PolyFactor> merged(static_cast<std::size_t>(blocks), PolyFactor::constant(1.0));
        std::vector<int> sizes(static_cast<std::size_t>(blocks), 0);
        for (int j = 0; j < k; ++j) {
            const auto b = static_cast<std::size_t>(labels[static_cast<std::size_t>(j)]);
            merged[b] = merged[b] * factors[static_cast<std::size_t>(j)];
            ++sizes[b];
        }
        double term = std::exp(log_esf_set_partition(theta, sizes));
        for (const auto& g : merged) term *= g.integrate_uniform();
        acc += term;
    });
    return acc;
}

}  // namespace incpd
