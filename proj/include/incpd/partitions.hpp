#pragma once

// Integer and set partition enumeration, and probability distributions over
// partition shapes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace incpd {

// Block sizes in non-increasing order.
using IntegerPartition = std::vector<int>;

inline int partition_size(const IntegerPartition& p) { return std::accumulate(p.begin(), p.end(), 0); }

inline bool is_valid_partition(const IntegerPartition& p, int n) {
    if (p.empty()) return n == 0;
    if (!std::is_sorted(p.begin(), p.end(), std::greater<>{})) return false;
    if (p.back() < 1) return false;
    return partition_size(p) == n;
}

// Sorts arbitrary block sizes into canonical order.
inline IntegerPartition canonical_shape(std::vector<int> sizes) {
    std::erase(sizes, 0);
    std::sort(sizes.begin(), sizes.end(), std::greater<>{});
    return sizes;
}

inline std::string shape_key(const IntegerPartition& p) {
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += '+';
        out += std::to_string(p[i]);
    }
    return out;
}

inline IntegerPartition parse_shape_key(const std::string& key) {
    IntegerPartition p;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, '+')) {
        std::size_t used = 0;
        const int v = std::stoi(part, &used);
        if (used != part.size()) throw std::invalid_argument("bad partition key: " + key);
        p.push_back(v);
    }
    if (!is_valid_partition(p, partition_size(p))) throw std::invalid_argument("bad partition key: " + key);
    return p;
}

// All partitions of n in reverse lexicographic order, starting at (n).
inline std::vector<IntegerPartition> integer_partitions(int n) {
    if (n < 0) throw std::invalid_argument("integer_partitions: negative n");
    std::vector<IntegerPartition> out;
    if (n == 0) {
        out.emplace_back();
        return out;
    }
    IntegerPartition cur;
    std::function<void(int, int)> rec = [&](int remaining, int max_part) {
        if (remaining == 0) {
            out.push_back(cur);
            return;
        }
        for (int s = std::min(remaining, max_part); s >= 1; --s) {
            cur.push_back(s);
            rec(remaining - s, s);
            cur.pop_back();
        }
    };
    rec(n, n);
    return out;
}

// Visits every set partition of {0..n-1} as a restricted growth string:
// labels[i] is the block of element i, blocks numbered in order of first
// appearance. The second argument is the number of blocks.
template <typename Visitor>
void for_each_set_partition(int n, Visitor&& visit) {
    if (n < 0) throw std::invalid_argument("for_each_set_partition: negative n");
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    if (n == 0) {
        visit(std::span<const int>(labels), 0);
        return;
    }
    std::function<void(int, int)> rec = [&](int i, int blocks) {
        if (i == n) {
            visit(std::span<const int>(labels), blocks);
            return;
        }
        for (int b = 0; b <= blocks; ++b) {
            labels[static_cast<std::size_t>(i)] = b;
            rec(i + 1, std::max(blocks, b + 1));
        }
    };
    labels[0] = 0;
    rec(1, 1);
}

inline IntegerPartition shape_of(std::span<const int> labels, int blocks) {
    std::vector<int> sizes(static_cast<std::size_t>(blocks), 0);
    for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
    return canonical_shape(std::move(sizes));
}

// log of the number of set partitions of {1..n} with the given shape:
// n! / prod_s (s!^{m_s} m_s!).
inline double log_set_partitions_of_shape(const IntegerPartition& p) {
    const int n = partition_size(p);
    double acc = std::lgamma(n + 1.0);
    std::map<int, int> mult;
    for (int s : p) {
        acc -= std::lgamma(s + 1.0);
        ++mult[s];
    }
    for (auto [s, m] : mult) acc -= std::lgamma(m + 1.0);
    return acc;
}

inline double set_partitions_of_shape(const IntegerPartition& p) {
    return std::round(std::exp(log_set_partitions_of_shape(p)));
}

// Probability distribution over the shapes of partitions of n.
class PartitionDistribution {
public:
    static constexpr double sum_tolerance = 1e-12;

    PartitionDistribution() = default;
    PartitionDistribution(int n, std::map<IntegerPartition, double> probs) : n_(n), probs_(std::move(probs)) {
        validate();
    }

    int n() const noexcept { return n_; }
    const std::map<IntegerPartition, double>& probabilities() const noexcept { return probs_; }

    double operator[](const IntegerPartition& p) const {
        auto it = probs_.find(p);
        return it == probs_.end() ? 0.0 : it->second;
    }

    double total() const noexcept {
        double t = 0.0;
        for (const auto& [p, v] : probs_) t += v;
        return t;
    }

    friend bool operator==(const PartitionDistribution&, const PartitionDistribution&) = default;

private:
    void validate() const {
        double t = 0.0;
        for (const auto& [p, v] : probs_) {
            if (!is_valid_partition(p, n_))
                throw std::invalid_argument("PartitionDistribution: invalid partition " + shape_key(p));
            if (!(v >= 0.0)) throw std::invalid_argument("PartitionDistribution: negative probability");
            t += v;
        }
        if (std::abs(t - 1.0) > sum_tolerance)
            throw std::invalid_argument("PartitionDistribution: probabilities sum to " + std::to_string(t));
    }

    int n_ = 0;
    std::map<IntegerPartition, double> probs_;
};

inline double tv_distance(const PartitionDistribution& p, const PartitionDistribution& q) {
    if (p.n() != q.n()) throw std::invalid_argument("tv_distance: distributions over different n");
    double acc = 0.0;
    for (const auto& [shape, v] : p.probabilities()) acc += std::abs(v - q[shape]);
    for (const auto& [shape, v] : q.probabilities())
        if (!p.probabilities().contains(shape)) acc += std::abs(v);
    return 0.5 * acc;
}

// {"n": 3, "probs": {"3": 0.333, "2+1": 0.5, "1+1+1": 0.1667}}
inline nlohmann::json to_json(const PartitionDistribution& d) {
    nlohmann::json probs = nlohmann::json::object();
    for (const auto& [p, v] : d.probabilities()) probs[shape_key(p)] = v;
    return {{"n", d.n()}, {"probs", probs}};
}

inline PartitionDistribution partition_distribution_from_json(const nlohmann::json& j) {
    std::map<IntegerPartition, double> probs;
    for (const auto& [key, v] : j.at("probs").items()) probs[parse_shape_key(key)] = v.get<double>();
    return PartitionDistribution(j.at("n").get<int>(), std::move(probs));
}

}  // namespace incpd
