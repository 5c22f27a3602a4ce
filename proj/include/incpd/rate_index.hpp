#pragma once

// Dynamic cumulative-weight index (Fenwick tree) supporting point updates,
// prefix sums and proportional sampling in O(log n).

#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace incpd {

template <typename T>
    requires std::is_arithmetic_v<T>
class RateIndex {
public:
    RateIndex() = default;
    explicit RateIndex(std::size_t size) : values_(size, T{}), tree_(size + 1, T{}) {}
    explicit RateIndex(std::span<const T> values) : values_(values.begin(), values.end()) { rebuild(); }

    std::size_t size() const noexcept { return values_.size(); }
    T value(std::size_t i) const { return values_.at(i); }
    T total() const noexcept { return total_; }

    void add(std::size_t i, T delta) {
        if (i >= values_.size()) throw std::out_of_range("RateIndex::add");
        values_[i] += delta;
        total_ += delta;
        for (std::size_t p = i + 1; p < tree_.size(); p += p & (~p + 1)) tree_[p] += delta;
        if constexpr (std::is_floating_point_v<T>) {
            if (++updates_since_sync_ >= resync_interval) rebuild();
        }
    }

    void set(std::size_t i, T v) { add(i, v - value(i)); }

    // Sum of values[0..i).
    T prefix(std::size_t i) const {
        if (i > values_.size()) throw std::out_of_range("RateIndex::prefix");
        T acc{};
        for (std::size_t p = i; p > 0; p -= p & (~p + 1)) acc += tree_[p];
        return acc;
    }

    // Smallest i with prefix(i + 1) > u, for u in [0, total).
    std::size_t find(T u) const {
        std::size_t pos = 0;
        std::size_t step = 1;
        while (step * 2 < tree_.size()) step *= 2;
        for (; step > 0; step /= 2) {
            const std::size_t next = pos + step;
            if (next < tree_.size() && tree_[next] <= u) {
                pos = next;
                u -= tree_[next];
            }
        }
        if (pos >= values_.size()) pos = values_.size() - 1;
        if constexpr (std::is_floating_point_v<T>) {
            // Rounding can land on a zero-weight slot; step back to a live one.
            while (pos > 0 && values_[pos] <= T{}) --pos;
        }
        return pos;
    }

    // Recomputes every partial sum from the stored values.
    void rebuild() {
        tree_.assign(values_.size() + 1, T{});
        total_ = T{};
        for (std::size_t i = 0; i < values_.size(); ++i) {
            total_ += values_[i];
            for (std::size_t p = i + 1; p < tree_.size(); p += p & (~p + 1)) tree_[p] += values_[i];
        }
        updates_since_sync_ = 0;
    }

    // Largest relative gap between stored and recomputed totals.
    double drift() const {
        T fresh{};
        for (T v : values_) fresh += v;
        const double scale = std::max(1.0, std::abs(static_cast<double>(fresh)));
        double worst = std::abs(static_cast<double>(total_ - fresh)) / scale;
        T running{};
        for (std::size_t i = 0; i < values_.size(); ++i) {
            running += values_[i];
            worst = std::max(worst, std::abs(static_cast<double>(prefix(i + 1) - running)) / scale);
        }
        return worst;
    }

    static constexpr std::size_t resync_interval = 1u << 16;

private:
    std::vector<T> values_;
    std::vector<T> tree_;
    T total_{};
    std::size_t updates_since_sync_ = 0;
};

}  // namespace incpd
