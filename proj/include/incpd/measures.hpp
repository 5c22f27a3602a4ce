#pragma once

// Atomic measures on [0,1], polynomial factors and product-form moment test
// functions h(mu) = <phi, mu^k> with phi(x_1..x_k) = g_1(x_1) * ... * g_k(x_k).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace incpd {

// Degree cap for user-supplied factors. Products formed internally by the
// dual chain are allowed to exceed it.
inline constexpr std::size_t max_factor_degree = 16;

// Grid resolution used by sup_norm_bound.
inline constexpr std::size_t sup_norm_grid_points = 10000;

// Polynomial in the power basis, constant term first.
class PolyFactor {
public:
    PolyFactor() : coeffs_{0.0} {}
    explicit PolyFactor(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) coeffs_.push_back(0.0);
        for (double c : coeffs_)
            if (!std::isfinite(c)) throw std::invalid_argument("PolyFactor: non-finite coefficient");
        trim();
    }

    static PolyFactor constant(double c) { return PolyFactor({c}); }
    static PolyFactor monomial(std::size_t degree, double c = 1.0) {
        std::vector<double> v(degree + 1, 0.0);
        v[degree] = c;
        return PolyFactor(std::move(v));
    }

    const std::vector<double>& coefficients() const noexcept { return coeffs_; }
    std::size_t degree() const noexcept { return coeffs_.size() - 1; }
    bool is_zero() const noexcept { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }

    double operator()(double x) const noexcept {
        double acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    // Integral against the uniform law on [0,1].
    double integrate_uniform() const noexcept {
        double acc = 0.0;
        for (std::size_t a = 0; a < coeffs_.size(); ++a) acc += coeffs_[a] / static_cast<double>(a + 1);
        return acc;
    }

    PolyFactor derivative() const {
        if (coeffs_.size() == 1) return PolyFactor{};
        std::vector<double> d(coeffs_.size() - 1);
        for (std::size_t a = 1; a < coeffs_.size(); ++a) d[a - 1] = coeffs_[a] * static_cast<double>(a);
        return PolyFactor(std::move(d));
    }

    friend PolyFactor operator*(const PolyFactor& a, const PolyFactor& b) {
        std::vector<double> out(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
        return PolyFactor(std::move(out));
    }

    friend PolyFactor operator*(double s, const PolyFactor& a) {
        std::vector<double> out = a.coeffs_;
        for (double& c : out) c *= s;
        return PolyFactor(std::move(out));
    }

    friend bool operator==(const PolyFactor&, const PolyFactor&) = default;
    friend auto operator<=>(const PolyFactor& a, const PolyFactor& b) {
        return a.coeffs_ <=> b.coeffs_;
    }

private:
    void trim() {
        while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
    }

    std::vector<double> coeffs_;
};

// Upper bound for sup over [0,1] of |g|: grid maximum plus half a grid
// spacing times a bound on |g'|. Exact for a single monomial term.
inline double sup_norm_bound(const PolyFactor& g) {
    const auto& c = g.coefficients();
    const auto nonzero = std::count_if(c.begin(), c.end(), [](double v) { return v != 0.0; });
    if (nonzero == 0) return 0.0;
    if (nonzero == 1) {
        for (double v : c)
            if (v != 0.0) return std::abs(v);
    }
    double slope = 0.0;
    for (std::size_t a = 1; a < c.size(); ++a) slope += static_cast<double>(a) * std::abs(c[a]);
    const double h = 1.0 / static_cast<double>(sup_norm_grid_points - 1);
    double best = 0.0;
    for (std::size_t i = 0; i < sup_norm_grid_points; ++i)
        best = std::max(best, std::abs(g(static_cast<double>(i) * h)));
    return best + 0.5 * h * slope;
}

struct Atom {
    double location;
    double weight;
    friend bool operator==(const Atom&, const Atom&) = default;
};

// Finitely supported measure on [0,1]. Weights may be signed unless the
// measure is constructed as a probability measure.
class AtomicMeasure {
public:
    static constexpr double probability_tolerance = 1e-12;

    AtomicMeasure() = default;
    explicit AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) { validate_support(); }

    static AtomicMeasure probability(std::vector<Atom> atoms) {
        AtomicMeasure m(std::move(atoms));
        double total = 0.0;
        for (const auto& a : m.atoms_) {
            if (a.weight < 0.0) throw std::invalid_argument("AtomicMeasure: negative weight in probability measure");
            total += a.weight;
        }
        if (std::abs(total - 1.0) > probability_tolerance)
            throw std::invalid_argument("AtomicMeasure: weights sum to " + std::to_string(total) + ", not 1");
        m.probability_ = true;
        return m;
    }

    static AtomicMeasure point_mass(double x) { return probability({{x, 1.0}}); }

    std::span<const Atom> atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    bool is_probability() const noexcept { return probability_; }

    double mass() const noexcept {
        double total = 0.0;
        for (const auto& a : atoms_) total += a.weight;
        return total;
    }

    // <g, mu>
    double integrate(const PolyFactor& g) const noexcept {
        // Unit mass is exact by construction; summing weights would not be.
        if (probability_ && g.degree() == 0) return g.coefficients()[0];
        double acc = 0.0;
        for (const auto& a : atoms_) acc += g(a.location) * a.weight;
        return acc;
    }

    // mu + eps * delta_x, merging into an existing atom when x is already
    // in the support. The result is never flagged probability.
    AtomicMeasure perturbed(double x, double eps) const {
        std::vector<Atom> out = atoms_;
        auto it = std::find_if(out.begin(), out.end(), [x](const Atom& a) { return a.location == x; });
        if (it != out.end())
            it->weight += eps;
        else
            out.push_back({x, eps});
        return AtomicMeasure(std::move(out));
    }

private:
    void validate_support() const {
        for (const auto& a : atoms_) {
            if (!(a.location >= 0.0 && a.location <= 1.0))
                throw std::invalid_argument("AtomicMeasure: location outside [0,1]");
            if (!std::isfinite(a.weight)) throw std::invalid_argument("AtomicMeasure: non-finite weight");
        }
        std::vector<double> locs;
        locs.reserve(atoms_.size());
        for (const auto& a : atoms_) locs.push_back(a.location);
        std::sort(locs.begin(), locs.end());
        if (std::adjacent_find(locs.begin(), locs.end()) != locs.end())
            throw std::invalid_argument("AtomicMeasure: duplicate location");
    }

    std::vector<Atom> atoms_;
    bool probability_ = false;
};

// h(mu) = <g_1 x ... x g_k, mu^k>.
class ProductTestFunction {
public:
    explicit ProductTestFunction(std::vector<PolyFactor> factors) : factors_(std::move(factors)) {
        if (factors_.empty()) throw std::invalid_argument("ProductTestFunction: k must be positive");
        sup_norm_ = 1.0;
        for (const auto& g : factors_) {
            if (g.degree() > max_factor_degree)
                throw std::invalid_argument("ProductTestFunction: factor degree exceeds " +
                                            std::to_string(max_factor_degree));
            sup_norm_ *= sup_norm_bound(g);
        }
    }

    // phi = x^{d_1} (x) ... (x) x^{d_k}
    static ProductTestFunction monomials(std::span<const std::size_t> degrees) {
        std::vector<PolyFactor> f;
        for (auto d : degrees) f.push_back(PolyFactor::monomial(d));
        return ProductTestFunction(std::move(f));
    }

    static ProductTestFunction constant_one(std::size_t k) {
        return ProductTestFunction(std::vector<PolyFactor>(k, PolyFactor::constant(1.0)));
    }

    std::size_t k() const noexcept { return factors_.size(); }
    std::span<const PolyFactor> factors() const noexcept { return factors_; }

    // Product of the factor sup-norm bounds; an upper bound for ||phi||_inf.
    double sup_norm() const noexcept { return sup_norm_; }

    double operator()(std::span<const double> xs) const {
        if (xs.size() != factors_.size()) throw std::invalid_argument("ProductTestFunction: arity mismatch");
        double acc = 1.0;
        for (std::size_t j = 0; j < xs.size(); ++j) acc *= factors_[j](xs[j]);
        return acc;
    }

    friend bool operator==(const ProductTestFunction& a, const ProductTestFunction& b) {
        return a.factors_ == b.factors_;
    }

private:
    std::vector<PolyFactor> factors_;
    double sup_norm_ = 1.0;
};

// <phi, mu^k> = prod_j <g_j, mu>. With `strict`, mu must be a probability
// measure.
inline double eval_moment(const ProductTestFunction& phi, const AtomicMeasure& mu, bool strict = true) {
    if (strict && !mu.is_probability())
        throw std::invalid_argument("eval_moment: measure is not a probability measure");
    double acc = 1.0;
    for (const auto& g : phi.factors()) acc *= mu.integrate(g);
    return acc;
}

inline double integrate_uniform(const PolyFactor& g) noexcept { return g.integrate_uniform(); }

// JSON: {"k": 2, "factors": [[0,1],[0,1]]}
inline void to_json(nlohmann::json& j, const PolyFactor& g) { j = g.coefficients(); }
inline void from_json(const nlohmann::json& j, PolyFactor& g) { g = PolyFactor(j.get<std::vector<double>>()); }

inline nlohmann::json to_json(const ProductTestFunction& phi) {
    nlohmann::json factors = nlohmann::json::array();
    for (const auto& g : phi.factors()) factors.push_back(g.coefficients());
    return {{"k", phi.k()}, {"factors", factors}};
}

inline ProductTestFunction test_function_from_json(const nlohmann::json& j) {
    auto factors = j.at("factors").get<std::vector<PolyFactor>>();
    if (j.contains("k") && j.at("k").get<std::size_t>() != factors.size())
        throw std::invalid_argument("test function: k does not match number of factors");
    return ProductTestFunction(std::move(factors));
}

}  // namespace incpd
