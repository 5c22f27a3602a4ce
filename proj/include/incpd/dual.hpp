#pragma once

// Fleming-Viot dual chain on product-form functions.
//
// A state psi(x_1..x_m) = c * g_1(x_1) ... g_m(x_m) moves by
//   coalescence: each unordered pair (p, q) at rate 1, g_p and g_q are
//                replaced by their pointwise product;
//   mutation:    each coordinate p at rate theta/2, g_p is integrated
//                against U[0,1] and the result folded into c.
// The chain is absorbed at dimension 0, where its value is a constant whose
// expectation is E<phi, Z^k> for Z ~ DP(theta, U[0,1]).
//
// Everything the Stein solution f_h needs is a finite sum of terms
// c * prod_p <g_p, mu>, so f_h and its additive-direction derivatives are
// evaluated exactly through MeasurePolynomial.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "measures.hpp"

namespace incpd {

inline constexpr std::size_t dual_moment_max_k = 6;
inline constexpr std::size_t stein_solution_max_k = 4;
inline constexpr std::size_t max_derivative_order = 3;

struct DualFunctionState {
    double scalar = 1.0;
    std::vector<PolyFactor> groups;

    static DualFunctionState from(const ProductTestFunction& phi) {
        return {1.0, {phi.factors().begin(), phi.factors().end()}};
    }

    std::size_t dimension() const noexcept { return groups.size(); }

    double operator()(std::span<const double> xs) const {
        if (xs.size() != groups.size()) throw std::invalid_argument("DualFunctionState: arity mismatch");
        double acc = scalar;
        for (std::size_t p = 0; p < xs.size(); ++p) acc *= groups[p](xs[p]);
        return acc;
    }

    // <psi, mu^m>; the measure need not be a probability.
    double pair(const AtomicMeasure& mu) const noexcept {
        double acc = scalar;
        for (const auto& g : groups) acc *= mu.integrate(g);
        return acc;
    }
};

// Coordinates are 0-based: 0 <= i < j < dimension.
inline DualFunctionState coalesce(const DualFunctionState& s, std::size_t i, std::size_t j) {
    if (!(i < j && j < s.dimension()))
        throw std::out_of_range("coalesce: need 0 <= i < j < " + std::to_string(s.dimension()));
    DualFunctionState out{s.scalar, {}};
    out.groups.reserve(s.dimension() - 1);
    for (std::size_t p = 0; p < s.dimension(); ++p) {
        if (p == i)
            out.groups.push_back(s.groups[i] * s.groups[j]);
        else if (p != j)
            out.groups.push_back(s.groups[p]);
    }
    return out;
}

inline DualFunctionState mutate(const DualFunctionState& s, std::size_t i) {
    if (i >= s.dimension()) throw std::out_of_range("mutate: need 0 <= i < " + std::to_string(s.dimension()));
    DualFunctionState out{s.scalar * s.groups[i].integrate_uniform(), {}};
    out.groups.reserve(s.dimension() - 1);
    for (std::size_t p = 0; p < s.dimension(); ++p)
        if (p != i) out.groups.push_back(s.groups[p]);
    return out;
}

// Jump law of the chain at dimension m.
struct DualChainLaw {
    double theta;

    double total_rate(std::size_t m) const noexcept {
        const double md = static_cast<double>(m);
        return md * (md - 1.0 + theta) / 2.0;
    }
    // Embedded-chain probability of one particular pair.
    double pair_probability(std::size_t m) const noexcept {
        const double md = static_cast<double>(m);
        return 2.0 / (md * (md - 1.0 + theta));
    }
    // Embedded-chain probability of mutating one particular coordinate.
    double mutation_probability(std::size_t m) const noexcept {
        const double md = static_cast<double>(m);
        return theta / (md * (md - 1.0 + theta));
    }
};

// Expected time spent at dimension m: 2 / (m (m - 1 + theta)).
inline double mean_holding_time(std::size_t m, double theta) {
    if (m == 0) throw std::invalid_argument("mean_holding_time: dimension 0 is absorbing");
    if (!(theta > 0.0)) throw std::invalid_argument("mean_holding_time: theta must be positive");
    return 1.0 / DualChainLaw{theta}.total_rate(m);
}

namespace detail {

using GroupKey = std::vector<PolyFactor>;

inline GroupKey canonical(std::vector<PolyFactor> groups) {
    std::sort(groups.begin(), groups.end());
    return groups;
}

// Visits every one-step successor of `groups` as (probability, scale,
// successor groups), where scale multiplies the state's scalar.
template <typename Visitor>
void for_each_transition(const GroupKey& groups, const DualChainLaw& law, Visitor&& visit) {
    const std::size_t m = groups.size();
    const double pp = law.pair_probability(m);
    const double pm = law.mutation_probability(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            GroupKey next;
            next.reserve(m - 1);
            for (std::size_t p = 0; p < m; ++p) {
                if (p == i)
                    next.push_back(groups[i] * groups[j]);
                else if (p != j)
                    next.push_back(groups[p]);
            }
            visit(pp, 1.0, canonical(std::move(next)));
        }
    for (std::size_t i = 0; i < m; ++i) {
        GroupKey next;
        next.reserve(m - 1);
        for (std::size_t p = 0; p < m; ++p)
            if (p != i) next.push_back(groups[p]);
        visit(pm, groups[i].integrate_uniform(), canonical(std::move(next)));
    }
}

}  // namespace detail

// Absorbed-value expectations with a per-instance memo keyed by the sorted
// group list (the scalar factors out).
class DualMoments {
public:
    explicit DualMoments(double theta) : law_{theta} {
        if (!(theta > 0.0)) throw std::invalid_argument("DualMoments: theta must be positive");
    }

    double theta() const noexcept { return law_.theta; }

    double absorbed_mean(const DualFunctionState& s) {
        return s.scalar * absorbed_mean_of(detail::canonical(s.groups));
    }

    double absorbed_mean_of(const detail::GroupKey& groups) {
        if (groups.empty()) return 1.0;
        if (auto it = memo_.find(groups); it != memo_.end()) return it->second;
        double acc = 0.0;
        detail::for_each_transition(groups, law_, [&](double prob, double scale, const detail::GroupKey& next) {
            acc += prob * scale * absorbed_mean_of(next);
        });
        memo_.emplace(groups, acc);
        return acc;
    }

    std::size_t memo_size() const noexcept { return memo_.size(); }

private:
    DualChainLaw law_;
    std::map<detail::GroupKey, double> memo_;
};

// E <phi, Z^k>, Z ~ DP(theta, U[0,1]), as the absorbed value of the dual chain.
inline double dp_moment_dual(double theta, const ProductTestFunction& phi) {
    if (phi.k() > dual_moment_max_k)
        throw std::invalid_argument("dp_moment_dual: k exceeds " + std::to_string(dual_moment_max_k));
    DualMoments moments(theta);
    return moments.absorbed_mean(DualFunctionState::from(phi));
}

// F(mu) = constant + sum_t coeff_t * prod_p <g_{t,p}, mu>, with derivatives
// in the additive direction: d_x F(mu) = lim (F(mu + eps delta_x) - F(mu)) / eps.
class MeasurePolynomial {
public:
    struct Term {
        double coeff;
        std::vector<PolyFactor> groups;
    };

    MeasurePolynomial() = default;
    MeasurePolynomial(std::vector<Term> terms, double constant) : terms_(std::move(terms)), constant_(constant) {}

    static MeasurePolynomial of(const ProductTestFunction& phi) {
        return MeasurePolynomial({{1.0, {phi.factors().begin(), phi.factors().end()}}}, 0.0);
    }

    std::span<const Term> terms() const noexcept { return terms_; }
    double constant() const noexcept { return constant_; }

    double operator()(const AtomicMeasure& mu) const {
        double acc = constant_;
        for (const auto& t : terms_) {
            double v = t.coeff;
            for (const auto& g : t.groups) v *= mu.integrate(g);
            acc += v;
        }
        return acc;
    }

    // Mixed derivative d_{x_1} ... d_{x_r} F(mu), r = points.size() in 1..3.
    // Repeated points are allowed (d_{xx} adds mass twice at x).
    double derivative(const AtomicMeasure& mu, std::span<const double> points) const {
        check_order(points.size());
        double acc = 0.0;
        for (const auto& t : terms_) {
            if (t.groups.size() < points.size()) continue;
            const auto integrals = integrals_of(t, mu);
            acc += t.coeff * term_derivative(t, integrals, points);
        }
        return acc;
    }

    // int_0^1 d_x F(mu) dx, exact.
    double integrated_first_derivative(const AtomicMeasure& mu) const {
        double acc = 0.0;
        for (const auto& t : terms_) {
            const auto integrals = integrals_of(t, mu);
            for (std::size_t p = 0; p < t.groups.size(); ++p) {
                double v = t.coeff * t.groups[p].integrate_uniform();
                for (std::size_t q = 0; q < t.groups.size(); ++q)
                    if (q != p) v *= integrals[q];
                acc += v;
            }
        }
        return acc;
    }

    // Fleming-Viot generator with E = [0,1], pi = U[0,1]:
    //   mutation_scale * [int d_x F dx - sum_i w_i d_{x_i} F]
    // + sampling_scale * [sum_i w_i d_{x_i x_i} F - sum_{i,j} w_i w_j d_{x_i x_j} F].
    // The (theta/2, 1/2) normalization matches the dual rates above.
    double fleming_viot_generator(const AtomicMeasure& mu, double mutation_scale, double sampling_scale) const {
        const auto atoms = mu.atoms();
        double drift = integrated_first_derivative(mu);
        double diag = 0.0;
        double cross = 0.0;
        for (const auto& a : atoms) {
            const double x = a.location;
            drift -= a.weight * derivative(mu, std::span<const double>(&x, 1));
            const double xx[2] = {x, x};
            diag += a.weight * derivative(mu, xx);
            for (const auto& b : atoms) {
                const double xy[2] = {x, b.location};
                cross += a.weight * b.weight * derivative(mu, xy);
            }
        }
        return mutation_scale * drift + sampling_scale * (diag - cross);
    }

private:
    static void check_order(std::size_t r) {
        if (r < 1 || r > max_derivative_order)
            throw std::invalid_argument("derivative: need 1 to 3 points, got " + std::to_string(r));
    }

    static std::vector<double> integrals_of(const Term& t, const AtomicMeasure& mu) {
        std::vector<double> out;
        out.reserve(t.groups.size());
        for (const auto& g : t.groups) out.push_back(mu.integrate(g));
        return out;
    }

    // Sum over injective assignments of points to coordinates of
    // prod_j g_{p_j}(x_j) * prod_{unassigned q} <g_q, mu>.
    static double term_derivative(const Term& t, std::span<const double> integrals, std::span<const double> points) {
        const std::size_t m = t.groups.size();
        std::vector<bool> used(m, false);
        auto rec = [&](auto&& self, std::size_t j) -> double {
            if (j == points.size()) {
                double v = 1.0;
                for (std::size_t q = 0; q < m; ++q)
                    if (!used[q]) v *= integrals[q];
                return v;
            }
            double acc = 0.0;
            for (std::size_t p = 0; p < m; ++p) {
                if (used[p]) continue;
                const double gp = t.groups[p](points[j]);
                if (gp == 0.0) continue;
                used[p] = true;
                acc += gp * self(self, j + 1);
                used[p] = false;
            }
            return acc;
        };
        return rec(rec, 0);
    }

    std::vector<Term> terms_;
    double constant_ = 0.0;
};

// Solution of the Stein equation A f_h = h - E h(Z) for h = <phi, mu^k>:
//
//   f_h(mu) = - sum over visited dual states psi of
//             P(visit psi) * mean_holding_time(dim psi) * (<psi, mu^dim> - E_abs(psi)),
//
// where E_abs(psi) is the expected absorbed value started from psi. States
// reached along different histories are merged by their sorted group list.
class SteinSolution {
public:
    SteinSolution(double theta, const ProductTestFunction& phi) : theta_(theta), phi_(phi), moments_(theta) {
        if (phi.k() > stein_solution_max_k)
            throw std::invalid_argument("SteinSolution: k exceeds " + std::to_string(stein_solution_max_k));
        build();
    }

    double theta() const noexcept { return theta_; }
    const ProductTestFunction& test_function() const noexcept { return phi_; }
    const MeasurePolynomial& polynomial() const noexcept { return fh_; }
    double dp_moment() const noexcept { return dp_moment_; }

    double operator()(const AtomicMeasure& mu) const { return fh_(mu); }

    double derivative(const AtomicMeasure& mu, std::span<const double> points) const {
        return fh_.derivative(mu, points);
    }

    // A_2 f_h(mu) with the (theta/2, 1/2) generator.
    double generator(const AtomicMeasure& mu) const { return fh_.fleming_viot_generator(mu, theta_ / 2.0, 0.5); }

    // A_2 f_h(mu) - (h(mu) - E h(Z)).
    double residual(const AtomicMeasure& mu) const {
        return generator(mu) - (eval_moment(phi_, mu, false) - dp_moment_);
    }

    // Same residual with both halving factors dropped, i.e. generator
    // (theta, 1). Equals h(mu) - E h(Z) when the halved residual vanishes.
    double residual_unhalved(const AtomicMeasure& mu) const {
        return fh_.fleming_viot_generator(mu, theta_, 1.0) - (eval_moment(phi_, mu, false) - dp_moment_);
    }

    // Number of merged (state, dimension) terms in f_h.
    std::size_t term_count() const noexcept { return fh_.terms().size(); }

private:
    void build() {
        const DualChainLaw law{theta_};
        std::map<detail::GroupKey, double> level;
        level[detail::canonical({phi_.factors().begin(), phi_.factors().end()})] = 1.0;
        std::vector<MeasurePolynomial::Term> terms;
        double constant = 0.0;
        for (std::size_t m = phi_.k(); m >= 1; --m) {
            std::map<detail::GroupKey, double> next_level;
            const double hold = mean_holding_time(m, theta_);
            for (const auto& [groups, weight] : level) {
                const double coeff = -weight * hold;
                terms.push_back({coeff, groups});
                constant -= coeff * moments_.absorbed_mean_of(groups);
                if (m == 1) continue;
                detail::for_each_transition(groups, law, [&](double prob, double scale, const detail::GroupKey& next) {
                    next_level[next] += weight * prob * scale;
                });
            }
            level = std::move(next_level);
        }
        fh_ = MeasurePolynomial(std::move(terms), constant);
        dp_moment_ = moments_.absorbed_mean(DualFunctionState::from(phi_));
    }

    double theta_;
    ProductTestFunction phi_;
    DualMoments moments_;
    MeasurePolynomial fh_;
    double dp_moment_ = 0.0;
};

inline double eval_fh(double theta, const ProductTestFunction& phi, const AtomicMeasure& mu) {
    return SteinSolution(theta, phi)(mu);
}

inline double fh_derivative(double theta, const ProductTestFunction& phi, const AtomicMeasure& mu,
                            std::span<const double> points) {
    return SteinSolution(theta, phi).derivative(mu, points);
}

inline double stein_residual(double theta, const ProductTestFunction& phi, const AtomicMeasure& mu) {
    if (phi.k() > 3) throw std::invalid_argument("stein_residual: k exceeds 3");
    if (!mu.is_probability()) throw std::invalid_argument("stein_residual: measure is not a probability measure");
    return SteinSolution(theta, phi).residual(mu);
}

}  // namespace incpd
