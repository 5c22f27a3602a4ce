#pragma once

// Independent checks on the inclusion process stationary law: the enumerated
// generator matrix and its normalized null vector, and detailed balance.

#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "inclusion.hpp"

namespace incpd {

struct GeneratorMatrix {
    std::vector<ParticleConfiguration> states;
    Eigen::MatrixXd Q;  // Q(a, b) = rate a -> b, rows sum to zero
};

inline GeneratorMatrix generator_matrix(const InclusionModel& m, double cap = 2000) {
    GeneratorMatrix g;
    g.states = compositions(m.N, m.L, cap);
    std::map<ParticleConfiguration, Eigen::Index> index;
    for (std::size_t a = 0; a < g.states.size(); ++a) index[g.states[a]] = static_cast<Eigen::Index>(a);
    const auto n = static_cast<Eigen::Index>(g.states.size());
    g.Q = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        const auto& c = g.states[static_cast<std::size_t>(a)];
        for (std::size_t i = 0; i < c.sites(); ++i)
            for (std::size_t j = 0; j < c.sites(); ++j) {
                const double r = jump_rate(m, c, i, j);
                if (r == 0.0) continue;
                auto next = c;
                next.move(i, j);
                g.Q(a, index.at(next)) += r;
                g.Q(a, a) -= r;
            }
    }
    return g;
}

// Solves pi Q = 0, sum pi = 1 by replacing one balance equation with the
// normalization.
inline Eigen::VectorXd null_vector(const Eigen::MatrixXd& Q) {
    const auto n = Q.rows();
    Eigen::MatrixXd A = Q.transpose();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    A.row(n - 1).setOnes();
    b(n - 1) = 1.0;
    return A.fullPivLu().solve(b);
}

// Largest relative violation of pi(a) q(a,b) = pi(b) q(b,a) over all moves,
// with pi given by exp(log_weight). Works on unnormalized weights.
template <typename LogWeight>
double detailed_balance_violation(const InclusionModel& m, LogWeight&& log_weight, double cap = 1e6) {
    double worst = 0.0;
    for (const auto& c : compositions(m.N, m.L, cap)) {
        const double wc = log_weight(c);
        for (std::size_t i = 0; i < c.sites(); ++i)
            for (std::size_t j = 0; j < c.sites(); ++j) {
                if (i == j || c[i] == 0) continue;
                auto next = c;
                next.move(i, j);
                const double fwd = std::exp(wc) * jump_rate(m, c, i, j);
                const double bwd = std::exp(log_weight(next)) * jump_rate(m, next, j, i);
                worst = std::max(worst, std::abs(fwd - bwd) / std::max(std::abs(fwd), std::abs(bwd)));
            }
    }
    return worst;
}

inline double detailed_balance_violation(const InclusionModel& m) {
    return detailed_balance_violation(m, [&](const ParticleConfiguration& c) { return stationary_log_weight(m, c); });
}

}  // namespace incpd
