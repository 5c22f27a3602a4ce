#pragma once

// Closed-form error bounds for the Poisson-Dirichlet approximation of the
// inclusion process, and the Stein factors they are built from.

#include <stdexcept>

#include "json.hpp"

namespace incpd {

// The three additive contributions of the bound:
//   riemann  ~ 1/L  (lattice sum versus integral of d_x f_h),
//   mutation ~ 1/N  (second-order Taylor remainder of the mutation part),
//   third    ~ 1/N  (third-order remainder of the sampling part).
struct BoundBreakdown {
    double term_riemann = 0.0;
    double term_mutation = 0.0;
    double term_third = 0.0;
    double total = 0.0;

    long N = 0;
    long L = 0;
    double theta = 0.0;
    int order = 0;  // k for moment bounds, n for partition bounds
    double sup_norm = 1.0;

    friend bool operator==(const BoundBreakdown&, const BoundBreakdown&) = default;
};

namespace detail {
inline BoundBreakdown make_bound(long N, long L, double theta, int order, double s) {
    if (N < 1 || L < 1) throw std::invalid_argument("bound: N and L must be positive");
    if (!(theta > 0.0)) throw std::invalid_argument("bound: theta must be positive");
    if (order < 1) throw std::invalid_argument("bound: order must be positive");
    if (!(s >= 0.0)) throw std::invalid_argument("bound: sup norm must be non-negative");
    const double k = order;
    const double n = static_cast<double>(N);
    const double l = static_cast<double>(L);
    BoundBreakdown b;
    b.term_riemann = k * (k - 1.0) / (2.0 * l * (theta + 1.0)) * s;
    b.term_mutation = 2.0 * k * (k - 1.0) * theta / (n * (theta + 1.0)) * s;
    b.term_third = 8.0 * k * (k - 1.0) * (k - 2.0) / (9.0 * n * (theta + 2.0)) * s;
    b.total = b.term_riemann + b.term_mutation + b.term_third;
    b.N = N;
    b.L = L;
    b.theta = theta;
    b.order = order;
    b.sup_norm = s;
    return b;
}
}  // namespace detail

// Bound on |E<phi, W^k> - E<phi, Z^k>| for the stationary inclusion process W.
inline BoundBreakdown theorem1_bound(long N, long L, double theta, int k, double sup_norm) {
    return detail::make_bound(N, L, theta, k, sup_norm);
}

// Bound on the total variation distance between the sampling partitions of
// n draws from W and from Z.
inline BoundBreakdown corollary_bound(long N, long L, double theta, int n) {
    return detail::make_bound(N, L, theta, n, 1.0);
}

struct SteinFactors {
    double first;
    double second;
    double third;
};

// Bounds on sup |d_x f_h|, sup |d_xy f_h|, sup |d_xyz f_h|.
inline SteinFactors stein_factors(double theta, int k, double sup_norm) {
    if (!(theta > 0.0)) throw std::invalid_argument("stein_factors: theta must be positive");
    if (k < 1) throw std::invalid_argument("stein_factors: k must be positive");
    const double kk = k;
    return {2.0 * kk / theta * sup_norm, kk * (kk - 1.0) / (theta + 1.0) * sup_norm,
            2.0 * kk * (kk - 1.0) * (kk - 2.0) / (3.0 * (theta + 2.0)) * sup_norm};
}

inline void to_json(nlohmann::json& j, const BoundBreakdown& b) {
    j = {{"term_riemann", b.term_riemann}, {"term_mutation", b.term_mutation}, {"term_third", b.term_third},
         {"total", b.total}, {"N", b.N}, {"L", b.L}, {"theta", b.theta}, {"order", b.order},
         {"sup_norm", b.sup_norm}};
}

inline void from_json(const nlohmann::json& j, BoundBreakdown& b) {
    b.term_riemann = j.at("term_riemann").get<double>();
    b.term_mutation = j.at("term_mutation").get<double>();
    b.term_third = j.at("term_third").get<double>();
    b.total = j.at("total").get<double>();
    b.N = j.at("N").get<long>();
    b.L = j.at("L").get<long>();
    b.theta = j.at("theta").get<double>();
    b.order = j.at("order").get<int>();
    b.sup_norm = j.at("sup_norm").get<double>();
}

}  // namespace incpd
