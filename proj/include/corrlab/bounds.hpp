#pragma once

#include <optional>
#include <string>
#include <utility>

#include "corrlab/correlation.hpp"
#include "corrlab/errors.hpp"
#include "corrlab/factorize.hpp"
#include "corrlab/reach.hpp"

namespace corrlab {

// Bounds on the minimal seed dimension at a given noise strength.  When
// reachable is false the correlation cannot be generated at this lambda and
// the numeric sides are meaningless (the cost is infinite).
struct CostBounds {
    double lambda = 0;
    bool reachable = true;
    double lower = 0;
    std::optional<double> upper;
    std::string lower_method;
    std::string upper_method;
};

struct CostLowerPoint {
    double value = 0;
    bool heuristic = true; // true unless the point is a certified infimum
};

// Seed-dimension bound from a feasibility certificate: psd_upper copies of
// the noiseless factorization, one block per weight cell.
int cost_upper_bound(const Correlation& p, double lambda,
                     const SimplexVector& s, const SimplexVector& t,
                     int psd_upper_of_phat);

// Point evaluation of the marginal-ratio lower bound at a certificate.  The
// true bound is the infimum over all feasible weights; pass
// infimum_certified = true only when the caller has established that.
CostLowerPoint cost_lower_bound_at(const Correlation& p, double lambda,
                                   const SimplexVector& s,
                                   const SimplexVector& t,
                                   bool infimum_certified = false);

// Closed-form cost bounds for the bordered polygon family at distance
// epsilon below its reachability boundary q.
CostBounds am_cost_bounds(int m, double k, double epsilon);

// The spike certificate behind am_cost_bounds: weights on m+1 outcomes that
// keep phat nonnegative at lambda = q - epsilon.
std::pair<SimplexVector, SimplexVector> am_boundary_certificate(int m,
                                                                double k,
                                                                double eps);

// Exact cost of the polygon slack family: 2 up to the boundary 1 - sqrt(k),
// unreachable beyond it.
CostBounds bm_cost(int m, double k, double lambda);

// Advantage ratio interval: classical bits over qubit bounds.  Qubit counts
// are clamped to at least one so the ratio stays finite.
struct AdvantageEstimate {
    double lambda = 0;
    bool reachable = true;
    int r_lower = 0; // bits, from the nonnegative-rank interval
    int r_upper = 0;
    int q_cost_lower = 0; // qubits, from the cost interval
    int q_cost_upper = 0;
    double s_lower = 0;
    double s_upper = 0;
};

AdvantageEstimate advantage_estimate(const Correlation& p, double lambda,
                                     const RankBounds& rank_plus_bounds,
                                     const CostBounds& cost_bounds);

} // namespace corrlab
