#ifndef CORRLAB_REACH_HPP
#define CORRLAB_REACH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "corrlab/correlation.hpp"

namespace corrlab {

// Probability weights over {1..n}: nonnegative, summing to 1 within 1e-12.
// strict marks a vector with every entry > 0.
struct SimplexVector {
    Vector w;
    bool strict;

    static SimplexVector validate(const Vector& w);
};

// The residual that a noiseless seed has to produce so that, after local
// noise of strength lambda with leakage weights (s,t), the observed
// distribution is P:
//   phat(x,y) = P(x,y) - lambda s_x col(y) - lambda t_y row(x)
//               + lambda^2 s_x t_y.
// Row sums equal (1-lambda)(row(x) - lambda s_x); the total is (1-lambda)^2.
// P is reachable at lambda iff some (s,t) makes phat entrywise >= 0.
Matrix phat(const Correlation& p, double lambda, const SimplexVector& s,
            const SimplexVector& t);

// d phat / d lambda = 2 lambda s_x t_y - s_x col(y) - t_y row(x).
// At any entrywise-nonnegative phat this is <= 0, which is what makes the
// feasible lambda set an interval starting at 0.
Matrix phat_lambda_derivative(const Correlation& p, double lambda,
                              const SimplexVector& s, const SimplexVector& t);

struct SearchOptions {
    int max_iters = 80;        // alternation sweeps per start
    int random_restarts = 8;
    double strict_floor = 0.0; // lower bound imposed on every s,t entry
    double target_margin = 1e-9; // stop once a start reaches this margin
    std::uint64_t seed = 12345;
};

struct FeasibilityResult {
    bool feasible;  // margin >= -1e-10
    double margin;  // best min entry of phat found
    SimplexVector s;
    SimplexVector t;
    int iterations; // total alternation sweeps across starts
};

// Heuristic maximization of min phat over (s,t) by exact alternating
// ascent: for fixed t the inner problem is a linear program in s solved by
// bisection on the margin with per-coordinate interval bounds, and the
// margin-optimal s is picked by water-filling (which also balances the
// entries).  Starts: both marginals, uniform, single-coordinate spikes at
// three heights, plus seeded random points.  A negative answer is not a
// certificate of infeasibility; a nonnegative margin is a certificate of
// feasibility.
FeasibilityResult find_feasible_st(const Correlation& p, double lambda,
                                   const SearchOptions& opts = {});

// 1 - max over permutations phi of sum_x sqrt(max(0, row(x) col(phi(x)) -
// P(x, phi(x)))), computed with an O(n^3) assignment solver.  Every
// feasible lambda lies at or below this value.
double threshold_upper_bound(const Correlation& p);

enum class BoundaryKind { ClosedCertified, OpenCertified, Unresolved };

struct RegionEstimate {
    double lambda_lo;  // certified feasible
    double lambda_hi;  // first point the search could not certify
    double threshold;  // threshold_upper_bound(p)
    BoundaryKind boundary;
    FeasibilityResult witness; // certificate at lambda_lo
};

// Bisects the feasible-lambda interval [0, lambda_hi) to width lambda_tol.
// lambda_hi = threshold with ClosedCertified when the search certifies the
// threshold point itself; OpenCertified marks a boundary where zero-allowed
// weights stay feasible while floor-bounded weights fail by a clear gap.
RegionEstimate estimate_region(const Correlation& p, double lambda_tol = 1e-4,
                               const SearchOptions& opts = {});

enum class DecayKind { SuddenDeath, GradualDecay, Inconclusive };

struct ClassifyOptions {
    double region_tol = 1e-5;
    double closed_band = 1e-6;  // tolerated probe margin at the boundary
    double strict_gap = 2e-6;   // floor-bounded failure must clear this
    double strict_floor_scale = 0.25; // floor = scale / n
    SearchOptions search;
};

struct DecayClassification {
    DecayKind kind;
    double boundary;       // estimated sup of the feasible interval
    double closed_margin;  // probe with zeros allowed
    double strict_margin;  // probe with the entry floor
    std::vector<std::string> evidence;
};

// Distinguishes a feasible interval that contains its right endpoint (the
// generation cost stays bounded up to the boundary) from one that is right
// open (certificates degenerate and the cost lower bound diverges).  Returns
// Inconclusive for rank-1 or not strictly positive input, or when the probe
// margins land between the two tolerance bands.
DecayClassification classify_sudden_death(const Correlation& p,
                                          const ClassifyOptions& opts = {});

} // namespace corrlab

#endif
