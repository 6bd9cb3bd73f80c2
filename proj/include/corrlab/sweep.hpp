#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corrlab/bounds.hpp"
#include "corrlab/correlation.hpp"
#include "corrlab/reach.hpp"

namespace corrlab {

// Family tag so sweeps can use closed-form cost bounds where they exist
// instead of the generic certificate bounds.
enum class FamilyKind { Generic, Bm, Am };

struct SweepConfig {
    std::vector<double> lambdas; // ascending, in [0,1)
    FamilyKind family = FamilyKind::Generic;
    int family_m = 0;      // set when family is Bm or Am
    double family_k = 0;
    SearchOptions search;  // search.seed feeds the per-row seeds
};

struct SweepRow {
    double lambda = 0;
    bool feasible = false;
    bool unresolved = false; // infeasible but below the threshold bound
    double margin = 0;
    double threshold = 0;
    CostBounds cost;
    AdvantageEstimate advantage;
    FeasibilityResult certificate;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    RankBounds rank_plus;
    bool any_unresolved = false;
};

// One row per lambda, deterministic for a fixed config (row seeds are
// derived from search.seed and the row index, so thread count does not
// change the output).  CORRLAB_THREADS caps the worker count.
SweepResult run_sweep(const Correlation& p, const SweepConfig& config);

// columns: lambda, feasible, margin, threshold_bound, cost_lower,
// cost_upper, advantage_lower, advantage_upper
std::string sweep_csv(const SweepResult& result);

} // namespace corrlab
