#include "corrlab/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "corrlab/factorize.hpp"
#include "corrlab/families.hpp"
#include "corrlab/serialize.hpp"

namespace corrlab {

namespace {

int numerical_rank(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const Vector sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0)
        return 0;
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-10 * sv(0))
            ++r;
    return r;
}

RankBounds sweep_rank_bounds(const Correlation& p, const SweepConfig& cfg) {
    RankBounds out;
    out.lower = std::max(1, numerical_rank(p.entries()));
    out.lower_method = "linear rank";
    out.upper = p.size();
    out.upper_method = "matrix size";
    if (cfg.family == FamilyKind::Bm) {
        const int geom = bm_nonneg_rank_lower(cfg.family_m, cfg.family_k);
        if (geom > out.lower) {
            out.lower = geom;
            out.lower_method = "nested polygon";
        }
    }
    return out;
}

CostBounds generic_cost(const Correlation& p, double lambda,
                        const FeasibilityResult& cert) {
    CostBounds out;
    out.lambda = lambda;
    out.reachable = true;
    try {
        out.lower = cost_lower_bound_at(p, lambda, cert.s, cert.t).value;
        out.lower_method = "certificate point";
    } catch (const Error&) {
        out.lower = 1;
        out.lower_method = "trivial";
    }
    try {
        out.upper = cost_upper_bound(p, lambda, cert.s, cert.t, p.size());
        out.upper_method = "certificate";
    } catch (const Error&) {
        out.upper.reset(); // zero weights give no dimension bound
        out.upper_method = "none";
    }
    return out;
}

int worker_count(size_t rows) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0)
        n = 4;
    if (const char* cap = std::getenv("CORRLAB_THREADS")) {
        const long v = std::strtol(cap, nullptr, 10);
        if (v >= 1 && v < 256)
            n = static_cast<unsigned>(v);
    }
    return static_cast<int>(std::min<size_t>(n, rows ? rows : 1));
}

} // namespace

SweepResult run_sweep(const Correlation& p, const SweepConfig& config) {
    for (size_t i = 0; i < config.lambdas.size(); ++i) {
        const double lam = config.lambdas[i];
        if (lam < 0 || lam >= 1)
            throw BadParameter("sweep grid must lie in [0,1)");
        if (i > 0 && lam < config.lambdas[i - 1])
            throw BadParameter("sweep grid must be sorted ascending");
    }
    if ((config.family == FamilyKind::Bm || config.family == FamilyKind::Am) &&
        config.family_m < 3)
        throw BadParameter("family sweeps need the polygon size");

    SweepResult result;
    result.rank_plus = sweep_rank_bounds(p, config);
    result.rows.resize(config.lambdas.size());
    const double threshold = threshold_upper_bound(p);
    const double q =
        config.family == FamilyKind::Am ? am_mixing(config.family_k) : 0;

    auto fill_row = [&](size_t i) {
        SweepRow& row = result.rows[i];
        row.lambda = config.lambdas[i];
        row.threshold = threshold;
        SearchOptions opts = config.search;
        opts.seed = config.search.seed + 1000003ULL * i;
        row.certificate = find_feasible_st(p, row.lambda, opts);
        if (!row.certificate.feasible) {
            // closed-form certificates rescue boundary-adjacent rows
            if (config.family == FamilyKind::Am && row.lambda > 0 &&
                q - row.lambda > 0 && q - row.lambda < q) {
                const auto st = am_boundary_certificate(config.family_m,
                                                        config.family_k,
                                                        q - row.lambda);
                const double m =
                    phat(p, row.lambda, st.first, st.second).minCoeff();
                if (m >= -1e-12) {
                    row.certificate.feasible = true;
                    row.certificate.margin = m;
                    row.certificate.s = st.first;
                    row.certificate.t = st.second;
                }
            } else if (config.family == FamilyKind::Bm) {
                const Vector u = Vector::Constant(p.size(), 1.0 / p.size());
                const SimplexVector sv = SimplexVector::validate(u);
                const double m = phat(p, row.lambda, sv, sv).minCoeff();
                if (m >= -1e-10) {
                    row.certificate.feasible = true;
                    row.certificate.margin = m;
                    row.certificate.s = sv;
                    row.certificate.t = sv;
                }
            }
        }
        row.feasible = row.certificate.feasible;
        row.margin = row.certificate.margin;

        if (row.feasible) {
            if (config.family == FamilyKind::Bm) {
                row.cost = bm_cost(config.family_m, config.family_k,
                                   std::min(row.lambda,
                                            1 - std::sqrt(config.family_k)));
                row.cost.lambda = row.lambda;
            } else if (config.family == FamilyKind::Am && row.lambda > 0 &&
                       q - row.lambda > 0 && q - row.lambda < q) {
                row.cost = am_cost_bounds(config.family_m, config.family_k,
                                          q - row.lambda);
                row.cost.lambda = row.lambda;
            } else {
                row.cost = generic_cost(p, row.lambda, row.certificate);
            }
            row.advantage = advantage_estimate(p, row.lambda,
                                               result.rank_plus, row.cost);
        } else if (row.lambda >= threshold - 1e-9) {
            row.cost.lambda = row.lambda;
            row.cost.reachable = false;
            row.cost.lower_method = "past threshold";
            row.cost.upper_method = "past threshold";
            row.advantage = advantage_estimate(p, row.lambda,
                                               result.rank_plus, row.cost);
        } else {
            row.unresolved = true;
        }
    };

    const int workers = worker_count(result.rows.size());
    if (workers <= 1) {
        for (size_t i = 0; i < result.rows.size(); ++i)
            fill_row(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < result.rows.size();
                     i = next.fetch_add(1))
                    fill_row(i);
            });
        for (std::thread& th : pool)
            th.join();
    }

    for (const SweepRow& row : result.rows)
        if (row.unresolved)
            result.any_unresolved = true;
    return result;
}

std::string sweep_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "lambda,feasible,margin,threshold_bound,cost_lower,cost_upper,"
           "advantage_lower,advantage_upper\n";
    for (const SweepRow& row : result.rows) {
        out << format_double(row.lambda) << ','
            << (row.feasible ? "true" : "false") << ','
            << format_double(row.margin) << ','
            << format_double(row.threshold) << ',';
        if (row.unresolved) {
            out << ",,,\n";
            continue;
        }
        if (!row.cost.reachable) {
            out << "unreachable,unreachable,0,0\n";
            continue;
        }
        out << format_double(row.cost.lower) << ',';
        if (row.cost.upper)
            out << format_double(*row.cost.upper);
        out << ',' << format_double(row.advantage.s_lower) << ','
            << format_double(row.advantage.s_upper) << '\n';
    }
    return out.str();
}

} // namespace corrlab
