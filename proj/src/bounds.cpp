#include "corrlab/bounds.hpp"

#include <cmath>

#include "corrlab/families.hpp"

namespace corrlab {

namespace {

void check_certificate(const Correlation& p, double lambda,
                       const SimplexVector& s, const SimplexVector& t) {
    if (lambda < 0 || lambda >= 1)
        throw BadLambda("cost bounds need noise strength in [0,1)");
    const Matrix ph = phat(p, lambda, s, t);
    if (ph.minCoeff() < -1e-10)
        throw CertificateInvalid("weights are not feasible at this lambda");
}

// ceil with relative slack so exact integers survive roundoff (1/(1/6)
// lands a few ulps above 6)
int slack_ceil(double x) {
    return static_cast<int>(std::ceil(x - 1e-9 * std::max(1.0, x)));
}

int qubit_bits(double cost) {
    if (cost <= 1)
        return 1;
    return std::max(1, static_cast<int>(std::ceil(std::log2(cost) - 1e-12)));
}

int rank_bits(int rank) {
    if (rank <= 1)
        return 0;
    return static_cast<int>(
        std::ceil(std::log2(static_cast<double>(rank)) - 1e-12));
}

} // namespace

int cost_upper_bound(const Correlation& p, double lambda,
                     const SimplexVector& s, const SimplexVector& t,
                     int psd_upper_of_phat) {
    if (psd_upper_of_phat < 1)
        throw BadParameter("factorization size bound must be positive");
    check_certificate(p, lambda, s, t);
    const double wmin = std::min(s.w.minCoeff(), t.w.minCoeff());
    if (wmin <= 0)
        throw CertificateInvalid(
            "dimension bound needs strictly positive weights");
    return psd_upper_of_phat * slack_ceil(1.0 / wmin);
}

CostLowerPoint cost_lower_bound_at(const Correlation& p, double lambda,
                                   const SimplexVector& s,
                                   const SimplexVector& t,
                                   bool infimum_certified) {
    check_certificate(p, lambda, s, t);
    const auto marg = marginals(p);
    const int n = p.size();
    double ratio = 0;
    for (int x = 0; x < n; ++x) {
        if (s.w(x) <= 0) {
            if (marg.first(x) > 0)
                throw CertificateInvalid(
                    "zero weight on an outcome with positive marginal");
            continue;
        }
        ratio = std::max(ratio, marg.first(x) / s.w(x));
    }
    for (int y = 0; y < n; ++y) {
        if (t.w(y) <= 0) {
            if (marg.second(y) > 0)
                throw CertificateInvalid(
                    "zero weight on an outcome with positive marginal");
            continue;
        }
        ratio = std::max(ratio, marg.second(y) / t.w(y));
    }
    return CostLowerPoint{(ratio - lambda) / (1.0 - lambda),
                          !infimum_certified};
}

std::pair<SimplexVector, SimplexVector> am_boundary_certificate(int m,
                                                                double k,
                                                                double eps) {
    const double q = am_mixing(k);
    if (m < 3)
        throw BadParameter("need at least 3 polygon outcomes");
    if (!(eps > 0) || !(eps < q))
        throw BadParameter("epsilon must lie strictly between 0 and q");
    // Spike height: the border entry constraint needs
    //   eta <= eps (1-q) / (2 q (q-eps)),
    // the corner entry needs eta <= (1-q)/(2(q-eps)), and far from the
    // boundary both caps exceed 1, where a pure border spike still works.
    const double eta = std::min({1.0, (1 - q) / (2 * (q - eps)),
                                 eps * (1 - q) / (2 * q * (q - eps))});
    Vector w(m + 1);
    w(0) = eta;
    for (int i = 1; i <= m; ++i)
        w(i) = (1 - eta) / m;
    const SimplexVector sv = SimplexVector::validate(w);
    return {sv, sv};
}

CostBounds am_cost_bounds(int m, double k, double epsilon) {
    if (m < 3)
        throw BadParameter("need at least 3 polygon outcomes");
    if (!(k > 0) || !(k < 1))
        throw BadParameter("interpolation weight must lie in (0,1)");
    const double q = am_mixing(k);
    if (!(epsilon > 0) || !(epsilon < q))
        throw BadParameter("epsilon must lie strictly between 0 and q");
    CostBounds out;
    out.lambda = q - epsilon;
    out.reachable = true;
    out.upper = m * std::ceil(2 * q * (q - epsilon) / (epsilon * (1 + q)) -
                              1e-12);
    out.lower = (1.0 / (1 - q + epsilon)) *
                ((1 - q) / 2 * std::sqrt(2 * q * q / (epsilon * (1 + q))) -
                 q + epsilon);
    out.lower_method = "closed form";
    out.upper_method = "closed form";
    return out;
}

CostBounds bm_cost(int m, double k, double lambda) {
    if (m < 3)
        throw BadParameter("need at least 3 polygon outcomes");
    if (!(k > 0) || !(k < 1))
        throw BadParameter("interpolation weight must lie in (0,1)");
    if (lambda < 0 || lambda > 1)
        throw BadLambda("noise strength must lie in [0,1]");
    CostBounds out;
    out.lambda = lambda;
    const double boundary = 1 - std::sqrt(k);
    if (lambda <= boundary + 1e-12) {
        const Correlation p = make_bm(m, k);
        const PsdFactorization f = explicit_bm_factorization(m, k);
        const NoisyFactorizationReport rep =
            verify_noisy_psd_factorization(p, f, std::min(lambda, boundary));
        if (!rep.pass)
            throw CertificateInvalid(
                "size-2 factorization failed its shifted eigenvalue check");
        out.reachable = true;
        out.lower = 2; // non-product, so no 1-dimensional seed works
        out.upper = 2;
        out.lower_method = "non-product";
        out.upper_method = "shifted factorization";
    } else {
        out.reachable = false;
        out.lower_method = "past threshold";
        out.upper_method = "past threshold";
    }
    return out;
}

AdvantageEstimate advantage_estimate(const Correlation& p, double lambda,
                                     const RankBounds& rank_plus_bounds,
                                     const CostBounds& cost_bounds) {
    if (rank_plus_bounds.lower > rank_plus_bounds.upper)
        throw InconsistentBounds("rank interval is inverted");
    AdvantageEstimate out;
    out.lambda = lambda;
    out.r_lower = rank_bits(rank_plus_bounds.lower);
    out.r_upper = rank_bits(rank_plus_bounds.upper);
    if (!cost_bounds.reachable) {
        out.reachable = false;
        return out; // infinite cost: the advantage ratio collapses to 0
    }
    if (cost_bounds.upper && *cost_bounds.upper < cost_bounds.lower - 1e-9)
        throw InconsistentBounds("cost interval is inverted");
    if (rank_plus_bounds.upper > p.size())
        throw InconsistentBounds("rank bound exceeds the matrix size");
    out.reachable = true;
    out.q_cost_lower = qubit_bits(cost_bounds.lower);
    if (cost_bounds.upper) {
        out.q_cost_upper =
            std::max(out.q_cost_lower, qubit_bits(*cost_bounds.upper));
        out.s_lower = static_cast<double>(out.r_lower) / out.q_cost_upper;
    } else {
        out.q_cost_upper = 0; // no finite upper bound supplied
        out.s_lower = 0;
    }
    out.s_upper = static_cast<double>(out.r_upper) / out.q_cost_lower;
    if (out.s_lower > out.s_upper + 1e-12)
        throw InconsistentBounds("advantage interval is inverted");
    return out;
}

} // namespace corrlab
