#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "corrlab/families.hpp"
#include "corrlab/reach.hpp"

using namespace corrlab;

namespace {

SimplexVector uniform_weights(int n) {
    return SimplexVector::validate(Vector::Constant(n, 1.0 / n));
}

Correlation random_correlation(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix m(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) m(x, y) = 0.05 + u(rng);
    return Correlation::validate(normalized(m));
}

SimplexVector random_weights(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector w(n);
    for (int i = 0; i < n; ++i) w(i) = 0.1 + u(rng);
    w /= w.sum();
    return SimplexVector::validate(w);
}

// Reference threshold: enumerate all permutations directly.
double brute_threshold(const Correlation& p) {
    const int n = p.size();
    auto [row, col] = marginals(p);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0;
    do {
        double sum = 0;
        for (int x = 0; x < n; ++x)
            sum += std::sqrt(std::max(0.0, row(x) * col(perm[x]) - p(x, perm[x])));
        best = std::max(best, sum);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return 1.0 - best;
}

} // namespace

TEST_CASE("simplex weights validation") {
    SimplexVector u = uniform_weights(3);
    CHECK(u.strict);
    Vector w(3);
    w << 0.5, 0.5, 0.0;
    SimplexVector z = SimplexVector::validate(w);
    CHECK_FALSE(z.strict);
    w << 0.5, 0.6, -0.1;
    CHECK_THROWS_AS(SimplexVector::validate(w), NegativeEntry);
    w << 0.5, 0.2, 0.2;
    CHECK_THROWS_AS(SimplexVector::validate(w), SumNotOne);
    CHECK_THROWS_AS(SimplexVector::validate(Vector()), DimensionMismatch);
}

TEST_CASE("residual seed matrix at a known point") {
    Matrix m(2, 2);
    m << 0.4, 0.1, 0.1, 0.4;
    Correlation p = Correlation::validate(m);
    SimplexVector u = uniform_weights(2);
    Matrix ph = phat(p, 0.2, u, u);
    // Every cell loses 0.2*0.25 twice and gains 0.04*0.25.
    CHECK(ph(0, 0) == doctest::Approx(0.31).epsilon(1e-15));
    CHECK(ph(0, 1) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(ph.sum() == doctest::Approx(0.64).epsilon(1e-14));
    // Row sums follow the marginal contraction.
    CHECK(ph.row(0).sum() == doctest::Approx(0.8 * (0.5 - 0.2 * 0.5)));
    // No noise leaves the distribution untouched.
    CHECK((phat(p, 0.0, u, u) - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("residual seed matrix validates dimensions and noise") {
    Matrix m(2, 2);
    m << 0.4, 0.1, 0.1, 0.4;
    Correlation p = Correlation::validate(m);
    SimplexVector u3 = uniform_weights(3);
    SimplexVector u2 = uniform_weights(2);
    CHECK_THROWS_AS(phat(p, 0.2, u3, u2), DimensionMismatch);
    CHECK_THROWS_AS(phat(p, 0.2, u2, u3), DimensionMismatch);
    CHECK_THROWS_AS(phat(p, -0.1, u2, u2), BadLambda);
    CHECK_THROWS_AS(phat(p, 1.1, u2, u2), BadLambda);
}

TEST_CASE("noise derivative matches its closed form and finite differences") {
    Matrix m(2, 2);
    m << 0.4, 0.1, 0.1, 0.4;
    Correlation p = Correlation::validate(m);
    SimplexVector u = uniform_weights(2);
    Matrix d = phat_lambda_derivative(p, 0.2, u, u);
    CHECK(d(0, 0) == doctest::Approx(2 * 0.2 * 0.25 - 0.25 - 0.25));
    // The residual is quadratic in lambda, so the central difference is exact
    // up to roundoff.
    const double h = 1e-6;
    Matrix fd = (phat(p, 0.2 + h, u, u) - phat(p, 0.2 - h, u, u)) / (2 * h);
    CHECK((d - fd).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("noise derivative is nonpositive at feasible weight pairs") {
    // Nonnegative residual row sums force row(x) >= lambda s_x and likewise
    // for columns, which caps every entry of the derivative at zero.  The
    // cap does not hold entrywise for infeasible pairs.
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> lam(0.0, 0.6);
    int feasible_seen = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + static_cast<int>(trial % 3);
        Correlation p = random_correlation(n, rng);
        SimplexVector s = random_weights(n, rng);
        SimplexVector t = random_weights(n, rng);
        // Half the draws stay near zero noise so feasible pairs show up.
        const double lambda = (trial % 2 == 0) ? 0.05 * lam(rng) : lam(rng);
        Matrix ph = phat(p, lambda, s, t);
        if (ph.minCoeff() < 0) continue;
        ++feasible_seen;
        Matrix d = phat_lambda_derivative(p, lambda, s, t);
        CHECK(d.maxCoeff() <= 1e-10);
    }
    CHECK(feasible_seen >= 10);
}

TEST_CASE("threshold of a symmetric two-outcome distribution") {
    Matrix m(2, 2);
    m << 0.4, 0.1, 0.1, 0.4;
    Correlation p = Correlation::validate(m);
    CHECK(threshold_upper_bound(p) ==
          doctest::Approx(1.0 - 2.0 * std::sqrt(0.15)).epsilon(1e-15));
    CHECK(threshold_upper_bound(p) ==
          doctest::Approx(0.2254033307585166).epsilon(1e-14));
}

TEST_CASE("threshold of a product distribution is one") {
    Correlation p = Correlation::validate(Matrix::Constant(3, 3, 1.0 / 9));
    CHECK(threshold_upper_bound(p) == doctest::Approx(1.0));
}

TEST_CASE("threshold of the polygon family sits at one minus sqrt k") {
    Correlation b6 = make_bm(6, 0.5);
    CHECK(std::abs(threshold_upper_bound(b6) - (1.0 - std::sqrt(0.5))) <= 1e-9);
}

TEST_CASE("assignment threshold agrees with permutation enumeration") {
    std::mt19937_64 rng(808);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = (trial % 2 == 0) ? 3 : 4;
        Correlation p = random_correlation(n, rng);
        CHECK(threshold_upper_bound(p) ==
              doctest::Approx(brute_threshold(p)).epsilon(1e-12));
    }
}

TEST_CASE("feasibility search certifies the polygon family below threshold") {
    Correlation b6 = make_bm(6, 0.5);
    FeasibilityResult at0 = find_feasible_st(b6, 0.0);
    CHECK(at0.feasible);
    CHECK(at0.margin == doctest::Approx(0.5 / 36).epsilon(1e-9));
    FeasibilityResult mid = find_feasible_st(b6, 0.2);
    CHECK(mid.feasible);
    CHECK(mid.margin > 0);
    CHECK(mid.iterations > 0);
    // Reported weights really are a certificate.
    CHECK(phat(b6, 0.2, mid.s, mid.t).minCoeff() >= -1e-12);
    // The boundary point itself stays feasible for this family.
    FeasibilityResult at_thr = find_feasible_st(b6, 1.0 - std::sqrt(0.5));
    CHECK(at_thr.feasible);
    // Past the threshold no weights exist.
    FeasibilityResult past = find_feasible_st(b6, 0.35);
    CHECK_FALSE(past.feasible);
    CHECK(past.margin < 0);
}

TEST_CASE("feasibility search respects the strict floor") {
    Correlation b6 = make_bm(6, 0.5);
    SearchOptions opts;
    opts.strict_floor = 0.05;
    FeasibilityResult r = find_feasible_st(b6, 0.2, opts);
    CHECK(r.feasible);
    CHECK(r.s.w.minCoeff() >= 0.05 - 1e-12);
    CHECK(r.t.w.minCoeff() >= 0.05 - 1e-12);
    opts.strict_floor = 0.5;
    CHECK_THROWS_AS(find_feasible_st(b6, 0.2, opts), BadParameter);
    opts.strict_floor = -0.1;
    CHECK_THROWS_AS(find_feasible_st(b6, 0.2, opts), BadParameter);
}

TEST_CASE("region estimate closes at the polygon threshold") {
    Correlation b6 = make_bm(6, 0.5);
    RegionEstimate r = estimate_region(b6, 1e-4);
    CHECK(r.boundary == BoundaryKind::ClosedCertified);
    CHECK(r.lambda_lo == r.lambda_hi);
    CHECK(std::abs(r.lambda_hi - (1.0 - std::sqrt(0.5))) <= 1e-9);
    CHECK(r.threshold == doctest::Approx(r.lambda_hi));
    CHECK(r.witness.feasible);
    CHECK_THROWS_AS(estimate_region(b6, 0.0), BadParameter);
}

TEST_CASE("region estimate leaves the bordered boundary open") {
    Correlation a8 = make_am(8, 0.5);
    const double q = am_mixing(0.5);
    RegionEstimate r = estimate_region(a8, 1e-5);
    CHECK(r.boundary == BoundaryKind::OpenCertified);
    CHECK(r.lambda_hi > q - 1e-9);
    CHECK(r.lambda_hi < q + 5e-5);
    CHECK(r.lambda_lo < r.lambda_hi);
    CHECK(r.witness.feasible);
    // The assignment bound stays far above the true boundary here.
    CHECK(r.threshold > 0.4);
}

TEST_CASE("decay classification separates the two families") {
    DecayClassification cb = classify_sudden_death(make_bm(6, 0.5));
    CHECK(cb.kind == DecayKind::SuddenDeath);
    CHECK(std::abs(cb.boundary - (1.0 - std::sqrt(0.5))) <= 1e-6);
    CHECK(cb.strict_margin >= -1e-6);
    CHECK_FALSE(cb.evidence.empty());

    DecayClassification ca = classify_sudden_death(make_am(8, 0.5));
    CHECK(ca.kind == DecayKind::GradualDecay);
    CHECK(std::abs(ca.boundary - am_mixing(0.5)) <= 5e-5);
    CHECK(ca.closed_margin >= -1e-6);
    CHECK(ca.strict_margin <= -2e-6);
    REQUIRE(ca.evidence.size() >= 2);
}

TEST_CASE("decay classification gives up on factorizing input") {
    Correlation prod = Correlation::validate(Matrix::Constant(3, 3, 1.0 / 9));
    DecayClassification c = classify_sudden_death(prod);
    CHECK(c.kind == DecayKind::Inconclusive);
    REQUIRE_FALSE(c.evidence.empty());
    CHECK(c.evidence[0].find("factorizes") != std::string::npos);
}

TEST_CASE("decay classification requires positive entries") {
    CHECK_THROWS_AS(classify_sudden_death(make_edm({-1.0, 0.0, 1.0})),
                    NotPositive);
}
