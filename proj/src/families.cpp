#include "corrlab/families.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace corrlab {

namespace {

const double kPi = 3.14159265358979323846;

void check_alphas(const std::vector<double>& alphas) {
    if (alphas.size() < 2)
        throw BadParameter("need at least 2 points");
    std::vector<double> sorted(alphas);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] == sorted[i - 1]) {
            std::ostringstream msg;
            msg << "repeated point " << sorted[i];
            throw DuplicateAlpha(msg.str());
        }
}

// sum_{i,j} (a_i - a_j)^2 = 2m sum a_i^2 - 2 (sum a_i)^2
double pair_distance_total(const std::vector<double>& alphas) {
    double sum = 0, sumsq = 0;
    for (double a : alphas) {
        sum += a;
        sumsq += a * a;
    }
    const double m = static_cast<double>(alphas.size());
    return 2 * m * sumsq - 2 * sum * sum;
}

} // namespace

Correlation make_edm(const std::vector<double>& alphas) {
    check_alphas(alphas);
    const int m = static_cast<int>(alphas.size());
    const double total = pair_distance_total(alphas);
    Matrix p(m, m);
    for (int x = 0; x < m; ++x)
        for (int y = 0; y < m; ++y) {
            const double d = alphas[x] - alphas[y];
            p(x, y) = d * d / total;
        }
    return Correlation::validate(p);
}

Matrix make_modified_edm(const std::vector<double>& alphas,
                         const Vector& left, const Vector& right) {
    check_alphas(alphas);
    const int m = static_cast<int>(alphas.size());
    if (left.size() != m || right.size() != m)
        throw DimensionMismatch("scaling vectors must match the point count");
    if (left.minCoeff() <= 0 || right.minCoeff() <= 0)
        throw NonpositiveScale("scaling factors must be positive");
    const double total = pair_distance_total(alphas);
    Matrix p(m, m);
    for (int x = 0; x < m; ++x)
        for (int y = 0; y < m; ++y) {
            const double d = alphas[x] - alphas[y];
            p(x, y) = left(x) * (d * d / total) * right(y);
        }
    return p;
}

Eigen::Vector2d PolygonPair::outer_direction(int x) const {
    const double phi = 2 * kPi * x / m;
    return Eigen::Vector2d(std::cos(phi), std::sin(phi));
}

Eigen::Vector2d PolygonPair::inner_vertex(int y) const {
    // traversed in the opposite orientation so the slack depends on x+y only
    const double phi = -2 * kPi * y / m;
    return Eigen::Vector2d(k * std::cos(phi), k * std::sin(phi));
}

double PolygonPair::slack(int x, int y) const {
    return 1.0 - outer_direction(x).dot(inner_vertex(y));
}

Correlation make_bm(int m, double k) {
    if (m < 3)
        throw BadParameter("need m >= 3");
    if (!(k > 0 && k < 1))
        throw BadParameter("need 0 < k < 1");
    PolygonPair poly{m, k};
    Matrix p(m, m);
    for (int x = 0; x < m; ++x)
        for (int y = 0; y < m; ++y)
            p(x, y) = poly.slack(x, y) / (m * m);
    return Correlation::validate(p);
}

double am_mixing(double k) {
    if (!(k > 0 && k < 1))
        throw BadParameter("need 0 < k < 1");
    const double u = 1.0 / (1.0 - k);
    // u - sqrt(u^2-1) in the cancellation-free form
    return 1.0 / (u + std::sqrt(u * u - 1.0));
}

Correlation make_am(int m, double k) {
    const double q = am_mixing(k);
    const Correlation b = make_bm(m, k);
    const int n = m + 1;
    Matrix p(n, n);
    p(0, 0) = (1 - q) * (1 - q) / 2;
    for (int i = 1; i < n; ++i) {
        p(0, i) = q * (1 - q) / (2 * m);
        p(i, 0) = q * (1 - q) / (2 * m);
    }
    for (int x = 1; x < n; ++x)
        for (int y = 1; y < n; ++y)
            p(x, y) = (1 + q * q) / 2 * b(x - 1, y - 1);
    return Correlation::validate(p);
}

SkewedEdmFamily make_skewed_edm(const std::vector<double>& schmidt_sq,
                                const std::vector<double>& alphas) {
    if (schmidt_sq.size() < 2)
        throw BadParameter("need at least two Schmidt weights");
    double sum = 0;
    for (std::size_t i = 0; i < schmidt_sq.size(); ++i) {
        if (!(schmidt_sq[i] > 0))
            throw SchmidtOrder("Schmidt weights must be positive");
        if (i > 0 && schmidt_sq[i] > schmidt_sq[i - 1] + 1e-15)
            throw SchmidtOrder("Schmidt weights must be sorted descending");
        sum += schmidt_sq[i];
    }
    if (sum > 1 + 1e-12)
        throw NotNormalized("Schmidt weights must sum to at most 1");

    const double lam1 = schmidt_sq[0];
    const double lam2 = schmidt_sq[1];
    const double mu1 = lam1 / (lam1 + lam2);

    const Correlation edm = make_edm(alphas);
    const int m = edm.size();
    double alpha_sum = 0, alpha_scale = 0;
    for (double a : alphas) {
        alpha_sum += a;
        alpha_scale += std::abs(a);
    }
    if (std::abs(alpha_sum) > 1e-12 * std::max(1.0, alpha_scale))
        throw AlphaSumNonzero("points must sum to 0");

    const double row1 = edm.entries().row(0).sum();
    // mu1 >= 1/2 by the ordering; the skew must stay below 1
    const double r = (mu1 - 0.5) / row1;
    if (!(r < 1))
        throw Condition3Violated("first-row mass too small for this mu1");

    Vector left = Vector::Ones(m);
    Vector right = Vector::Ones(m);
    left(0) = 1 + r;
    right(0) = 1 - r;
    const Matrix block = (lam1 + lam2) * make_modified_edm(alphas, left, right);

    Matrix p = Matrix::Zero(m + 1, m + 1);
    p.topLeftCorner(m, m) = block;
    p(m, m) = 1 - lam1 - lam2;
    return SkewedEdmFamily{Correlation::validate(p, 1e-15), left, right, r, mu1};
}

} // namespace corrlab
