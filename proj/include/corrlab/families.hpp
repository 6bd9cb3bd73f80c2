#ifndef CORRLAB_FAMILIES_HPP
#define CORRLAB_FAMILIES_HPP

#include <vector>

#include "corrlab/correlation.hpp"

namespace corrlab {

// Normalized squared-distance matrix of a list of m >= 2 pairwise distinct
// reals: P(x,y) = (a_x - a_y)^2 / sum_{i,j} (a_i - a_j)^2.
Correlation make_edm(const std::vector<double>& alphas);

// Squared-distance matrix with its first row scaled by left(0), first column
// by right(0), and so on per index.  Returned unnormalized: the caller
// controls the total.  left and right must be positive and of length m.
Matrix make_modified_edm(const std::vector<double>& alphas,
                         const Vector& left, const Vector& right);

// A regular m-gon centered at the origin together with the copy shrunk by
// factor k and rotated by half a step.  The slack of inner vertex y against
// the outer vertex x's supporting direction gives the circulant family below.
struct PolygonPair {
    int m;
    double k;

    Eigen::Vector2d outer_direction(int x) const; // unit normal at vertex x, 0-based
    Eigen::Vector2d inner_vertex(int y) const;    // shrunk polygon vertex, 0-based
    double slack(int x, int y) const;             // 1 - <outer_direction(x), inner_vertex(y)>
};

// Circulant distribution on m >= 3 outcomes per party, 0 < k < 1:
// P(x,y) = (1 - k cos(2*pi*(x+y-2)/m)) / m^2 with 1-based x,y.
// Equals PolygonPair{m,k}.slack(x,y) / m^2.  Row and column marginals are
// uniform; the minimum entry is (1-k)/m^2.
Correlation make_bm(int m, double k);

// Mixing weight q used by the bordered circulant family:
// q = 1/(1-k) - sqrt(1/(1-k)^2 - 1), the root in (0,1) of
// (1+q^2)(1-k)/2 = q.
double am_mixing(double k);

// Bordered circulant distribution on m+1 outcomes: entry (1,1) is
// (1-q)^2/2, the rest of row/column 1 is q(1-q)/(2m), and the lower-right
// m x m block is (1+q^2)/2 times make_bm(m,k).  Entries sum to 1 exactly.
Correlation make_am(int m, double k);

// Block-embedded skewed distance matrix: the correlation produced by an
// entangled measurement whose two leading Schmidt weights act on a
// distance-matrix support.  The distance block is scaled by lam1+lam2 and
// skewed by r through diagonal factors (1+r) on row 1 and (1-r) on column 1;
// the remaining weight 1 - lam1 - lam2 sits in a final diagonal entry.
struct SkewedEdmFamily {
    Correlation p;   // (m+1) x (m+1)
    Vector left;     // diagonal row scaling applied to the distance block
    Vector right;    // diagonal column scaling
    double r;        // skew in [0,1)
    double mu1;      // lam1 / (lam1 + lam2)
};

// schmidt_sq: d >= 2 positive reals sorted descending, summing to <= 1.
// alphas: distance-matrix points, pairwise distinct, summing to 0.
// Requires mu1 - 1/2 < sum_y edm(1,y) so the skew stays below 1.
SkewedEdmFamily make_skewed_edm(const std::vector<double>& schmidt_sq,
                                const std::vector<double>& alphas);

} // namespace corrlab

#endif
