#ifndef CORRLAB_CORRELATION_HPP
#define CORRLAB_CORRELATION_HPP

#include <Eigen/Dense>
#include <utility>

#include "corrlab/errors.hpp"

namespace corrlab {

typedef Eigen::MatrixXd Matrix;
typedef Eigen::VectorXd Vector;

// A joint distribution P(x,y) over pairs drawn from {1..n} x {1..n}, stored
// row-major conceptually as an n x n matrix.  Invariants: square, n >= 1,
// every entry >= 0, entries sum to 1 within 1e-9.  Instances are immutable;
// the only way to build one is through validate(), which never normalizes
// silently.
class Correlation {
public:
    // Checks the invariants and returns the validated distribution.
    // entry_tol: entries in [-entry_tol, 0) are clamped to 0, anything lower
    // throws NegativeEntry.  The sum check always uses tolerance 1e-9.
    static Correlation validate(const Matrix& entries, double entry_tol = 0.0);

    int size() const { return static_cast<int>(entries_.rows()); }
    const Matrix& entries() const { return entries_; }
    double operator()(int x, int y) const { return entries_(x, y); }

private:
    explicit Correlation(Matrix entries) : entries_(std::move(entries)) {}
    Matrix entries_;
};

// Row and column marginals, in that order.  Both sum to 1 up to the
// correlation's own sum tolerance.
std::pair<Vector, Vector> marginals(const Correlation& p);

// Divides a nonnegative matrix by its total so the result sums to 1.
// Explicit by design: validate() never does this on its own.
// Throws NonpositiveScale when the total is <= 0 and NegativeEntry when any
// entry is < 0.
Matrix normalized(const Matrix& entries);

} // namespace corrlab

#endif
