#include "corrlab/correlation.hpp"

#include <cmath>
#include <sstream>

namespace corrlab {

namespace {
const double kSumTol = 1e-9;
}

Correlation Correlation::validate(const Matrix& entries, double entry_tol) {
    if (entries.rows() != entries.cols() || entries.rows() < 1)
        throw DimensionMismatch("correlation matrix must be square and nonempty");
    if (entry_tol < 0)
        throw BadParameter("entry tolerance must be >= 0");
    Matrix m = entries;
    const int n = static_cast<int>(m.rows());
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            double v = m(x, y);
            if (std::isnan(v) || v < -entry_tol) {
                std::ostringstream msg;
                msg << "entry (" << (x + 1) << "," << (y + 1) << ") = " << v
                    << " is negative";
                throw NegativeEntry(msg.str());
            }
            if (v < 0)
                m(x, y) = 0;
        }
    }
    const double total = m.sum();
    if (std::abs(total - 1.0) > kSumTol) {
        std::ostringstream msg;
        msg << "entries sum to " << total << ", expected 1";
        throw SumNotOne(msg.str());
    }
    return Correlation(std::move(m));
}

std::pair<Vector, Vector> marginals(const Correlation& p) {
    return {p.entries().rowwise().sum(), p.entries().colwise().sum().transpose()};
}

Matrix normalized(const Matrix& entries) {
    if (entries.size() == 0)
        throw DimensionMismatch("cannot normalize an empty matrix");
    if (entries.minCoeff() < 0)
        throw NegativeEntry("cannot normalize a matrix with negative entries");
    const double total = entries.sum();
    if (!(total > 0))
        throw NonpositiveScale("matrix total must be positive");
    return entries / total;
}

} // namespace corrlab
