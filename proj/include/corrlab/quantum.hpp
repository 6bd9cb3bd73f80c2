#ifndef CORRLAB_QUANTUM_HPP
#define CORRLAB_QUANTUM_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "corrlab/correlation.hpp"

namespace corrlab {

typedef std::complex<double> Cx;
typedef Eigen::MatrixXcd CMatrix;
typedef Eigen::VectorXcd CVector;

// Trace-1 positive semidefinite operator.  Hermiticity within 1e-10,
// minimum eigenvalue >= -1e-9, trace within 1e-9 of 1.
class DensityMatrix {
public:
    static DensityMatrix validate(const CMatrix& rho);

    int dim() const { return static_cast<int>(rho_.rows()); }
    const CMatrix& matrix() const { return rho_; }

private:
    explicit DensityMatrix(CMatrix rho) : rho_(std::move(rho)) {}
    CMatrix rho_;
};

// Measurement with positive semidefinite effects summing to the identity
// (completeness within 1e-9, effect eigenvalues >= -1e-9).
class Povm {
public:
    static Povm validate(const std::vector<CMatrix>& effects);

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(effects_.size()); }
    const CMatrix& effect(int i) const { return effects_[i]; }

private:
    Povm(std::vector<CMatrix> effects, int dim)
        : effects_(std::move(effects)), dim_(dim) {}
    std::vector<CMatrix> effects_;
    int dim_;
};

// Two parties sharing the seed state on C^d (x) C^d, each local side passed
// through the depolarizing channel of strength lambda before measurement.
// povm_a and povm_b act on one local factor each and have equal outcome
// counts.
struct NoisyProtocol {
    double lambda;
    int local_dim;
    DensityMatrix seed; // dimension local_dim^2
    Povm povm_a;
    Povm povm_b;
};

// (1-lambda) rho + lambda tr(rho) I/d.  Accepts any square matrix; the
// affine form only uses the trace.  lambda must lie in [0,1].
CMatrix depolarize(const CMatrix& rho, double lambda);

// Both local sides of a state on C^d (x) C^d depolarized independently:
// (1-l)^2 sigma + l(1-l) [I/d (x) tr_A sigma + tr_B sigma (x) I/d]
//   + l^2 tr(sigma) I/d^2.
CMatrix depolarize_bipartite(const CMatrix& sigma, double lambda, int local_dim);

// Partial traces of an operator on C^{da} (x) C^{db}.
CMatrix partial_trace_a(const CMatrix& op, int da, int db);
CMatrix partial_trace_b(const CMatrix& op, int da, int db);

// The joint outcome distribution P(x,y) = tr[(E_x (x) F_y) sigma'] where
// sigma' is the seed after both local depolarizing channels.
Correlation generated_correlation(const NoisyProtocol& protocol);

// Multinomial outcome counts over the n x n cells from `shots` independent
// draws.  Deterministic for a fixed seed across platforms: uses mt19937_64
// with an explicit bits-to-double conversion and inverse-CDF lookup.
Eigen::MatrixXd sample(const Correlation& p, std::int64_t shots,
                       std::uint64_t seed);

struct SchmidtDecomposition {
    Vector coefficients_sq; // descending, sums to 1 for a normalized state
    CMatrix basis_a;        // columns: orthonormal local basis, A side
    CMatrix basis_b;        // columns: B side, psi = sum_k sqrt(c_k) a_k (x) b_k
};

// Schmidt decomposition of a unit vector on C^{da} (x) C^{db}.
SchmidtDecomposition schmidt_decompose(const CVector& psi, int dim_a, int dim_b);

} // namespace corrlab

#endif
