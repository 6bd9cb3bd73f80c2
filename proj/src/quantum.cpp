#include "corrlab/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace corrlab {

namespace {

const double kHermTol = 1e-10;
const double kEigTol = 1e-9;
const double kTraceTol = 1e-9;

void check_square(const CMatrix& a, const char* what) {
    if (a.rows() != a.cols() || a.rows() < 1) {
        std::ostringstream msg;
        msg << what << " must be square and nonempty";
        throw DimensionMismatch(msg.str());
    }
}

void check_hermitian(const CMatrix& a, const char* what) {
    check_square(a, what);
    if ((a - a.adjoint()).cwiseAbs().maxCoeff() > kHermTol) {
        std::ostringstream msg;
        msg << what << " is not Hermitian";
        throw NotNormalized(msg.str());
    }
}

double min_eigenvalue(const CMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(
        (a + a.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

void check_lambda_range(double lambda) {
    if (std::isnan(lambda) || lambda < 0 || lambda > 1)
        throw BadLambda("noise strength must lie in [0,1]");
}

// 53 uniform bits into [0,1)
double next_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

DensityMatrix DensityMatrix::validate(const CMatrix& rho) {
    check_hermitian(rho, "density matrix");
    if (std::abs(rho.trace().real() - 1.0) > kTraceTol ||
        std::abs(rho.trace().imag()) > kTraceTol)
        throw NotNormalized("density matrix trace must be 1");
    if (min_eigenvalue(rho) < -kEigTol)
        throw NotNormalized("density matrix must be positive semidefinite");
    return DensityMatrix(rho);
}

Povm Povm::validate(const std::vector<CMatrix>& effects) {
    if (effects.empty())
        throw DimensionMismatch("measurement needs at least one effect");
    const int dim = static_cast<int>(effects[0].rows());
    CMatrix sum = CMatrix::Zero(dim, dim);
    for (const CMatrix& e : effects) {
        check_hermitian(e, "effect");
        if (e.rows() != dim)
            throw DimensionMismatch("effects must share one dimension");
        if (min_eigenvalue(e) < -kEigTol)
            throw NotNormalized("effect must be positive semidefinite");
        sum += e;
    }
    if ((sum - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > kTraceTol)
        throw NotNormalized("effects must sum to the identity");
    return Povm(effects, dim);
}

CMatrix depolarize(const CMatrix& rho, double lambda) {
    check_square(rho, "state");
    check_lambda_range(lambda);
    const int d = static_cast<int>(rho.rows());
    return (1 - lambda) * rho +
           lambda * rho.trace() / double(d) * CMatrix::Identity(d, d);
}

CMatrix partial_trace_a(const CMatrix& op, int da, int db) {
    check_square(op, "operator");
    if (op.rows() != static_cast<long>(da) * db)
        throw NotBipartite("operator dimension is not da*db");
    CMatrix out = CMatrix::Zero(db, db);
    for (int i = 0; i < da; ++i)
        out += op.block(i * db, i * db, db, db);
    return out;
}

CMatrix partial_trace_b(const CMatrix& op, int da, int db) {
    check_square(op, "operator");
    if (op.rows() != static_cast<long>(da) * db)
        throw NotBipartite("operator dimension is not da*db");
    CMatrix out = CMatrix::Zero(da, da);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j)
            out(i, j) = op.block(i * db, j * db, db, db).trace();
    return out;
}

CMatrix depolarize_bipartite(const CMatrix& sigma, double lambda, int local_dim) {
    check_square(sigma, "state");
    check_lambda_range(lambda);
    const int d = local_dim;
    if (d < 1 || sigma.rows() != static_cast<long>(d) * d)
        throw NotBipartite("state dimension is not local_dim^2");

    const CMatrix sig_a = partial_trace_b(sigma, d, d);
    const CMatrix sig_b = partial_trace_a(sigma, d, d);
    const Cx total = sigma.trace();

    CMatrix out = (1 - lambda) * (1 - lambda) * sigma;
    const double mix = lambda * (1 - lambda) / d;
    // I/d (x) sig_b lives in the diagonal A blocks
    for (int i = 0; i < d; ++i)
        out.block(i * d, i * d, d, d) += mix * sig_b;
    // sig_a (x) I/d is diagonal within every (i,j) block
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int l = 0; l < d; ++l)
                out(i * d + l, j * d + l) += mix * sig_a(i, j);
    out += lambda * lambda * total / double(d * d) *
           CMatrix::Identity(d * d, d * d);
    return out;
}

Correlation generated_correlation(const NoisyProtocol& protocol) {
    const int d = protocol.local_dim;
    if (protocol.povm_a.dim() != d || protocol.povm_b.dim() != d)
        throw DimensionMismatch("measurements must act on the local dimension");
    if (protocol.seed.dim() != d * d)
        throw NotBipartite("seed must live on local_dim^2");
    if (protocol.povm_a.size() != protocol.povm_b.size())
        throw DimensionMismatch("parties must have equal outcome counts");
    check_lambda_range(protocol.lambda);

    const int n = protocol.povm_a.size();
    const CMatrix noisy =
        depolarize_bipartite(protocol.seed.matrix(), protocol.lambda, d);

    // tr[(E (x) F) rho] = sum_{i,k} E(i,k) G(k,i) with
    // G(k,i) = sum_{j,l} F(j,l) rho(k*d+l, i*d+j); avoids forming Kronecker
    // products.
    Matrix p(n, n);
    double worst_imag = 0;
    for (int y = 0; y < n; ++y) {
        const CMatrix& f = protocol.povm_b.effect(y);
        CMatrix g = CMatrix::Zero(d, d);
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i) {
                Cx acc(0, 0);
                for (int j = 0; j < d; ++j)
                    for (int l = 0; l < d; ++l)
                        acc += f(j, l) * noisy(k * d + l, i * d + j);
                g(k, i) = acc;
            }
        for (int x = 0; x < n; ++x) {
            const CMatrix& e = protocol.povm_a.effect(x);
            Cx acc(0, 0);
            for (int i = 0; i < d; ++i)
                for (int k = 0; k < d; ++k)
                    acc += e(i, k) * g(k, i);
            worst_imag = std::max(worst_imag, std::abs(acc.imag()));
            p(x, y) = acc.real();
        }
    }
    if (worst_imag > 1e-9)
        throw NotNormalized("outcome probabilities have a nonreal part");
    return Correlation::validate(p, 1e-9);
}

Eigen::MatrixXd sample(const Correlation& p, std::int64_t shots,
                       std::uint64_t seed) {
    if (shots < 0)
        throw BadParameter("shot count must be >= 0");
    const int n = p.size();
    std::vector<double> cdf(static_cast<std::size_t>(n) * n);
    double acc = 0;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            acc += p(x, y);
            cdf[static_cast<std::size_t>(x) * n + y] = acc;
        }
    cdf.back() = 1.0; // guard against the sum tolerance

    std::mt19937_64 rng(seed);
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n, n);
    for (std::int64_t s = 0; s < shots; ++s) {
        const double u = next_double(rng);
        const std::size_t cell =
            std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        counts(static_cast<int>(cell) / n, static_cast<int>(cell) % n) += 1;
    }
    return counts;
}

SchmidtDecomposition schmidt_decompose(const CVector& psi, int dim_a, int dim_b) {
    if (dim_a < 1 || dim_b < 1 ||
        psi.size() != static_cast<long>(dim_a) * dim_b)
        throw DimensionMismatch("state length must be dim_a*dim_b");
    if (std::abs(psi.norm() - 1.0) > 1e-9)
        throw NotNormalized("state vector must have unit norm");

    CMatrix coeff(dim_a, dim_b);
    for (int i = 0; i < dim_a; ++i)
        for (int j = 0; j < dim_b; ++j)
            coeff(i, j) = psi(static_cast<long>(i) * dim_b + j);

    Eigen::JacobiSVD<CMatrix> svd(coeff,
                                  Eigen::ComputeThinU | Eigen::ComputeThinV);
    SchmidtDecomposition out;
    const Vector sv = svd.singularValues();
    out.coefficients_sq = sv.array().square();
    out.basis_a = svd.matrixU();
    // coeff = U diag(sv) V^dagger, so psi = sum_k sv_k u_k (x) conj(v_k)
    out.basis_b = svd.matrixV().conjugate();
    return out;
}

} // namespace corrlab
