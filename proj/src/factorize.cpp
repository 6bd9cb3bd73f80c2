#include "corrlab/factorize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "corrlab/families.hpp"

namespace corrlab {

namespace {

const double kHermTol = 1e-10;
const double kPi = 3.14159265358979323846;

void check_lambda_unit(double lambda) {
    if (std::isnan(lambda) || lambda < 0 || lambda > 1)
        throw BadLambda("noise strength must lie in [0,1]");
}

Eigen::SelfAdjointEigenSolver<CMatrix> eig(const CMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver((a + a.adjoint()) / 2.0);
    if (solver.info() != Eigen::Success)
        throw Error("eigendecomposition failed");
    return solver;
}

double min_eig(const CMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(
        (a + a.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

CMatrix hermitian_inverse(const CMatrix& a, double* cond) {
    const auto solver = eig(a);
    const Vector ev = solver.eigenvalues();
    const double lo = ev.minCoeff(), hi = ev.maxCoeff();
    if (cond)
        *cond = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(lo > 1e-12 * std::max(1.0, hi)))
        throw SingularSum("factor sum is numerically singular");
    return solver.eigenvectors() * ev.cwiseInverse().asDiagonal() *
           solver.eigenvectors().adjoint();
}

} // namespace

PsdFactorization PsdFactorization::validate(int r, std::vector<CMatrix> cs,
                                            std::vector<CMatrix> ds) {
    if (r < 1)
        throw BadParameter("factorization size must be >= 1");
    if (cs.empty() || cs.size() != ds.size())
        throw DimensionMismatch("need equal nonzero counts of row and column factors");
    for (const auto* side : {&cs, &ds})
        for (const CMatrix& a : *side) {
            if (a.rows() != r || a.cols() != r)
                throw DimensionMismatch("factor size mismatch");
            if ((a - a.adjoint()).cwiseAbs().maxCoeff() > kHermTol)
                throw NotNormalized("factors must be Hermitian");
        }
    PsdFactorization f;
    f.r = r;
    f.cs = std::move(cs);
    f.ds = std::move(ds);
    return f;
}

FactorizationReport verify_psd_factorization(const Correlation& p,
                                             const PsdFactorization& f,
                                             double tol) {
    const int n = p.size();
    if (static_cast<int>(f.cs.size()) != n)
        throw DimensionMismatch("factor count must match the correlation size");
    FactorizationReport report{};
    report.max_residual = 0;
    report.min_eig_c = report.min_eig_d = std::numeric_limits<double>::infinity();
    for (int x = 0; x < n; ++x)
        report.min_eig_c = std::min(report.min_eig_c, min_eig(f.cs[x]));
    for (int y = 0; y < n; ++y)
        report.min_eig_d = std::min(report.min_eig_d, min_eig(f.ds[y]));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            const Cx t = (f.cs[x] * f.ds[y]).trace();
            report.max_residual =
                std::max(report.max_residual, std::abs(t - Cx(p(x, y), 0)));
        }
    report.pass = report.max_residual <= tol && report.min_eig_c >= -tol &&
                  report.min_eig_d >= -tol;
    return report;
}

NoisyFactorizationReport verify_noisy_psd_factorization(
    const Correlation& p, const PsdFactorization& f, double lambda,
    double tol) {
    check_lambda_unit(lambda);
    NoisyFactorizationReport report{};
    report.base = verify_psd_factorization(p, f, tol);

    CMatrix s = CMatrix::Zero(f.r, f.r), t = CMatrix::Zero(f.r, f.r);
    for (const CMatrix& c : f.cs)
        s += c;
    for (const CMatrix& d : f.ds)
        t += d;
    const CMatrix s_inv = hermitian_inverse(s, &report.cond_sum_c);
    const CMatrix t_inv = hermitian_inverse(t, &report.cond_sum_d);

    report.min_shift_eig_c = report.min_shift_eig_d =
        std::numeric_limits<double>::infinity();
    for (const CMatrix& c : f.cs) {
        const double trace = (c * s_inv).trace().real();
        report.min_shift_eig_c = std::min(
            report.min_shift_eig_c, min_eig(c - (lambda / f.r) * trace * s));
    }
    for (const CMatrix& d : f.ds) {
        const double trace = (d * t_inv).trace().real();
        report.min_shift_eig_d = std::min(
            report.min_shift_eig_d, min_eig(d - (lambda / f.r) * trace * t));
    }
    report.pass = report.base.pass && report.min_shift_eig_c >= -tol &&
                  report.min_shift_eig_d >= -tol;
    return report;
}

PsdFactorization explicit_edm_factorization(const std::vector<double>& alphas) {
    const int m = static_cast<int>(alphas.size());
    double sum = 0, scale = 0, sumsq = 0;
    for (double a : alphas) {
        sum += a;
        scale += std::abs(a);
        sumsq += a * a;
    }
    if (std::abs(sum) > 1e-12 * std::max(1.0, scale))
        throw AlphaSumNonzero("points must sum to 0");
    make_edm(alphas); // reuse its distinctness and count checks

    // tr(C_x D_y) = (a_x - a_y)^2 / (2 m sum a^2), the centered pair total
    const double z = std::sqrt(2.0 * m * sumsq);
    std::vector<CMatrix> cs(m), ds(m);
    for (int x = 0; x < m; ++x) {
        CMatrix c(2, 2);
        c << alphas[x] * alphas[x], -alphas[x], -alphas[x], 1;
        cs[x] = c / z;
        CMatrix d(2, 2);
        d << 1, alphas[x], alphas[x], alphas[x] * alphas[x];
        ds[x] = d / z;
    }
    return PsdFactorization::validate(2, std::move(cs), std::move(ds));
}

PsdFactorization explicit_bm_factorization(int m, double k) {
    make_bm(m, k); // parameter checks
    const double a = 1.0 / (std::sqrt(2.0) * m);
    const double c = std::sqrt(k);
    std::vector<CMatrix> cs(m), ds(m);
    for (int x = 0; x < m; ++x) {
        const double phi = 2 * kPi * x / m;
        const Cx w = std::polar(c, phi);
        CMatrix cm(2, 2);
        cm << 1, w, std::conj(w), 1;
        cs[x] = a * cm;
        CMatrix dm(2, 2);
        dm << 1, -std::conj(w), -w, 1;
        ds[x] = a * dm;
    }
    return PsdFactorization::validate(2, std::move(cs), std::move(ds));
}

PsdFactorization explicit_am_factorization(int m, double k) {
    const double q = am_mixing(k);
    const PsdFactorization inner = explicit_bm_factorization(m, k);
    const double beta = std::sqrt((1 + q * q) / 2);
    const double gamma = (1 - q) / (2 * std::sqrt(1 + q * q));

    std::vector<CMatrix> cs(m + 1), ds(m + 1);
    CMatrix head = CMatrix::Zero(3, 3);
    head(0, 0) = gamma * std::sqrt(2.0);
    head(1, 1) = gamma * q;
    head(2, 2) = gamma * q;
    cs[0] = head;
    ds[0] = head;
    for (int i = 0; i < m; ++i) {
        CMatrix c = CMatrix::Zero(3, 3), d = CMatrix::Zero(3, 3);
        c.bottomRightCorner(2, 2) = beta * inner.cs[i];
        d.bottomRightCorner(2, 2) = beta * inner.ds[i];
        cs[i + 1] = c;
        ds[i + 1] = d;
    }
    return PsdFactorization::validate(3, std::move(cs), std::move(ds));
}

PsdFactorization diagonal_factorization_of(const Correlation& p) {
    const int n = p.size();
    std::vector<CMatrix> cs(n), ds(n);
    for (int x = 0; x < n; ++x) {
        cs[x] = CMatrix::Zero(n, n);
        cs[x](x, x) = 1;
    }
    for (int y = 0; y < n; ++y) {
        ds[y] = CMatrix::Zero(n, n);
        for (int x = 0; x < n; ++x)
            ds[y](x, x) = p(x, y);
    }
    return PsdFactorization::validate(n, std::move(cs), std::move(ds));
}

bool is_sum_diagonal(const PsdFactorization& f, double tol) {
    CMatrix s = CMatrix::Zero(f.r, f.r), t = CMatrix::Zero(f.r, f.r);
    for (const CMatrix& c : f.cs)
        s += c;
    for (const CMatrix& d : f.ds)
        t += d;
    if ((s - t).cwiseAbs().maxCoeff() > tol)
        return false;
    CMatrix off = s;
    off.diagonal().setZero();
    return off.cwiseAbs().maxCoeff() <= tol;
}

PsdFactorization diagonalize_factorization(const PsdFactorization& f) {
    const int r = f.r;
    CMatrix s = CMatrix::Zero(r, r), t = CMatrix::Zero(r, r);
    for (const CMatrix& c : f.cs)
        s += c;
    for (const CMatrix& d : f.ds)
        t += d;

    const auto es = eig(s);
    const Vector sev = es.eigenvalues();
    if (!(sev.minCoeff() > 1e-12 * std::max(1.0, sev.maxCoeff())))
        throw SingularSum("row-factor sum is numerically singular");
    const CMatrix s_half = es.eigenvectors() *
                           sev.cwiseSqrt().asDiagonal() *
                           es.eigenvectors().adjoint();
    const CMatrix s_half_inv = es.eigenvectors() *
                               sev.cwiseSqrt().cwiseInverse().asDiagonal() *
                               es.eigenvectors().adjoint();

    // S^{1/2} T S^{1/2} = U L^2 U^dagger fixes the congruence
    // H = L^{1/2} U^dagger S^{-1/2}; then H S H^dagger = L and
    // H^{-dagger} T H^{-1} = L.
    const auto eb = eig(s_half * t * s_half);
    Vector bev = eb.eigenvalues();
    CMatrix u = eb.eigenvectors();
    std::reverse(bev.data(), bev.data() + bev.size()); // descending
    u = u.rowwise().reverse().eval();

    Vector big_l(r);
    for (int i = 0; i < r; ++i) {
        if (!(bev(i) > 0))
            throw SingularSum("column-factor sum is numerically singular");
        big_l(i) = std::sqrt(bev(i));
        if (big_l(i) < 1e-9)
            throw SingularSum("diagonal weight below 1e-9");
    }

    const CMatrix h =
        big_l.cwiseSqrt().asDiagonal() * u.adjoint() * s_half_inv;
    const CMatrix h_inv =
        s_half * u * big_l.cwiseSqrt().cwiseInverse().asDiagonal();

    std::vector<CMatrix> cs(f.cs.size()), ds(f.ds.size());
    for (std::size_t i = 0; i < f.cs.size(); ++i) {
        CMatrix c = h * f.cs[i] * h.adjoint();
        cs[i] = (c + c.adjoint()) / 2.0;
    }
    for (std::size_t j = 0; j < f.ds.size(); ++j) {
        CMatrix d = h_inv.adjoint() * f.ds[j] * h_inv;
        ds[j] = (d + d.adjoint()) / 2.0;
    }
    return PsdFactorization::validate(r, std::move(cs), std::move(ds));
}

NoisyProtocol protocol_from_noisy_factorization(const Correlation& p,
                                                const PsdFactorization& f,
                                                double lambda) {
    if (lambda == 1.0)
        throw LambdaOne("no protocol exists at full noise");
    check_lambda_unit(lambda);
    if (!is_sum_diagonal(f))
        throw NotDiagonalized("factor sums must be one diagonal matrix");
    const FactorizationReport base = verify_psd_factorization(p, f, 1e-9);
    if (!base.pass) {
        std::ostringstream msg;
        msg << "factorization does not reproduce the correlation (residual "
            << base.max_residual << ", min eig "
            << std::min(base.min_eig_c, base.min_eig_d) << ")";
        throw FactorizationInvalid(msg.str());
    }

    const int r = f.r;
    CMatrix sum = CMatrix::Zero(r, r);
    for (const CMatrix& c : f.cs)
        sum += c;
    Vector big_l = sum.diagonal().real();
    if (big_l.minCoeff() <= 0)
        throw SingularSum("diagonal weights must be positive");
    if (std::abs(big_l.array().square().sum() - 1.0) > 1e-9)
        throw NotDiagonalized("squared diagonal weights must sum to 1");

    const Vector inv_sqrt = big_l.cwiseSqrt().cwiseInverse();

    // Effects: (1-l)^{-1} L^{-1/2} (C^T - (l/r) tr(C L^{-1}) L) L^{-1/2};
    // after the local channel this becomes L^{-1/2} C^T L^{-1/2}, so the
    // seed with Schmidt weights L reproduces tr(C_x D_y).
    auto make_effect = [&](const CMatrix& c, bool transpose) {
        double trace = 0;
        for (int i = 0; i < r; ++i)
            trace += c(i, i).real() / big_l(i);
        CMatrix e = transpose ? CMatrix(c.transpose()) : c;
        for (int i = 0; i < r; ++i)
            e(i, i) -= (lambda / r) * trace * big_l(i);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j)
                e(i, j) *= inv_sqrt(i) * inv_sqrt(j) / (1 - lambda);
        e = (e + e.adjoint()) / 2.0;
        if (min_eig(e) < -1e-9)
            throw FactorizationInvalid(
                "shifted factor condition fails at this noise strength");
        return e;
    };

    std::vector<CMatrix> ea, fb;
    ea.reserve(f.cs.size());
    fb.reserve(f.ds.size());
    for (const CMatrix& c : f.cs)
        ea.push_back(make_effect(c, true));
    for (const CMatrix& d : f.ds)
        fb.push_back(make_effect(d, false));

    CVector psi = CVector::Zero(static_cast<long>(r) * r);
    for (int k = 0; k < r; ++k)
        psi(static_cast<long>(k) * r + k) = big_l(k);
    const CMatrix seed = psi * psi.adjoint();

    return NoisyProtocol{lambda, r, DensityMatrix::validate(seed),
                         Povm::validate(ea), Povm::validate(fb)};
}

NoisyProtocol enlarge_protocol(const NoisyProtocol& base, const Vector& s,
                               const Vector& t, double lambda) {
    if (base.lambda != 0)
        throw BadLambda("base protocol must be noiseless");
    if (lambda == 1.0)
        throw LambdaOne("no protocol exists at full noise");
    check_lambda_unit(lambda);
    const int n = base.povm_a.size();
    if (s.size() != n || t.size() != n)
        throw DimensionMismatch("weight vectors must match the outcome count");
    for (const Vector* v : {&s, &t}) {
        if (v->minCoeff() <= 0)
            throw InfeasibleST("weights must be strictly positive");
        if (std::abs(v->sum() - 1.0) > 1e-9)
            throw InfeasibleST("weights must sum to 1");
    }

    const int dp = base.local_dim;
    double worst = 2.0;
    for (int x = 0; x < n; ++x)
        worst = std::max(worst,
                         base.povm_a.effect(x).trace().real() / (dp * s(x)));
    for (int y = 0; y < n; ++y)
        worst = std::max(worst,
                         base.povm_b.effect(y).trace().real() / (dp * t(y)));
    const int kappa = static_cast<int>(std::ceil(worst - 1e-12));
    const int d = dp * kappa;
    if (d > 128)
        throw BadParameter("embedded dimension exceeds the supported size");

    // Alice factors as kappa (x) d', Bob as d' (x) kappa; the fresh registers
    // start in |0> and the padding lives on their orthogonal complement.
    std::vector<CMatrix> ea(n), fb(n);
    for (int x = 0; x < n; ++x) {
        const double pad = (d * s(x) - base.povm_a.effect(x).trace().real()) /
                           (kappa - 1) / dp;
        if (pad < -1e-9)
            throw InfeasibleST("weight too small for this effect trace");
        CMatrix e = CMatrix::Zero(d, d);
        e.topLeftCorner(dp, dp) = base.povm_a.effect(x);
        for (int u = 1; u < kappa; ++u)
            for (int i = 0; i < dp; ++i)
                e(u * dp + i, u * dp + i) += std::max(pad, 0.0);
        ea[x] = e;
    }
    for (int y = 0; y < n; ++y) {
        const double pad = (d * t(y) - base.povm_b.effect(y).trace().real()) /
                           (kappa - 1) / dp;
        if (pad < -1e-9)
            throw InfeasibleST("weight too small for this effect trace");
        CMatrix f = CMatrix::Zero(d, d);
        for (int i = 0; i < dp; ++i)
            for (int j = 0; j < dp; ++j)
                f(i * kappa, j * kappa) = base.povm_b.effect(y)(i, j);
        for (int i = 0; i < dp; ++i)
            for (int v = 1; v < kappa; ++v)
                f(i * kappa + v, i * kappa + v) += std::max(pad, 0.0);
        fb[y] = f;
    }

    CMatrix seed = CMatrix::Zero(static_cast<long>(d) * d,
                                 static_cast<long>(d) * d);
    const CMatrix& sp = base.seed.matrix();
    for (int i = 0; i < dp; ++i)
        for (int j = 0; j < dp; ++j)
            for (int ip = 0; ip < dp; ++ip)
                for (int jp = 0; jp < dp; ++jp) {
                    // A index (0,i), B index (j,0)
                    const long row = static_cast<long>(i) * d + j * kappa;
                    const long col = static_cast<long>(ip) * d + jp * kappa;
                    seed(row, col) = sp(i * dp + j, ip * dp + jp);
                }

    return NoisyProtocol{lambda, d, DensityMatrix::validate(seed),
                         Povm::validate(ea), Povm::validate(fb)};
}

namespace {

double nmf_residual(const Matrix& p, const Matrix& w, const Matrix& h) {
    return (p - w * h).cwiseAbs().maxCoeff();
}

bool nmf_attempt(const Matrix& p, Matrix& w, Matrix& h, int iters, double tol) {
    const double guard = 1e-300;
    for (int it = 0; it < iters; ++it) {
        h.array() *= (w.transpose() * p).array() /
                     ((w.transpose() * w * h).array() + guard);
        w.array() *= (p * h.transpose()).array() /
                     ((w * h * h.transpose()).array() + guard);
        if (it % 50 == 49 && nmf_residual(p, w, h) <= tol)
            return true;
    }
    return nmf_residual(p, w, h) <= tol;
}

int numerical_rank(const Matrix& p) {
    Eigen::JacobiSVD<Matrix> svd(p);
    const Vector sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0)
        return 0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-10 * sv(0))
            ++rank;
    return rank;
}

} // namespace

NonnegFactorization nonneg_rank_upper(const Matrix& p, int r_max,
                                      const NonnegSearchOptions& opts) {
    if (p.rows() < 1 || p.cols() < 1)
        throw DimensionMismatch("matrix must be nonempty");
    if (p.minCoeff() < 0)
        throw NegativeEntry("matrix must be entrywise nonnegative");
    if (r_max < 1)
        throw BadParameter("size limit must be >= 1");
    const int rows = static_cast<int>(p.rows());
    const int cols = static_cast<int>(p.cols());
    const int r0 = std::max(1, numerical_rank(p));

    NonnegFactorization out{};
    out.success = false;
    for (int r = r0; r <= r_max; ++r) {
        std::mt19937_64 rng(opts.seed + static_cast<std::uint64_t>(r) * 7919);
        std::exponential_distribution<double> expo(1.0);
        const double scale = std::sqrt(std::max(p.mean(), 1e-12) / r);
        for (int restart = 0; restart < std::max(1, opts.restarts); ++restart) {
            Matrix w, h;
            if (restart == 0 && r >= std::min(rows, cols)) {
                // exact by construction when r covers one full side
                if (rows <= cols) {
                    w = Matrix::Zero(rows, r);
                    w.leftCols(rows) = Matrix::Identity(rows, rows);
                    h = Matrix::Zero(r, cols);
                    h.topRows(rows) = p;
                } else {
                    w = Matrix::Zero(rows, r);
                    w.leftCols(cols) = p;
                    h = Matrix::Zero(r, cols);
                    h.topRows(cols) = Matrix::Identity(cols, cols);
                }
            } else if (restart == 0 && r == 1) {
                w = p.rowwise().sum();
                h = p.colwise().sum();
                const double total = p.sum();
                if (total > 0)
                    h /= total;
            } else {
                w = Matrix(rows, r);
                h = Matrix(r, cols);
                for (int i = 0; i < rows; ++i)
                    for (int j = 0; j < r; ++j)
                        w(i, j) = scale * (expo(rng) + 1e-3);
                for (int i = 0; i < r; ++i)
                    for (int j = 0; j < cols; ++j)
                        h(i, j) = scale * (expo(rng) + 1e-3);
            }
            if (nmf_attempt(p, w, h, opts.iters, opts.tol)) {
                out.success = true;
                out.r = r;
                out.w = w;
                out.h = h;
                out.residual = nmf_residual(p, w, h);
                return out;
            }
        }
        out.r = r;
    }
    out.residual = std::numeric_limits<double>::infinity();
    return out;
}

int bm_nonneg_rank_lower(int m, double k) {
    make_bm(m, k); // parameter checks
    const double denom = std::cos(kPi / m) * std::cos(kPi / m);
    int best = 0;
    for (int l = 3;; ++l) {
        if (!(k > std::cos(kPi / l) / denom))
            break;
        best = l;
    }
    if (best == 0)
        return 1;
    return static_cast<int>(std::floor(std::log2(double(best)) + 1e-12)) + 1;
}

EdmRankBounds edm_rank_bounds(int m) {
    if (m < 2)
        throw BadParameter("need m >= 2");
    EdmRankBounds out;
    out.nonneg.lower = std::max(
        2, static_cast<int>(std::ceil(2 * std::sqrt(double(m)) - 2 - 1e-12)));
    out.nonneg.upper = m;
    out.nonneg.lower_method = "support-count";
    out.nonneg.upper_method = "trivial";
    out.psd.lower = 2;
    out.psd.upper = 2;
    out.psd.lower_method = "non-product";
    out.psd.upper_method = "explicit-size-2";
    if (out.nonneg.lower > out.nonneg.upper || out.psd.lower > out.psd.upper)
        throw InconsistentBounds("rank bounds crossed");
    return out;
}

} // namespace corrlab
