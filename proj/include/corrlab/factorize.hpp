#ifndef CORRLAB_FACTORIZE_HPP
#define CORRLAB_FACTORIZE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "corrlab/correlation.hpp"
#include "corrlab/quantum.hpp"

namespace corrlab {

// P(x,y) = tr(C_x D_y) with C_x, D_y Hermitian positive semidefinite of
// size r.  Construction checks shapes and Hermiticity only; use the verify
// functions for the numeric contract.
struct PsdFactorization {
    int r;
    std::vector<CMatrix> cs; // one per row index x
    std::vector<CMatrix> ds; // one per column index y

    static PsdFactorization validate(int r, std::vector<CMatrix> cs,
                                     std::vector<CMatrix> ds);
};

struct FactorizationReport {
    double max_residual;  // max |P(x,y) - tr(C_x D_y)|
    double min_eig_c;     // most negative eigenvalue across the C_x
    double min_eig_d;
    bool pass;
};

FactorizationReport verify_psd_factorization(const Correlation& p,
                                             const PsdFactorization& f,
                                             double tol = 1e-9);

// Checks, on top of the exact-factorization contract, the shifted-operator
// conditions that make the factorization usable at noise strength lambda:
// with S = sum C_x and T = sum D_y,
//   C_x - (lambda/r) tr(C_x S^{-1}) S >= 0   and the same for D_y with T.
struct NoisyFactorizationReport {
    FactorizationReport base;
    double min_shift_eig_c; // most negative eigenvalue of the shifted C_x
    double min_shift_eig_d;
    double cond_sum_c;      // condition number of S
    double cond_sum_d;
    bool pass;
};

NoisyFactorizationReport verify_noisy_psd_factorization(
    const Correlation& p, const PsdFactorization& f, double lambda,
    double tol = 1e-9);

// Size-2 factorization of make_edm(alphas); requires sum(alphas) = 0.
PsdFactorization explicit_edm_factorization(const std::vector<double>& alphas);

// Size-2 factorization of make_bm(m,k) with sum C_x = sum D_y = I/sqrt(2);
// its shifted conditions hold exactly for lambda <= 1 - sqrt(k).
PsdFactorization explicit_bm_factorization(int m, double k);

// Size-3 factorization of make_am(m,k) embedding the circulant factors.
PsdFactorization explicit_am_factorization(int m, double k);

// Diagonal size-n factorization of any correlation: C_x = e_x e_x^T,
// D_y = diag of column y.  Starting point for the generic pipeline.
PsdFactorization diagonal_factorization_of(const Correlation& p);

// True when sum C_x and sum D_y are both diagonal and equal within tol.
bool is_sum_diagonal(const PsdFactorization& f, double tol = 1e-9);

// Congruence H C_x H^dagger, H^{-dagger} D_y H^{-1} with H chosen so both
// factor sums become one diagonal matrix L with tr(L^2) = tr(sum C sum D).
// All pairwise traces tr(C_x D_y) are preserved.  Throws SingularSum when a
// factor sum or an entry of L is numerically singular.
PsdFactorization diagonalize_factorization(const PsdFactorization& f);

// Measurement protocol generating exactly the factorized correlation at
// noise strength lambda, built from a diagonal-sum factorization of P that
// passes the shifted conditions at lambda.  The seed is the pure state with
// Schmidt coefficients L_kk on C^r (x) C^r.
NoisyProtocol protocol_from_noisy_factorization(const Correlation& p,
                                                const PsdFactorization& f,
                                                double lambda);

// Embeds a noiseless protocol into dimension d = local_dim * kappa with
// kappa = max(2, ceil(max_x tr(E_x)/(d' s_x), max_y tr(F_y)/(d' t_y))) so
// that every enlarged effect has trace d s_x (resp. d t_y).  The enlarged
// protocol run at noise strength lambda generates
//   Phat(x,y) + lambda s_x col(y) + lambda t_y row(x) - lambda^2 s_x t_y
// where Phat/(1-lambda)^2 is what the base protocol generates.
NoisyProtocol enlarge_protocol(const NoisyProtocol& base, const Vector& s,
                               const Vector& t, double lambda);

// Exact nonnegative factorization P ~= W H found by seeded multiplicative
// updates with deterministic and random restarts.
struct NonnegFactorization {
    bool success;
    int r;           // smallest size found, or the last size tried on failure
    Matrix w, h;     // valid when success
    double residual; // max |P - WH| for the reported factors
};

struct NonnegSearchOptions {
    double tol = 1e-10;
    int restarts = 50;
    int iters = 10000;
    std::uint64_t seed = 1;
};

NonnegFactorization nonneg_rank_upper(const Matrix& p, int r_max,
                                      const NonnegSearchOptions& opts = {});

// Largest integer l >= 3 with k > cos(pi/l)/cos^2(pi/m) certifies that no
// l-vertex polygon can nest between the two circulant-family polygons;
// returns floor(log2 l) + 1 as a lower bound on the nonnegative rank of
// make_bm(m,k), or 1 when even l = 3 fails (vacuous bound).
int bm_nonneg_rank_lower(int m, double k);

struct RankBounds {
    int lower;
    int upper;
    std::string lower_method;
    std::string upper_method;
};

struct EdmRankBounds {
    RankBounds nonneg; // nonnegative rank of make_edm on m points
    RankBounds psd;    // positive semidefinite rank
};

// Closed-form bounds for the equispaced m-point distance matrix:
// nonneg lower max(2, ceil(2 sqrt(m) - 2)), nonneg upper m, psd rank 2.
EdmRankBounds edm_rank_bounds(int m);

} // namespace corrlab

#endif
