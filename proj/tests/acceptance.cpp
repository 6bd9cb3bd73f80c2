// Acceptance checks, one line per criterion.  argv[1] is the CLI binary;
// criteria that exercise the command line shell out to it, the rest run
// in-process.  Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "corrlab/bounds.hpp"
#include "corrlab/correlation.hpp"
#include "corrlab/factorize.hpp"
#include "corrlab/families.hpp"
#include "corrlab/quantum.hpp"
#include "corrlab/reach.hpp"

using namespace corrlab;
namespace fs = std::filesystem;

namespace {

std::string g_cli;
fs::path g_work;
int g_failures = 0;

void report(int criterion, const std::string& name, bool ok,
            const std::string& detail = "") {
    if (ok) {
        std::cout << "pass: criterion " << criterion << " " << name << "\n";
    } else {
        std::cout << "FAIL: criterion " << criterion << " " << name;
        if (!detail.empty())
            std::cout << " (" << detail << ")";
        std::cout << "\n";
        ++g_failures;
    }
}

// Runs the CLI, captures output, returns the exit status (-1 on spawn
// trouble) and the elapsed seconds.
int run_cli(const std::string& args, const std::string& log_name,
            double* seconds) {
    const fs::path log = g_work / log_name;
    const std::string cmd =
        "\"" + g_cli + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const auto t0 = std::chrono::steady_clock::now();
    const int raw = std::system(cmd.c_str());
    const auto t1 = std::chrono::steady_clock::now();
    if (seconds)
        *seconds = std::chrono::duration<double>(t1 - t0).count();
    if (raw < 0)
        return -1;
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Correlation random_correlation(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix m(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            m(x, y) = 0.05 + u(rng);
    return Correlation::validate(normalized(m));
}

SimplexVector random_weights(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector w(n);
    for (int i = 0; i < n; ++i)
        w(i) = 0.1 + u(rng);
    w /= w.sum();
    return SimplexVector::validate(w);
}

void preset_criterion(int criterion, const std::string& name,
                      const std::string& preset, double budget_s) {
    const fs::path out = g_work / preset;
    fs::create_directories(out);
    double elapsed = 0;
    const int status = run_cli("reproduce " + preset + " --out-dir \"" +
                                   out.string() + "\"",
                               preset + ".log", &elapsed);
    std::ostringstream detail;
    detail << "exit " << status << ", " << elapsed << "s, log "
           << (g_work / (preset + ".log")).string();
    report(criterion, name, status == 0 && elapsed < budget_s, detail.str());
}

void criterion_4_residual_derivative() {
    std::mt19937_64 rng(40404);
    std::uniform_real_distribution<double> lam(0.0, 0.95);
    bool ok = true;
    std::string detail;
    int feasible_seen = 0;
    for (int trial = 0; trial < 200 && ok; ++trial) {
        const int n = 2 + trial % 3;
        Correlation p = random_correlation(n, rng);
        SimplexVector s = random_weights(n, rng);
        SimplexVector t = random_weights(n, rng);
        // Half the draws stay near zero noise so entrywise-feasible pairs
        // appear; the slope cap only applies to those.
        const double lambda = (trial % 2 == 0) ? 0.05 * lam(rng) : lam(rng);
        Matrix ph = phat(p, lambda, s, t);
        Matrix d = phat_lambda_derivative(p, lambda, s, t);
        const double want_total = (1 - lambda) * (1 - lambda);
        if (std::abs(ph.sum() - want_total) > 1e-12) {
            ok = false;
            detail = "total mass drifted at trial " + std::to_string(trial);
            break;
        }
        const double h = 1e-6;
        Matrix fd =
            (phat(p, lambda + h, s, t) - phat(p, lambda - h, s, t)) / (2 * h);
        if ((d - fd).cwiseAbs().maxCoeff() > 1e-6) {
            ok = false;
            detail = "finite difference mismatch at trial " +
                     std::to_string(trial);
            break;
        }
        if (ph.minCoeff() >= 0) {
            ++feasible_seen;
            if (d.maxCoeff() > 1e-10) {
                ok = false;
                detail = "positive slope at a feasible pair, trial " +
                         std::to_string(trial);
            }
        }
    }
    if (ok && feasible_seen < 30) {
        ok = false;
        detail = "only " + std::to_string(feasible_seen) +
                 " feasible pairs sampled";
    }
    report(4, "residual derivative stays nonpositive", ok, detail);
}

double brute_threshold(const Correlation& p) {
    const int n = p.size();
    const auto marg = marginals(p);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0;
    do {
        double sum = 0;
        for (int x = 0; x < n; ++x)
            sum += std::sqrt(std::max(
                0.0, marg.first(x) * marg.second(perm[x]) - p(x, perm[x])));
        best = std::max(best, sum);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return 1.0 - best;
}

void criterion_5_threshold() {
    std::mt19937_64 rng(50505);
    bool ok = true;
    std::string detail;
    for (int trial = 0; trial < 100 && ok; ++trial) {
        const int n = (trial % 2 == 0) ? 3 : 4;
        Correlation p = random_correlation(n, rng);
        const double fast = threshold_upper_bound(p);
        const double slow = brute_threshold(p);
        if (std::abs(fast - slow) > 1e-12) {
            ok = false;
            detail = "assignment bound disagrees at trial " +
                     std::to_string(trial);
        }
    }
    // Any certified-feasible noise strength must respect the bound.
    for (int trial = 0; trial < 20 && ok; ++trial) {
        const int n = 2 + trial % 3;
        Correlation p = random_correlation(n, rng);
        const double bound = threshold_upper_bound(p);
        for (double lambda : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            FeasibilityResult r = find_feasible_st(p, lambda);
            if (r.feasible && lambda > bound + 1e-12) {
                ok = false;
                detail = "feasible past the threshold bound at trial " +
                         std::to_string(trial);
                break;
            }
        }
    }
    report(5, "threshold bound matches enumeration and caps feasibility", ok,
           detail);
}

void criterion_6_factorizations() {
    bool ok = true;
    std::string detail;
    auto fail = [&](const std::string& why) {
        if (ok) {
            ok = false;
            detail = why;
        }
    };

    for (const auto& alphas :
         {std::vector<double>{-1, 0, 1},
          std::vector<double>{-1.5, -0.5, 0.5, 1.5},
          std::vector<double>{-2, -1, 0, 1, 2}}) {
        Correlation p = make_edm(alphas);
        FactorizationReport rep =
            verify_psd_factorization(p, explicit_edm_factorization(alphas),
                                     1e-10);
        if (!rep.pass || rep.max_residual > 1e-10)
            fail("distance-matrix factorization residual");
    }

    const std::pair<int, double> polys[] = {{4, 0.25}, {6, 0.5}, {8, 0.75}};
    for (const auto& [m, k] : polys) {
        Correlation p = make_bm(m, k);
        PsdFactorization f = explicit_bm_factorization(m, k);
        if (!verify_psd_factorization(p, f, 1e-10).pass)
            fail("polygon factorization residual");
        CMatrix sum_c = CMatrix::Zero(2, 2);
        for (const CMatrix& c : f.cs)
            sum_c += c;
        if ((sum_c - CMatrix::Identity(2, 2) / std::sqrt(2.0))
                .cwiseAbs()
                .maxCoeff() > 1e-10)
            fail("polygon factor sum is not I/sqrt(2)");
    }

    for (const auto& [m, k] : {std::pair<int, double>{6, 0.5}, {8, 0.5}}) {
        Correlation p = make_am(m, k);
        if (!verify_psd_factorization(p, explicit_am_factorization(m, k),
                                      1e-10)
                 .pass)
            fail("bordered factorization residual");
    }

    // Balancing 50 random factorizations: pairwise traces survive and the
    // common diagonal sum has unit squared trace.
    std::mt19937_64 rng(60606);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 50 && ok; ++trial) {
        const int n = 3 + trial % 2;
        const int r = 2 + trial % 3;
        auto random_psd = [&]() {
            CMatrix a(r, r);
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j)
                    a(i, j) = Cx(g(rng), g(rng));
            return CMatrix(a * a.adjoint() + 1e-6 * CMatrix::Identity(r, r));
        };
        std::vector<CMatrix> cs, ds;
        for (int x = 0; x < n; ++x)
            cs.push_back(random_psd());
        for (int y = 0; y < n; ++y)
            ds.push_back(random_psd());
        PsdFactorization f = PsdFactorization::validate(r, cs, ds);
        Matrix gram(n, n);
        double total = 0;
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) {
                gram(x, y) = (f.cs[x] * f.ds[y]).trace().real();
                total += gram(x, y);
            }
        for (auto& c : f.cs)
            c /= total;
        gram /= total;
        PsdFactorization d = diagonalize_factorization(f);
        if (!is_sum_diagonal(d, 1e-8))
            fail("balanced sums are not diagonal");
        double tr2 = 0;
        CMatrix sum_c = CMatrix::Zero(r, r);
        for (const CMatrix& c : d.cs)
            sum_c += c;
        for (int i = 0; i < r; ++i)
            tr2 += std::norm(sum_c(i, i));
        if (std::abs(tr2 - 1.0) > 1e-9)
            fail("squared diagonal trace drifted");
        for (int x = 0; x < n && ok; ++x)
            for (int y = 0; y < n && ok; ++y)
                if (std::abs((d.cs[x] * d.ds[y]).trace().real() -
                             gram(x, y)) > 1e-9)
                    fail("pairwise trace changed under balancing");
    }

    report(6, "explicit factorizations and balancing identities", ok, detail);
}

void criterion_7_ranks() {
    bool ok = true;
    std::string detail;
    auto fail = [&](const std::string& why) {
        if (ok) {
            ok = false;
            detail = why;
        }
    };

    // Distance matrices admit a certified size-2 factorization at any m.
    for (const auto& alphas :
         {std::vector<double>{-1, 0, 1},
          std::vector<double>{-4, -3, -2, -1, 0, 1, 2, 3, 4}}) {
        Correlation p = make_edm(alphas);
        PsdFactorization f = explicit_edm_factorization(alphas);
        if (f.r != 2 || !verify_psd_factorization(p, f, 1e-10).pass)
            fail("distance-matrix seed dimension");
        if (edm_rank_bounds(static_cast<int>(alphas.size())).psd.upper != 2)
            fail("distance-matrix psd bound");
    }

    // Bordered family: certified size 3.
    PsdFactorization fa = explicit_am_factorization(8, 0.5);
    if (fa.r != 3 || !verify_psd_factorization(make_am(8, 0.5), fa, 1e-10).pass)
        fail("bordered seed dimension");

    // Wide polygon family: nonnegative rank at least 3 against a certified
    // 2-dimensional quantum seed.
    if (bm_nonneg_rank_lower(8, 0.9) < 3)
        fail("polygon nonnegative rank bound");
    PsdFactorization fb = explicit_bm_factorization(8, 0.9);
    if (fb.r != 2 || !verify_psd_factorization(make_bm(8, 0.9), fb, 1e-10).pass)
        fail("polygon quantum seed dimension");

    report(7, "rank separations", ok, detail);
}

void criterion_8_determinism() {
    const fs::path a = g_work / "sweep_a.csv";
    const fs::path b = g_work / "sweep_b.csv";
    const std::string args =
        "sweep --family bm --m 6 --k 0.5 --start 0 --stop 0.35 --count 30 "
        "--seed 42 --out ";
    double t = 0;
    const int s1 = run_cli(args + "\"" + a.string() + "\"", "sweep_a.log", &t);
    const int s2 = run_cli(args + "\"" + b.string() + "\"", "sweep_b.log", &t);
    bool ok = s1 == 0 && s2 == 0;
    std::string detail = "exit " + std::to_string(s1) + "/" +
                         std::to_string(s2);
    if (ok) {
        std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
        std::stringstream ba, bb;
        ba << fa.rdbuf();
        bb << fb.rdbuf();
        ok = !ba.str().empty() && ba.str() == bb.str();
        if (!ok)
            detail = "outputs differ between runs";
    }
    report(8, "repeated sweeps are byte-identical", ok, detail);
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <path-to-cli>\n";
        return 2;
    }
    g_cli = argv[1];
    g_work = fs::temp_directory_path() / "corrlab_acceptance";
    std::error_code ec;
    fs::remove_all(g_work, ec);
    fs::create_directories(g_work);

    preset_criterion(1, "polygon boundary factorizations", "polygon-threshold",
                     5.0);
    preset_criterion(2, "bordered-family cost growth", "spike-cost", 5.0);
    preset_criterion(3, "random roundtrips", "roundtrip", 60.0);
    criterion_4_residual_derivative();
    criterion_5_threshold();
    criterion_6_factorizations();
    criterion_7_ranks();
    criterion_8_determinism();

    if (g_failures > 0) {
        std::cout << g_failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
