#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "corrlab/bounds.hpp"
#include "corrlab/correlation.hpp"
#include "corrlab/factorize.hpp"
#include "corrlab/families.hpp"
#include "corrlab/quantum.hpp"
#include "corrlab/reach.hpp"
#include "corrlab/serialize.hpp"
#include "corrlab/sweep.hpp"

namespace {

using namespace corrlab;

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ParseError("bad number in list: \"" + item + "\"");
        }
    }
    if (out.empty())
        throw ParseError("empty number list");
    return out;
}

Vector parse_weights(const std::string& text) {
    if (text.rfind("uniform:", 0) == 0) {
        const int n = std::atoi(text.c_str() + 8);
        if (n < 1)
            throw ParseError("bad weight list: " + text);
        return Vector::Constant(n, 1.0 / n);
    }
    const std::vector<double> raw = parse_list(text);
    Vector v(static_cast<int>(raw.size()));
    for (size_t i = 0; i < raw.size(); ++i)
        v(static_cast<int>(i)) = raw[i];
    return v;
}

Vector to_vector(const std::vector<double>& raw) {
    Vector v(static_cast<int>(raw.size()));
    for (size_t i = 0; i < raw.size(); ++i)
        v(static_cast<int>(i)) = raw[i];
    return v;
}

struct FamilySpec {
    std::string name;
    int m = 6;
    double k = 0.5;
    std::vector<double> alphas;
    std::vector<double> left, right;
    std::vector<double> schmidt;
    std::string u, v; // weight specs for the product family
    std::string path;
};

struct BuiltFamily {
    Correlation p;
    Json meta;
    FamilyKind kind = FamilyKind::Generic;
    int m = 0;
    double k = 0;
};

BuiltFamily build_family(const FamilySpec& fs) {
    if (fs.name == "edm") {
        if (fs.alphas.empty())
            throw ParseError("edm needs --alphas");
        Correlation p = make_edm(fs.alphas);
        return {p, Json{{"family", "edm"}, {"n", p.size()}},
                FamilyKind::Generic, 0, 0};
    }
    if (fs.name == "edm-mod") {
        if (fs.alphas.empty() || fs.left.empty() || fs.right.empty())
            throw ParseError("edm-mod needs --alphas, --left, --right");
        const Matrix raw = make_modified_edm(fs.alphas, to_vector(fs.left),
                                             to_vector(fs.right));
        Correlation p = Correlation::validate(normalized(raw));
        return {p,
                Json{{"family", "edm-mod"},
                     {"n", p.size()},
                     {"scale", raw.sum()}},
                FamilyKind::Generic, 0, 0};
    }
    if (fs.name == "bm") {
        Correlation p = make_bm(fs.m, fs.k);
        return {p,
                Json{{"family", "bm"},
                     {"m", fs.m},
                     {"k", fs.k},
                     {"threshold", 1 - std::sqrt(fs.k)},
                     {"min_entry", (1 - fs.k) / (fs.m * double(fs.m))}},
                FamilyKind::Bm, fs.m, fs.k};
    }
    if (fs.name == "am") {
        Correlation p = make_am(fs.m, fs.k);
        return {p,
                Json{{"family", "am"},
                     {"m", fs.m},
                     {"k", fs.k},
                     {"q", am_mixing(fs.k)}},
                FamilyKind::Am, fs.m, fs.k};
    }
    if (fs.name == "skewed-edm") {
        if (fs.alphas.empty() || fs.schmidt.empty())
            throw ParseError("skewed-edm needs --schmidt and --alphas");
        SkewedEdmFamily fam = make_skewed_edm(fs.schmidt, fs.alphas);
        return {fam.p,
                Json{{"family", "skewed-edm"},
                     {"n", fam.p.size()},
                     {"r", fam.r},
                     {"mu1", fam.mu1}},
                FamilyKind::Generic, 0, 0};
    }
    if (fs.name == "product") {
        if (fs.u.empty() || fs.v.empty())
            throw ParseError("product needs --u and --v");
        const Vector u = parse_weights(fs.u), v = parse_weights(fs.v);
        SimplexVector::validate(u);
        SimplexVector::validate(v);
        Correlation p = Correlation::validate(u * v.transpose(), 1e-12);
        return {p, Json{{"family", "product"}, {"n", p.size()}},
                FamilyKind::Generic, 0, 0};
    }
    if (fs.name == "file") {
        if (fs.path.empty())
            throw ParseError("file family needs --path");
        Correlation p = load_correlation_file(fs.path);
        return {p, Json{{"family", "file"}, {"n", p.size()}},
                FamilyKind::Generic, 0, 0};
    }
    throw ParseError("unknown family \"" + fs.name + "\"");
}

void emit_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        write_text_file(out_path, text);
}

int run_family(const FamilySpec& fs, const std::string& format,
               const std::string& out_path) {
    const BuiltFamily built = build_family(fs);
    if (format == "json") {
        Json j{{"correlation", to_json(built.p)}, {"meta", built.meta}};
        emit_text(j.dump(2) + "\n", out_path);
    } else if (format == "csv") {
        emit_text(correlation_csv(built.p), out_path);
        for (const auto& item : built.meta.items())
            std::cerr << "# " << item.key() << " = "
                      << (item.value().is_number()
                              ? format_double(item.value().get<double>())
                              : item.value().dump())
                      << "\n";
    } else {
        throw ParseError("format must be csv or json");
    }
    return 0;
}

int run_sweep_cmd(const FamilySpec& fs, const std::vector<double>& grid,
                  const SearchOptions& search, const std::string& out_path,
                  const std::string& certs_dir) {
    const BuiltFamily built = build_family(fs);
    SweepConfig config;
    config.lambdas = grid;
    config.family = built.kind;
    config.family_m = built.m;
    config.family_k = built.k;
    config.search = search;
    const SweepResult result = run_sweep(built.p, config);
    emit_text(sweep_csv(result), out_path);
    if (!certs_dir.empty()) {
        std::filesystem::create_directories(certs_dir);
        for (size_t i = 0; i < result.rows.size(); ++i) {
            const SweepRow& row = result.rows[i];
            if (!row.feasible)
                continue;
            char name[32];
            std::snprintf(name, sizeof(name), "cert_%04zu.json", i);
            write_text_file(
                (std::filesystem::path(certs_dir) / name).string(),
                certificate_json(row.lambda, row.certificate).dump(2) + "\n");
        }
    }
    return result.any_unresolved ? 4 : 0;
}

int run_verify(const std::string& corr_path, const std::string& fact_path,
               const std::string& cert_path, double lambda) {
    const Correlation p = load_correlation_file(corr_path);
    bool pass = true;
    Json report{{"n", p.size()}, {"lambda", lambda}};
    if (!fact_path.empty()) {
        const PsdFactorization f =
            factorization_from_json(load_json_file(fact_path));
        const FactorizationReport base = verify_psd_factorization(p, f);
        report["noiseless"] = Json{{"max_residual", base.max_residual},
                                   {"min_eig_c", base.min_eig_c},
                                   {"min_eig_d", base.min_eig_d},
                                   {"pass", base.pass}};
        pass = pass && base.pass;
        const NoisyFactorizationReport noisy =
            verify_noisy_psd_factorization(p, f, lambda);
        report["noisy"] = Json{{"min_shift_eig_c", noisy.min_shift_eig_c},
                               {"min_shift_eig_d", noisy.min_shift_eig_d},
                               {"cond_sum_c", noisy.cond_sum_c},
                               {"cond_sum_d", noisy.cond_sum_d},
                               {"pass", noisy.pass}};
        pass = pass && noisy.pass;
    }
    if (!cert_path.empty()) {
        const Certificate c = certificate_from_json(load_json_file(cert_path));
        const double margin = phat(p, c.lambda, c.s, c.t).minCoeff();
        const bool ok = margin >= -1e-10;
        report["certificate"] =
            Json{{"lambda", c.lambda}, {"margin", margin}, {"pass", ok}};
        pass = pass && ok;
    }
    if (fact_path.empty() && cert_path.empty())
        throw ParseError("verify needs --factorization or --certificate");
    report["pass"] = pass;
    std::cout << report.dump(2) << "\n";
    return pass ? 0 : 1;
}

bool check(bool ok, const std::string& what, std::ostream& log) {
    log << (ok ? "pass: " : "FAIL: ") << what << "\n";
    return ok;
}

int preset_polygon_threshold(const std::string& out_dir) {
    bool all = true;
    std::ostringstream csv;
    csv << "m,k,boundary,threshold_bound,shift_eig_at,shift_eig_past,"
           "region_hi,protocol_error\n";
    const std::vector<std::pair<int, double>> cases = {
        {4, 0.25}, {6, 0.5}, {8, 0.75}};
    for (const auto& [m, k] : cases) {
        const double boundary = 1 - std::sqrt(k);
        const Correlation p = make_bm(m, k);
        const PsdFactorization f = explicit_bm_factorization(m, k);
        const NoisyFactorizationReport at =
            verify_noisy_psd_factorization(p, f, boundary);
        const NoisyFactorizationReport past =
            verify_noisy_psd_factorization(p, f, boundary + 1e-6);
        const double shift_at =
            std::min(at.min_shift_eig_c, at.min_shift_eig_d);
        const double shift_past =
            std::min(past.min_shift_eig_c, past.min_shift_eig_d);
        std::ostringstream tag;
        tag << "m=" << m << " k=" << k;
        all &= check(at.pass && std::abs(shift_at) <= 1e-9,
                     tag.str() + ": factorization holds at the step point",
                     std::cout);
        all &= check(!past.pass && shift_past < 0,
                     tag.str() + ": factorization fails just past the step",
                     std::cout);
        const double ub = threshold_upper_bound(p);
        all &= check(std::abs(ub - boundary) <= 1e-9,
                     tag.str() + ": assignment bound hits the step point",
                     std::cout);
        const RegionEstimate region = estimate_region(p, 1e-4);
        all &= check(std::abs(region.lambda_hi - boundary) <= 1e-4 &&
                         region.boundary == BoundaryKind::ClosedCertified,
                     tag.str() + ": region boundary located and closed",
                     std::cout);
        const PsdFactorization fd = diagonalize_factorization(f);
        const NoisyProtocol proto =
            protocol_from_noisy_factorization(p, fd, boundary);
        const Correlation g = generated_correlation(proto);
        const double err =
            (g.entries() - p.entries()).cwiseAbs().maxCoeff();
        all &= check(proto.local_dim == 2 && err <= 1e-9,
                     tag.str() + ": dimension-2 protocol regenerates the "
                                 "distribution at the step point",
                     std::cout);
        csv << m << ',' << format_double(k) << ','
            << format_double(boundary) << ',' << format_double(ub) << ','
            << format_double(shift_at) << ',' << format_double(shift_past)
            << ',' << format_double(region.lambda_hi) << ','
            << format_double(err) << '\n';
    }
    write_text_file(
        (std::filesystem::path(out_dir) / "polygon_threshold.csv").string(),
        csv.str());
    return all ? 0 : 1;
}

int preset_spike_cost(const std::string& out_dir) {
    bool all = true;
    const int m = 8;
    const double k = 0.5;
    const double q = am_mixing(k);
    const Correlation p = make_am(m, k);
    RankBounds rank;
    {
        Eigen::JacobiSVD<Matrix> svd(p.entries());
        const Vector sv = svd.singularValues();
        int r = 0;
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) > 1e-10 * sv(0))
                ++r;
        rank.lower = std::max(1, r);
        rank.lower_method = "linear rank";
        rank.upper = p.size();
        rank.upper_method = "matrix size";
    }
    std::ostringstream csv;
    csv << "j,epsilon,lambda,certificate_margin,cost_lower,cost_upper,"
           "advantage_upper\n";
    double worst_margin = 0, prev_lower = 0, last_lower = 0;
    double ratio_min = 1e300, ratio_max = 0;
    double first_s = 0, prev_s = 1e300;
    bool lower_increasing = true, s_nonincreasing = true;
    double last_s = 0;
    for (int j = 1; j <= 10; ++j) {
        const double eps = q / std::pow(2.0, j);
        const double lam = q - eps;
        const auto st = am_boundary_certificate(m, k, eps);
        const double margin = phat(p, lam, st.first, st.second).minCoeff();
        worst_margin = std::min(worst_margin, margin);
        const CostBounds cb = am_cost_bounds(m, k, eps);
        if (j > 1 && cb.lower <= prev_lower)
            lower_increasing = false;
        prev_lower = cb.lower;
        last_lower = cb.lower;
        const double ratio = (*cb.upper / cb.lower) * std::sqrt(eps);
        ratio_min = std::min(ratio_min, ratio);
        ratio_max = std::max(ratio_max, ratio);
        const AdvantageEstimate adv = advantage_estimate(p, lam, rank, cb);
        if (j == 1)
            first_s = adv.s_upper;
        if (adv.s_upper > prev_s + 1e-12)
            s_nonincreasing = false;
        prev_s = adv.s_upper;
        last_s = adv.s_upper;
        csv << j << ',' << format_double(eps) << ',' << format_double(lam)
            << ',' << format_double(margin) << ','
            << format_double(cb.lower) << ',' << format_double(*cb.upper)
            << ',' << format_double(adv.s_upper) << '\n';
    }
    all &= check(worst_margin >= -1e-12,
                 "spike certificates stay feasible on the whole grid",
                 std::cout);
    all &= check(lower_increasing, "cost lower bound increases as the "
                                   "boundary approaches",
                 std::cout);
    all &= check(last_lower > 10,
                 "cost lower bound exceeds 10 at the finest step", std::cout);
    all &= check(ratio_max / ratio_min <= 3,
                 "bound gap tracks the inverse square root rate within a "
                 "factor 3",
                 std::cout);
    all &= check(s_nonincreasing && last_s < first_s,
                 "advantage ratio upper bound decays along the grid",
                 std::cout);
    write_text_file(
        (std::filesystem::path(out_dir) / "spike_cost.csv").string(),
        csv.str());
    return all ? 0 : 1;
}

int preset_roundtrip(const std::string& out_dir) {
    std::ostringstream csv;
    csv << "index,lambda,max_error,ok\n";
    std::mt19937_64 rng(777);
    auto uniform = [&rng] {
        return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };
    int ok_count = 0;
    const int total = 20;
    for (int i = 0; i < total; ++i) {
        Matrix raw(3, 3);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                raw(a, b) = 0.2 + uniform();
        const Correlation p = Correlation::validate(normalized(raw));
        const double ub = threshold_upper_bound(p);
        double lam_cert = 0;
        for (double f : {0.6, 0.4, 0.25, 0.1}) {
            SearchOptions so;
            so.seed = 1000 + static_cast<std::uint64_t>(i);
            if (find_feasible_st(p, f * ub, so).feasible) {
                lam_cert = f * ub;
                break;
            }
        }
        const double lam = 0.6 * lam_cert;
        SearchOptions strict;
        strict.seed = 5000 + static_cast<std::uint64_t>(i);
        strict.strict_floor = 0.05;
        FeasibilityResult cert = find_feasible_st(p, lam, strict);
        if (!cert.feasible) {
            strict.strict_floor = 0.0;
            cert = find_feasible_st(p, lam, strict);
        }
        double err = 1e300;
        bool ok = false;
        try {
            const Matrix ph = phat(p, lam, cert.s, cert.t);
            const Correlation pn = Correlation::validate(
                ph / ((1 - lam) * (1 - lam)), 1e-9);
            const PsdFactorization fd =
                diagonalize_factorization(diagonal_factorization_of(pn));
            const NoisyProtocol base =
                protocol_from_noisy_factorization(pn, fd, 0.0);
            const NoisyProtocol proto =
                enlarge_protocol(base, cert.s.w, cert.t.w, lam);
            const Correlation g = generated_correlation(proto);
            err = (g.entries() - p.entries()).cwiseAbs().maxCoeff();
            ok = err <= 1e-9;
        } catch (const Error&) {
            ok = false;
        }
        ok_count += ok ? 1 : 0;
        csv << i << ',' << format_double(lam) << ','
            << (err < 1e300 ? format_double(err) : "nan") << ','
            << (ok ? "true" : "false") << '\n';
    }
    write_text_file(
        (std::filesystem::path(out_dir) / "roundtrip.csv").string(),
        csv.str());
    std::ostringstream what;
    what << "noise embedding round trip on random distributions: " << ok_count
         << "/" << total;
    return check(ok_count == total, what.str(), std::cout) ? 0 : 1;
}

int run_reproduce(const std::string& preset, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    if (preset == "polygon-threshold")
        return preset_polygon_threshold(out_dir);
    if (preset == "spike-cost")
        return preset_spike_cost(out_dir);
    if (preset == "roundtrip")
        return preset_roundtrip(out_dir);
    throw ParseError("unknown preset \"" + preset + "\"");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"correlation generation under local depolarizing noise"};
    app.require_subcommand(1);

    FamilySpec fs;
    std::string format = "csv", out_path, certs_dir, config_path;
    std::string corr_path, fact_path, cert_path, preset, out_dir = ".";
    double lambda = 0;
    std::vector<double> lambda_list;
    double grid_start = 0, grid_stop = 0.3;
    int grid_count = 16;
    SearchOptions search;

    auto add_family_options = [&fs](CLI::App* cmd) {
        cmd->add_option("--m", fs.m, "polygon size");
        cmd->add_option("--k", fs.k, "interpolation weight in (0,1)");
        cmd->add_option("--alphas", fs.alphas,
                        "distance-matrix points (comma separated)")
            ->delimiter(',');
        cmd->add_option("--left", fs.left, "row scalings")->delimiter(',');
        cmd->add_option("--right", fs.right, "column scalings")
            ->delimiter(',');
        cmd->add_option("--schmidt", fs.schmidt,
                        "squared Schmidt coefficients, descending")
            ->delimiter(',');
        cmd->add_option("--u", fs.u, "left weights, e.g. uniform:3");
        cmd->add_option("--v", fs.v, "right weights");
        cmd->add_option("--path", fs.path, "correlation file (.csv or .json)");
    };

    CLI::App* family = app.add_subcommand("family", "construct a distribution");
    family->add_option("name", fs.name, "edm | edm-mod | bm | am | skewed-edm | product | file")
        ->required();
    add_family_options(family);
    family->add_option("--format", format, "csv | json");
    family->add_option("--out", out_path, "output file (default stdout)");

    CLI::App* sweep = app.add_subcommand("sweep", "scan noise strengths");
    sweep->add_option("--family", fs.name, "family name (see `family`)");
    add_family_options(sweep);
    CLI::Option* o_config =
        sweep->add_option("--config", config_path, "JSON config; flags win");
    CLI::Option* o_start = sweep->add_option("--start", grid_start, "first lambda");
    CLI::Option* o_stop = sweep->add_option("--stop", grid_stop, "last lambda");
    CLI::Option* o_count = sweep->add_option("--count", grid_count, "grid points");
    CLI::Option* o_list = sweep->add_option("--lambdas", lambda_list,
                                            "explicit lambda list")
                              ->delimiter(',');
    CLI::Option* o_seed = sweep->add_option("--seed", search.seed, "search seed");
    CLI::Option* o_restarts =
        sweep->add_option("--restarts", search.random_restarts,
                          "random restarts per point");
    CLI::Option* o_iters =
        sweep->add_option("--max-iters", search.max_iters,
                          "alternation sweeps per start");
    CLI::Option* o_out = sweep->add_option("--out", out_path, "CSV output file");
    CLI::Option* o_certs =
        sweep->add_option("--certs", certs_dir, "certificate directory");

    CLI::App* verify = app.add_subcommand("verify", "re-check artifacts");
    verify->add_option("--correlation", corr_path, "correlation file")
        ->required();
    verify->add_option("--factorization", fact_path, "factorization JSON");
    verify->add_option("--certificate", cert_path, "feasibility certificate JSON");
    verify->add_option("--lambda", lambda, "noise strength");

    CLI::App* reproduce =
        app.add_subcommand("reproduce", "run a reproduction preset");
    reproduce
        ->add_option("preset", preset,
                     "spike-cost | polygon-threshold | roundtrip")
        ->required();
    reproduce->add_option("--out-dir", out_dir, "artifact directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (family->parsed())
            return run_family(fs, format, out_path);
        if (sweep->parsed()) {
            if (o_config->count() > 0) {
                const Json cfg = load_json_file(config_path);
                if (cfg.contains("family")) {
                    const Json& fj = cfg["family"];
                    if (fj.contains("name") && fs.name.empty())
                        fs.name = fj["name"].get<std::string>();
                    if (fj.contains("m") && sweep->count("--m") == 0)
                        fs.m = fj["m"].get<int>();
                    if (fj.contains("k") && sweep->count("--k") == 0)
                        fs.k = fj["k"].get<double>();
                    if (fj.contains("alphas") && fs.alphas.empty())
                        fs.alphas = fj["alphas"].get<std::vector<double>>();
                    if (fj.contains("path") && fs.path.empty())
                        fs.path = fj["path"].get<std::string>();
                }
                if (cfg.contains("grid")) {
                    const Json& gj = cfg["grid"];
                    if (gj.contains("list") && o_list->count() == 0)
                        lambda_list = gj["list"].get<std::vector<double>>();
                    if (gj.contains("start") && o_start->count() == 0)
                        grid_start = gj["start"].get<double>();
                    if (gj.contains("stop") && o_stop->count() == 0)
                        grid_stop = gj["stop"].get<double>();
                    if (gj.contains("count") && o_count->count() == 0)
                        grid_count = gj["count"].get<int>();
                }
                if (cfg.contains("seed") && o_seed->count() == 0)
                    search.seed = cfg["seed"].get<std::uint64_t>();
                if (cfg.contains("restarts") && o_restarts->count() == 0)
                    search.random_restarts = cfg["restarts"].get<int>();
                if (cfg.contains("max_iters") && o_iters->count() == 0)
                    search.max_iters = cfg["max_iters"].get<int>();
                if (cfg.contains("out") && o_out->count() == 0)
                    out_path = cfg["out"].get<std::string>();
                if (cfg.contains("certs") && o_certs->count() == 0)
                    certs_dir = cfg["certs"].get<std::string>();
            }
            if (fs.name.empty())
                throw ParseError("sweep needs a family (flag or config)");
            std::vector<double> grid = lambda_list;
            if (grid.empty()) {
                if (grid_count < 1)
                    throw ParseError("grid count must be positive");
                for (int i = 0; i < grid_count; ++i)
                    grid.push_back(
                        grid_count == 1
                            ? grid_start
                            : grid_start + (grid_stop - grid_start) * i /
                                               (grid_count - 1));
            }
            return run_sweep_cmd(fs, grid, search, out_path, certs_dir);
        }
        if (verify->parsed())
            return run_verify(corr_path, fact_path, cert_path, lambda);
        if (reproduce->parsed())
            return run_reproduce(preset, out_dir);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
