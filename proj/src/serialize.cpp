#include "corrlab/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace corrlab {

namespace {

std::vector<double> row_major(const Matrix& m) {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(m.rows() * m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            out.push_back(m(i, j));
    return out;
}

double number_at(const Json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ParseError(std::string("missing numeric field \"") + key + "\"");
    return j[key].get<double>();
}

int int_at(const Json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer())
        throw ParseError(std::string("missing integer field \"") + key + "\"");
    return j[key].get<int>();
}

std::vector<double> numbers_at(const Json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array())
        throw ParseError(std::string("missing array field \"") + key + "\"");
    std::vector<double> out;
    out.reserve(j[key].size());
    for (const auto& v : j[key]) {
        if (!v.is_number())
            throw ParseError(std::string("non-numeric entry in \"") + key +
                             "\"");
        out.push_back(v.get<double>());
    }
    return out;
}

Vector vector_at(const Json& j, const char* key) {
    const std::vector<double> raw = numbers_at(j, key);
    Vector v(static_cast<int>(raw.size()));
    for (size_t i = 0; i < raw.size(); ++i)
        v(static_cast<int>(i)) = raw[i];
    return v;
}

} // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

Json to_json(const Correlation& p) {
    return Json{{"n", p.size()}, {"entries", row_major(p.entries())}};
}

Json to_json(const CMatrix& op) {
    const int d = static_cast<int>(op.rows());
    std::vector<double> re, im;
    re.reserve(static_cast<size_t>(d) * d);
    im.reserve(static_cast<size_t>(d) * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            re.push_back(op(i, j).real());
            im.push_back(op(i, j).imag());
        }
    return Json{{"dim", d}, {"re", re}, {"im", im}};
}

Json to_json(const PsdFactorization& f) {
    Json cs = Json::array(), ds = Json::array();
    for (const CMatrix& c : f.cs)
        cs.push_back(to_json(c));
    for (const CMatrix& d : f.ds)
        ds.push_back(to_json(d));
    return Json{{"r", f.r}, {"cs", cs}, {"ds", ds}};
}

Json to_json(const NoisyProtocol& proto) {
    Json pa = Json::array(), pb = Json::array();
    for (int i = 0; i < proto.povm_a.size(); ++i)
        pa.push_back(to_json(proto.povm_a.effect(i)));
    for (int i = 0; i < proto.povm_b.size(); ++i)
        pb.push_back(to_json(proto.povm_b.effect(i)));
    return Json{{"lambda", proto.lambda},
                {"seed", to_json(proto.seed.matrix())},
                {"povm_a", pa},
                {"povm_b", pb}};
}

Json to_json(const SimplexVector& w) {
    std::vector<double> raw(w.w.data(), w.w.data() + w.w.size());
    return Json{{"w", raw}, {"strict", w.strict}};
}

Json to_json(const FeasibilityResult& r) {
    return Json{{"feasible", r.feasible},
                {"margin", r.margin},
                {"iterations", r.iterations},
                {"s", to_json(r.s)},
                {"t", to_json(r.t)}};
}

Json to_json(const RegionEstimate& r) {
    const char* kind = r.boundary == BoundaryKind::ClosedCertified
                           ? "closed"
                           : r.boundary == BoundaryKind::OpenCertified
                                 ? "open"
                                 : "unresolved";
    return Json{{"lambda_lo", r.lambda_lo},
                {"lambda_hi", r.lambda_hi},
                {"threshold", r.threshold},
                {"boundary", kind},
                {"witness", to_json(r.witness)}};
}

Json to_json(const CostBounds& b) {
    Json out{{"lambda", b.lambda},
             {"reachable", b.reachable},
             {"lower_method", b.lower_method},
             {"upper_method", b.upper_method}};
    if (b.reachable) {
        out["lower"] = b.lower;
        if (b.upper)
            out["upper"] = *b.upper;
    }
    return out;
}

Json to_json(const AdvantageEstimate& a) {
    return Json{{"lambda", a.lambda},     {"reachable", a.reachable},
                {"r_lower", a.r_lower},   {"r_upper", a.r_upper},
                {"q_cost_lower", a.q_cost_lower},
                {"q_cost_upper", a.q_cost_upper},
                {"s_lower", a.s_lower},   {"s_upper", a.s_upper}};
}

Json certificate_json(double lambda, const FeasibilityResult& r) {
    std::vector<double> s(r.s.w.data(), r.s.w.data() + r.s.w.size());
    std::vector<double> t(r.t.w.data(), r.t.w.data() + r.t.w.size());
    return Json{{"lambda", lambda}, {"s", s}, {"t", t}, {"margin", r.margin}};
}

Correlation correlation_from_json(const Json& j) {
    const int n = int_at(j, "n");
    if (n < 1)
        throw ParseError("correlation size must be positive");
    const std::vector<double> entries = numbers_at(j, "entries");
    if (entries.size() != static_cast<size_t>(n) * n)
        throw ParseError("entry count does not match n*n");
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            m(i, k) = entries[static_cast<size_t>(i) * n + k];
    return Correlation::validate(m);
}

CMatrix cmatrix_from_json(const Json& j) {
    const int d = int_at(j, "dim");
    if (d < 1)
        throw ParseError("operator dimension must be positive");
    const std::vector<double> re = numbers_at(j, "re");
    const std::vector<double> im = numbers_at(j, "im");
    if (re.size() != static_cast<size_t>(d) * d ||
        im.size() != static_cast<size_t>(d) * d)
        throw ParseError("operator entry count does not match dim*dim");
    CMatrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            const size_t idx = static_cast<size_t>(i) * d + k;
            m(i, k) = Cx(re[idx], im[idx]);
        }
    return m;
}

PsdFactorization factorization_from_json(const Json& j) {
    PsdFactorization f;
    f.r = int_at(j, "r");
    if (f.r < 1)
        throw ParseError("factorization size must be positive");
    if (!j.contains("cs") || !j["cs"].is_array() || !j.contains("ds") ||
        !j["ds"].is_array())
        throw ParseError("factorization needs \"cs\" and \"ds\" arrays");
    for (const auto& c : j["cs"])
        f.cs.push_back(cmatrix_from_json(c));
    for (const auto& d : j["ds"])
        f.ds.push_back(cmatrix_from_json(d));
    for (const CMatrix& c : f.cs)
        if (c.rows() != f.r)
            throw ParseError("factor dimension does not match r");
    for (const CMatrix& d : f.ds)
        if (d.rows() != f.r)
            throw ParseError("factor dimension does not match r");
    return f;
}

NoisyProtocol protocol_from_json(const Json& j) {
    const double lambda = number_at(j, "lambda");
    if (!j.contains("seed"))
        throw ParseError("protocol needs a \"seed\" operator");
    const CMatrix seed = cmatrix_from_json(j["seed"]);
    if (!j.contains("povm_a") || !j["povm_a"].is_array() ||
        !j.contains("povm_b") || !j["povm_b"].is_array())
        throw ParseError("protocol needs \"povm_a\" and \"povm_b\" arrays");
    std::vector<CMatrix> ea, eb;
    for (const auto& e : j["povm_a"])
        ea.push_back(cmatrix_from_json(e));
    for (const auto& e : j["povm_b"])
        eb.push_back(cmatrix_from_json(e));
    if (ea.empty() || eb.empty())
        throw ParseError("protocol measurements must be nonempty");
    const int local =
        static_cast<int>(std::lround(std::sqrt(static_cast<double>(seed.rows()))));
    if (static_cast<Eigen::Index>(local) * local != seed.rows())
        throw ParseError("seed dimension is not a perfect square");
    try {
        return NoisyProtocol{lambda, local, DensityMatrix::validate(seed),
                             Povm::validate(ea), Povm::validate(eb)};
    } catch (const Error& e) {
        throw ParseError(std::string("bad protocol: ") + e.what());
    }
}

Certificate certificate_from_json(const Json& j) {
    Certificate c;
    c.lambda = number_at(j, "lambda");
    try {
        c.s = SimplexVector::validate(vector_at(j, "s"));
        c.t = SimplexVector::validate(vector_at(j, "t"));
    } catch (const Error& e) {
        throw ParseError(std::string("bad certificate weights: ") + e.what());
    }
    return c;
}

Json parse_json_text(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_json_text(buf.str());
}

std::string correlation_csv(const Correlation& p) {
    std::ostringstream out;
    out << "x,y,p\n";
    for (int x = 0; x < p.size(); ++x)
        for (int y = 0; y < p.size(); ++y)
            out << (x + 1) << ',' << (y + 1) << ','
                << format_double(p(x, y)) << '\n';
    return out.str();
}

Correlation correlation_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("empty correlation table");
    struct Cell {
        int x, y;
        double p;
    };
    std::vector<Cell> cells;
    int n = 0;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        Cell c;
        char tail;
        if (std::sscanf(line.c_str(), "%d,%d,%lf%c", &c.x, &c.y, &c.p,
                        &tail) != 3)
            throw ParseError("bad table row: " + line);
        if (c.x < 1 || c.y < 1)
            throw ParseError("table indices are 1-based");
        n = std::max(n, std::max(c.x, c.y));
        cells.push_back(c);
    }
    if (n == 0)
        throw ParseError("correlation table has no rows");
    if (cells.size() != static_cast<size_t>(n) * n)
        throw ParseError("correlation table is not a full square grid");
    Matrix m = Matrix::Constant(n, n, -1.0);
    for (const Cell& c : cells)
        m(c.x - 1, c.y - 1) = c.p;
    if ((m.array() < 0).any())
        throw ParseError("correlation table leaves cells unset");
    return Correlation::validate(m);
}

Correlation load_correlation_file(const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
        std::ifstream in(path);
        if (!in)
            throw ParseError("cannot open " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return correlation_from_csv(buf.str());
    }
    return correlation_from_json(load_json_file(path));
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParseError("cannot write " + path);
    out << text;
}

} // namespace corrlab
