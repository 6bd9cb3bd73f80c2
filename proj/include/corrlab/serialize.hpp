#pragma once

#include <string>

#include <json.hpp>

#include "corrlab/bounds.hpp"
#include "corrlab/correlation.hpp"
#include "corrlab/factorize.hpp"
#include "corrlab/quantum.hpp"
#include "corrlab/reach.hpp"

namespace corrlab {

using Json = nlohmann::json;

// 17 significant digits, '.' decimal point, no locale dependence
std::string format_double(double x);

Json to_json(const Correlation& p);        // {"n", "entries"} row-major
Json to_json(const CMatrix& op);           // {"dim", "re", "im"} row-major
Json to_json(const PsdFactorization& f);   // {"r", "cs", "ds"}
Json to_json(const NoisyProtocol& proto);  // {"lambda", "seed", "povm_a", "povm_b"}
Json to_json(const SimplexVector& w);
Json to_json(const FeasibilityResult& r);
Json to_json(const RegionEstimate& r);
Json to_json(const CostBounds& b);
Json to_json(const AdvantageEstimate& a);

// certificate file: {"lambda", "s", "t", "margin"}
Json certificate_json(double lambda, const FeasibilityResult& r);

Correlation correlation_from_json(const Json& j);
CMatrix cmatrix_from_json(const Json& j);
PsdFactorization factorization_from_json(const Json& j);
NoisyProtocol protocol_from_json(const Json& j);

struct Certificate {
    double lambda = 0;
    SimplexVector s, t;
};
Certificate certificate_from_json(const Json& j);

Json parse_json_text(const std::string& text);  // ParseError on bad input
Json load_json_file(const std::string& path);   // ParseError on bad input

std::string correlation_csv(const Correlation& p); // header x,y,p; 1-based
Correlation correlation_from_csv(const std::string& text);

// reads .csv as the x,y,p table and anything else as correlation JSON
Correlation load_correlation_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& text);

} // namespace corrlab
