#pragma once

// JSON encoding. Matrices are {"re": [[...]], "im": [[...]]} in row-major
// nesting; doubles are written in shortest round-trip form, so decode(encode(x))
// reproduces x bit for bit.

#include <string>

#include <nlohmann/json.hpp>

#include "ncstat/hypotheses.hpp"
#include "ncstat/laws.hpp"

namespace ncstat {

using Json = nlohmann::json;

/// Malformed or mistyped documents.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json encode(const Matrix& m);
Json encode(const AlgebraSpec& a);
Json encode(const AlgebraElement& a);
Json encode(const State& s);
Json encode(const StarHom& f);
Json encode(const CPUMap& q);
Json encode(const NCMorphism& m);
Json encode(const AlphaFamily& a);
Json encode(const ValidationReport& r);
Json encode(const LawReport& r);

Matrix decode_matrix(const Json& j);
AlgebraSpec decode_algebra(const Json& j);
AlgebraElement decode_element(const Json& j);
State decode_state(const Json& j);
StarHom decode_hom(const Json& j, double atol = kDefaultAtol);
CPUMap decode_cpu(const Json& j);
NCMorphism decode_morphism(const Json& j, double atol = kDefaultAtol);
AlphaFamily decode_alphas(const Json& j);

/// "algebra", "state", "hom", "cpu", "morphism" or "alphas", decided by keys
/// (an explicit "kind" field wins). Throws FormatError when nothing matches.
std::string detect_kind(const Json& j);

Json read_json(const std::string& path);
void write_json(const std::string& path, const Json& j);

}  // namespace ncstat
