#include "ncstat/serialize.hpp"

#include <fstream>

#include "ncstat/entropy.hpp"

namespace ncstat {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

const Json& array_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_array()) throw FormatError(std::string("field \"") + key + "\" must be an array");
  return v;
}

Json encode_mult(const Multiplicities& c) {
  Json rows = Json::array();
  for (Eigen::Index y = 0; y < c.rows(); ++y) {
    Json row = Json::array();
    for (Eigen::Index x = 0; x < c.cols(); ++x) row.push_back(c(y, x));
    rows.push_back(std::move(row));
  }
  return rows;
}

Multiplicities decode_mult(const Json& rows, std::size_t t, std::size_t s) {
  if (!rows.is_array() || rows.size() != t) throw FormatError("mult must have one row per source block");
  Multiplicities c(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s));
  for (std::size_t y = 0; y < t; ++y) {
    if (!rows[y].is_array() || rows[y].size() != s) throw FormatError("mult rows must have one entry per target block");
    for (std::size_t x = 0; x < s; ++x)
      c(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = rows[y][x].get<int>();
  }
  return c;
}

std::vector<Matrix> decode_matrices(const Json& arr) {
  std::vector<Matrix> out;
  for (const auto& m : arr) out.push_back(decode_matrix(m));
  return out;
}

}  // namespace

Json encode(const Matrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    Json c = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      r.push_back(m(i, k).real());
      c.push_back(m(i, k).imag());
    }
    re.push_back(std::move(r));
    im.push_back(std::move(c));
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

Matrix decode_matrix(const Json& j) {
  const Json& re = array_field(j, "re");
  const Json& im = array_field(j, "im");
  const auto rows = static_cast<Eigen::Index>(re.size());
  if (im.size() != re.size()) throw FormatError("matrix re/im row counts differ");
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(re[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& r = re[static_cast<std::size_t>(i)];
    const Json& c = im[static_cast<std::size_t>(i)];
    if (!r.is_array() || !c.is_array() || static_cast<Eigen::Index>(r.size()) != cols ||
        static_cast<Eigen::Index>(c.size()) != cols)
      throw FormatError("matrix rows must all have the same length");
    for (Eigen::Index k = 0; k < cols; ++k)
      m(i, k) = Complex(r[static_cast<std::size_t>(k)].get<double>(), c[static_cast<std::size_t>(k)].get<double>());
  }
  return m;
}

Json encode(const AlgebraSpec& a) { return {{"blocks", a.block_dims()}}; }

AlgebraSpec decode_algebra(const Json& j) {
  try {
    return AlgebraSpec(array_field(j, "blocks").get<std::vector<int>>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(e.what());
  }
}

Json encode(const AlgebraElement& a) {
  Json blocks = Json::array();
  for (const auto& b : a.blocks()) blocks.push_back(encode(b));
  return {{"algebra", encode(a.algebra())}, {"blocks", std::move(blocks)}};
}

AlgebraElement decode_element(const Json& j) {
  return AlgebraElement(decode_algebra(field(j, "algebra")), decode_matrices(array_field(j, "blocks")));
}

Json encode(const State& s) {
  Json d = Json::array();
  for (const auto& m : s.densities()) d.push_back(encode(m));
  return {{"algebra", encode(s.algebra())}, {"densities", std::move(d)}};
}

State decode_state(const Json& j) {
  return State(decode_algebra(field(j, "algebra")), decode_matrices(array_field(j, "densities")));
}

Json encode(const StarHom& f) {
  Json u = Json::array();
  for (const auto& m : f.conjugators()) u.push_back(encode(m));
  return {{"source", encode(f.source())},
          {"target", encode(f.target())},
          {"mult", encode_mult(f.multiplicities())},
          {"conjugators", std::move(u)}};
}

StarHom decode_hom(const Json& j, double atol) {
  AlgebraSpec source = decode_algebra(field(j, "source"));
  AlgebraSpec target = decode_algebra(field(j, "target"));
  Multiplicities c = decode_mult(field(j, "mult"), source.num_blocks(), target.num_blocks());
  if (!j.contains("conjugators")) return StarHom::standard(std::move(source), std::move(target), std::move(c));
  return StarHom(std::move(source), std::move(target), std::move(c), decode_matrices(array_field(j, "conjugators")),
                 atol);
}

Json encode(const CPUMap& q) {
  Json comps = Json::array();
  for (std::size_t y = 0; y < q.target().num_blocks(); ++y)
    for (std::size_t x = 0; x < q.source().num_blocks(); ++x)
      comps.push_back({{"y", y}, {"x", x}, {"choi", encode(q.choi(y, x))}});
  return {{"source", encode(q.source())}, {"target", encode(q.target())}, {"components", std::move(comps)}};
}

CPUMap decode_cpu(const Json& j) {
  AlgebraSpec source = decode_algebra(field(j, "source"));
  AlgebraSpec target = decode_algebra(field(j, "target"));
  const std::size_t s = source.num_blocks();
  const std::size_t t = target.num_blocks();
  std::vector<Matrix> choi(t * s);
  for (std::size_t y = 0; y < t; ++y)
    for (std::size_t x = 0; x < s; ++x) {
      const Eigen::Index d = source.block_dim(x) * target.block_dim(y);
      choi[y * s + x] = Matrix::Zero(d, d);
    }
  for (const auto& comp : array_field(j, "components")) {
    const auto y = field(comp, "y").get<std::size_t>();
    const auto x = field(comp, "x").get<std::size_t>();
    if (y >= t || x >= s) throw FormatError("component index out of range");
    choi[y * s + x] = decode_matrix(field(comp, "choi"));
  }
  return CPUMap(std::move(source), std::move(target), std::move(choi));
}

Json encode(const NCMorphism& m) {
  return {{"kind", "morphism"},
          {"source", encode(m.source())},
          {"target", encode(m.target())},
          {"hom", encode(m.hom())},
          {"hypothesis", encode(m.hypothesis())}};
}

NCMorphism decode_morphism(const Json& j, double atol) {
  return NCMorphism(decode_state(field(j, "source")), decode_state(field(j, "target")),
                    decode_hom(field(j, "hom"), atol), decode_cpu(field(j, "hypothesis")));
}

Json encode(const AlphaFamily& a) {
  Json comps = Json::array();
  for (std::size_t y = 0; y < a.num_source_blocks(); ++y)
    for (std::size_t x = 0; x < a.num_target_blocks(); ++x)
      if (a.present(y, x)) comps.push_back({{"y", y}, {"x", x}, {"alpha", encode(a.alpha(y, x))}});
  return {{"kind", "alphas"}, {"mult", encode_mult(a.multiplicities())}, {"components", std::move(comps)}};
}

AlphaFamily decode_alphas(const Json& j) {
  const Json& rows = array_field(j, "mult");
  const std::size_t t = rows.size();
  const std::size_t s = t == 0 ? 0 : rows[0].size();
  Multiplicities c = decode_mult(rows, t, s);
  std::vector<Matrix> alphas(t * s);
  for (const auto& comp : array_field(j, "components")) {
    const auto y = field(comp, "y").get<std::size_t>();
    const auto x = field(comp, "x").get<std::size_t>();
    if (y >= t || x >= s) throw FormatError("component index out of range");
    alphas[y * s + x] = decode_matrix(field(comp, "alpha"));
  }
  return AlphaFamily(std::move(c), std::move(alphas));
}

Json encode(const ValidationReport& r) {
  Json v = Json::array();
  for (const auto& x : r.violations) v.push_back({{"kind", x.kind}, {"where", x.where}, {"residual", x.residual}});
  return {{"valid", r.valid()}, {"faithful", r.faithful}, {"violations", std::move(v)}};
}

Json encode(const LawReport& r) {
  Json laws = Json::array();
  for (const auto& s : r.laws) {
    // JSON has no infinity; an unbounded defect is written as the string "inf".
    Json defect = std::isinf(s.max_defect) ? Json("inf") : Json(s.max_defect);
    laws.push_back({{"name", s.name},
                    {"tolerance", s.tolerance},
                    {"evaluated", s.evaluated},
                    {"passed", s.passed},
                    {"skipped", s.skipped},
                    {"infinite", s.infinite},
                    {"max_defect", std::move(defect)},
                    {"failing_trials", s.failing_trials},
                    {"ok", s.ok()}});
  }
  const GeneratorConfig& c = r.config;
  return {{"kind", "law-report"},
          {"config",
           {{"seed", c.seed},
            {"trials", c.trials},
            {"max_blocks", c.max_blocks},
            {"max_block_dim", c.max_block_dim},
            {"faithful_only", c.faithful_only},
            {"atol", c.atol},
            {"cutoff", c.cutoff}}},
          {"all_passed", r.all_passed()},
          {"infinite_occurrences", r.total_infinite()},
          {"laws", std::move(laws)}};
}

std::string detect_kind(const Json& j) {
  if (!j.is_object()) throw FormatError("document must be a JSON object");
  if (j.contains("kind") && j["kind"].is_string()) return j["kind"].get<std::string>();
  if (j.contains("hom") && j.contains("hypothesis")) return "morphism";
  if (j.contains("densities")) return "state";
  if (j.contains("components") && j.contains("source")) return "cpu";
  if (j.contains("components") && j.contains("mult")) return "alphas";
  if (j.contains("mult")) return "hom";
  if (j.contains("blocks") && j.contains("algebra")) return "element";
  if (j.contains("blocks")) return "algebra";
  throw FormatError("unrecognized document");
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace ncstat
