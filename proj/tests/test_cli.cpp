// Drives the ncstat binary end to end on files written to a scratch directory.

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "ncstat/entropy.hpp"
#include "ncstat/serialize.hpp"
#include "support.hpp"

using namespace testing;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = {}) {
  const std::string cmd = env + (env.empty() ? "" : " ") + NCSTAT_CLI + std::string(" ") + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

class Scratch {
 public:
  Scratch() : dir_(fs::temp_directory_path() / ("ncstat-cli-" + std::to_string(::getpid()))) {
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  std::string put(const std::string& name, const Json& j) const {
    const std::string p = path(name);
    write_json(p, j);
    return p;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  fs::path dir_;
};

Matrix ghz() {
  Matrix m = Matrix::Zero(8, 8);
  m(0, 0) = m(0, 7) = m(7, 0) = m(7, 7) = 0.5;
  return m;
}

}  // namespace

TEST_CASE("validate") {
  Scratch s;
  SUBCASE("valid state") {
    const Run r = run("validate " + s.put("ok.json", encode(single_block(diag({0.5, 0.5})))));
    CHECK(r.status == 0);
    CHECK(r.out.find("faithful: yes") != std::string::npos);
    CHECK(r.out.find("valid") != std::string::npos);
  }
  SUBCASE("normalization violation") {
    const Run r = run("validate " + s.put("bad.json", encode(single_block(diag({0.6, 0.6})))));
    CHECK(r.status == 1);
    CHECK(r.out.find("normalization") != std::string::npos);
    CHECK(r.out.find("0.19999999999999996") != std::string::npos);
  }
  SUBCASE("morphism residuals") {
    const NCMorphism m(classical({0.5, 0.5}), single_block(diag({0.7, 0.3})), diagonal_embedding(), dephasing());
    const Run r = run("validate " + s.put("m.json", encode(m)));
    CHECK(r.status == 1);
    const auto at = r.out.find("state-compatibility residual: ");
    REQUIRE(at != std::string::npos);
    CHECK(std::stod(r.out.substr(at + 30)) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(r.out.find("left-inverse residual: 0") != std::string::npos);
  }
  SUBCASE("missing file") { CHECK(run("validate " + s.path("absent.json")).status == 2); }
}

TEST_CASE("rel-entropy") {
  Scratch s;
  const std::string half = s.put("half.json", encode(single_block(diag({0.5, 0.5}))));
  const std::string skew = s.put("skew.json", encode(single_block(diag({0.75, 0.25}))));
  const std::string pure = s.put("pure.json", encode(single_block(diag({1, 0}))));
  const Run r = run("rel-entropy " + half + " " + skew);
  CHECK(r.status == 0);
  CHECK(std::stod(r.out) == doctest::Approx(0.5 * std::log(4.0 / 3.0)).epsilon(1e-15));
  CHECK(run("rel-entropy " + half + " " + pure).out == "inf\n");
  CHECK(run("rel-entropy " + half + " " + pure + " --cutoff 1e-3").out == "inf\n");
}

TEST_CASE("re, rectify, compose") {
  Scratch s;
  Rng rng(3);
  const ComposablePair p = gen_composable_pair(rng, GeneratorConfig{});
  const std::string g = s.put("g.json", encode(p.inner));
  const std::string f = s.put("f.json", encode(p.outer));

  const double re_f = std::stod(run("re " + f).out);
  CHECK(std::abs(re_f - re_functor(p.outer).value()) < 1e-15);

  const Run rect = run("rectify " + f + " -o " + s.path("rect.json"));
  CHECK(rect.status == 0);
  const Json rj = read_json(s.path("rect.json"));
  CHECK(rj.contains("unitary"));
  const NCMorphism rm = decode_morphism(rj["morphism"]);
  CHECK(rm.hom().is_standard_form());
  CHECK(std::abs(re_functor(rm).value() - re_f) < 1e-9);

  CHECK(run("compose " + g + " " + f + " -o " + s.path("gf.json")).status == 0);
  const NCMorphism h = decode_morphism(read_json(s.path("gf.json")));
  CHECK(validate_morphism(h).valid());
  CHECK(std::abs(re_functor(h).value() - re_functor(p.inner).value() - re_f) < 1e-8);

  // Wrong order does not compose.
  CHECK(run("compose " + f + " " + g + " -o " + s.path("fg.json")).status == 1);
}

TEST_CASE("disintegrate") {
  Scratch s;
  const std::string hom = s.put("hom.json", encode(diagonal_embedding()));
  SUBCASE("success") {
    const Run r = run("disintegrate " + hom + " " + s.put("w.json", encode(single_block(diag({0.7, 0.3})))) + " -o " +
                      s.path("d.json"));
    CHECK(r.status == 0);
    const Json j = read_json(s.path("d.json"));
    CHECK(j["kind"] == "disintegration");
    CHECK(is_optimal(decode_morphism(j["morphism"])).optimal);
  }
  SUBCASE("coherent state has no disintegration") {
    const Run r = run("disintegrate " + hom + " " +
                      s.put("w.json", encode(single_block(mat({{0.7, 0.2}, {0.2, 0.3}})))) + " -o " + s.path("d.json"));
    CHECK(r.status == 1);
    CHECK(r.out.find("no disintegration") != std::string::npos);
    const Json j = read_json(s.path("d.json"));
    CHECK(j["residual"].get<double>() == doctest::Approx(0.2 * std::sqrt(2.0)));
  }
}

TEST_CASE("chain-rule") {
  Scratch s;
  const Run r = run("chain-rule " + s.put("ghz.json", encode(ghz())) + " --dims 2,2,2");
  CHECK(r.status == 0);
  CHECK(r.out.find("H(AB|C) = 0.69314718055994") != std::string::npos);
  CHECK(r.out.find("RE(total) = 2.07944154167983") != std::string::npos);
  CHECK(run("chain-rule " + s.path("ghz.json") + " --dims 2,2").status != 0);
}

TEST_CASE("check") {
  const Run ok = run("check --seed 42 --trials 20 --faithful-only");
  CHECK(ok.status == 0);
  CHECK(ok.out.find("all laws hold") != std::string::npos);

  const Run js = run("check --seed 42 --trials 5 --json --serial");
  CHECK(js.status == 0);
  const Json j = Json::parse(js.out);
  CHECK(j["config"]["seed"] == 42);
  CHECK(j["all_passed"] == true);
  CHECK(j["config"]["faithful_only"] == false);

  const Run degenerate = run("check --trials 30 --json");
  CHECK(degenerate.status == 0);
  CHECK(Json::parse(degenerate.out)["infinite_occurrences"].get<int>() > 0);

  CHECK(run("check --trials 0").status != 0);

  // An absurd tolerance from the environment makes laws fail; the flag wins over it.
  const Run env = run("check --trials 3", "NCSTAT_TOL=1e-30");
  CHECK(env.status == 1);
  CHECK(env.out.find("failing trials (seed 42)") != std::string::npos);
  CHECK(run("--tol 1e-9 check --trials 3", "NCSTAT_TOL=1e-30").status == 0);
}
