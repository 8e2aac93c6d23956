#include "experiment.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

using namespace steklov;
using namespace steklov::app;

namespace {

struct Process {
  int status = -1;
  std::string out;
};

Process run_cli(const std::string& args) {
  const std::string cmd = std::string(STEKLOV_CLI_PATH) + " " + args + " 2>/dev/null";
  Process p;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return p;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), f)) > 0) p.out.append(buf.data(), n);
  const int st = pclose(f);
  p.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return p;
}

}  // namespace

TEST(Cli, ParsersAcceptDocumentedForms) {
  EXPECT_EQ(parse_domain("disk").kind, DomainSpec::Kind::disk);
  EXPECT_DOUBLE_EQ(parse_domain("annulus:0.3").parameter, 0.3);
  EXPECT_DOUBLE_EQ(parse_domain("moebius:0.2").parameter, 0.2);
  EXPECT_EQ(*parse_domain("ellipse:2").shape->ellipse_q, 2.0);
  EXPECT_THROW(parse_domain("torus"), SchemaError);
  EXPECT_THROW(parse_domain("annulus:2"), std::invalid_argument);

  const auto w = parse_weight("fourier:1,0.2,0.1", DomainSpec::disk(), 1);
  EXPECT_DOUBLE_EQ(w.components[0].a0, 1.0);
  EXPECT_DOUBLE_EQ(w.components[0].a(1), 0.2);
  EXPECT_DOUBLE_EQ(w.components[0].b(1), 0.1);
  EXPECT_EQ(parse_weight("const:1|const:2", DomainSpec::annulus(0.5), 1).size(), 2u);
  EXPECT_EQ(parse_weight("const:1", DomainSpec::annulus(0.5), 1).size(), 2u);  // broadcast
  EXPECT_THROW(parse_weight("const:1|const:1|const:1", DomainSpec::annulus(0.5), 1), SchemaError);
  const auto r1 = parse_weight("random:4:0.3", DomainSpec::disk(), 9), r2 = parse_weight("random:4:0.3", DomainSpec::disk(), 9);
  EXPECT_EQ(r1.components[0].cos, r2.components[0].cos);

  EXPECT_EQ(parse_functional("Hst:2,3").kind, FunctionalSpec::Kind::hst);
  EXPECT_EQ(parse_functional("Fmn:1,2").n, 2);
  EXPECT_THROW(parse_functional("HtPlus"), SchemaError);

  const auto g = parse_grid(json("0.1:0.5:0.2"));
  ASSERT_EQ(g.size(), 3u);
  EXPECT_NEAR(g[2], 0.5, 1e-15);
  EXPECT_EQ(parse_grid(json("[0.1, 0.3]")).size(), 2u);
  EXPECT_EQ(parse_grid(json("0.1,0.2,0.4")).size(), 3u);
}

TEST(Cli, ResolveLayersDefaultsFileAndFlags) {
  const json file = {{"parameters", {{"domain", "annulus:0.4"}, {"k", 5}}}, {"seed", 7}};
  const auto cfg = resolve("spectrum", file, {{"degree", "20"}, {"format", "json"}});
  EXPECT_EQ(cfg.parameters["domain"], "annulus:0.4");
  EXPECT_EQ(cfg.parameters["k"], 5);
  EXPECT_EQ(cfg.parameters["degree"], 20);
  EXPECT_EQ(cfg.parameters["weight"], "const:1");
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.output.format, "json");

  EXPECT_THROW(resolve("spectrum", json{{"bogus", 1}}, {}), SchemaError);
  EXPECT_THROW(resolve("spectrum", json::object(), {{"k", "2.5"}}), SchemaError);
  EXPECT_THROW(resolve("nope", json::object(), {}), SchemaError);
  EXPECT_THROW(resolve("spectrum", json::object(), {{"format", "xml"}}), SchemaError);
  EXPECT_EQ(resolve("sweep", json::object(), {{"rho-grid", "0.1,0.2"}}).parameters["grid"].size(), 2u);
}

TEST(Cli, DocumentEchoesConfiguration) {
  const auto cfg = resolve("spectrum", json::object(), {});
  const auto res = run(cfg);
  const json doc = to_document(cfg, res);
  EXPECT_EQ(doc["version"], version());
  EXPECT_EQ(doc["command"], "spectrum");
  EXPECT_EQ(doc["seed"], 1);
  EXPECT_EQ(doc["parameters"], cfg.parameters);
  ASSERT_EQ(doc["rows"].size(), 7u);
  EXPECT_NEAR(doc["rows"][1][2].get<double>(), two_pi, 1e-12);
  const std::string csv = to_csv(cfg, res);
  EXPECT_NE(csv.find("# steklov " + version()), std::string::npos);
  EXPECT_NE(csv.find("# parameters"), std::string::npos);
}

TEST(Cli, BinaryOutputIsReproducible) {
  const auto a = run_cli("spectrum --domain annulus:0.5 --weight random:6:0.4 --seed 3 --format json");
  const auto b = run_cli("spectrum --domain annulus:0.5 --weight random:6:0.4 --seed 3 --format json");
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  const json doc = json::parse(a.out);
  EXPECT_EQ(doc["seed"], 3);
  const auto c = run_cli("spectrum --domain annulus:0.5 --weight random:6:0.4 --seed 4 --format json");
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("spectrum --domain annulus:2").status, 2);
  EXPECT_EQ(run_cli("spectrum --k 2.5").status, 2);
  EXPECT_EQ(run_cli("spectrum --config /nonexistent/config.json").status, 4);
  EXPECT_EQ(run_cli("union --attach const:1").status, 0);
}

TEST(Cli, ConfigFileRoundTrip) {
  const std::string path = ::testing::TempDir() + "steklov_cfg.json";
  {
    std::ofstream f(path);
    f << R"({"command": "union", "parameters": {"attach": "const:1;const:1", "k": 6}, "seed": 5})";
  }
  const auto p = run_cli("union --config " + path + " --format json");
  ASSERT_EQ(p.status, 0);
  const json doc = json::parse(p.out);
  EXPECT_EQ(doc["parameters"]["k"], 6);
  EXPECT_EQ(doc["seed"], 5);
  // Base disk plus two attached disks: three zero eigenvalues.
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(doc["rows"][k][1].get<double>(), 0.0, 1e-12);
  EXPECT_NEAR(doc["rows"][3][1].get<double>(), 1.0, 1e-12);
}
