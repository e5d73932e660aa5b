#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "document.hpp"

namespace fs = std::filesystem;
using cktool::Json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "coherence-kit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cktool::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("ck_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, RegionMembership) {
  auto r = cli({"region", "--class", "io", "--from", "0,1", "--to", "0.5,0.5"});
  EXPECT_EQ(r.code, 0);
  auto j = Json::parse(r.out);
  EXPECT_TRUE(j["verdict"].get<bool>());
  EXPECT_EQ(j["binding_constraint"], "Ellipse");

  r = cli({"region", "--class", "cpo", "--from", "0.5,0.3", "--to", "0.3,0.5"});
  EXPECT_EQ(r.code, 3);
  EXPECT_TRUE(r.err.empty());
  EXPECT_FALSE(Json::parse(r.out)["verdict"].get<bool>());

  r = cli({"region", "--class", "pio", "--from", "0.5,0.6", "--to", "0.9,0.3"});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(Json::parse(r.out)["binding_constraint"], "HexagonEdge");
  EXPECT_TRUE(Json::parse(r.out).contains("edge_index"));
}

TEST_F(CliTest, RegionBoundaryCsv) {
  auto r = cli({"region", "--class", "io", "--from", "0,1", "--boundary", "360", "--format", "csv"});
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "z,r");
  int rows = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const double z = std::stod(line.substr(0, comma)), rr = std::stod(line.substr(comma + 1));
    EXPECT_NEAR(z * z + rr * rr, 1.0, 1e-12);
    ++rows;
  }
  EXPECT_EQ(rows, 360);
}

TEST_F(CliTest, RegionBoundaryJsonAndFile) {
  ASSERT_EQ(cli({"region", "--class", "pio", "--from", "0.5,0.6", "--boundary", "12", "--out", path("b.json")}).code, 0);
  auto j = Json::parse(slurp(path("b.json")));
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j.size(), 12u);
  auto r = cli({"region", "--class", "cpo", "--from", "0.5,0.3", "--boundary", "1"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(Json::parse(r.out).size(), 4u);
}

TEST_F(CliTest, RegionUsageAndInputErrors) {
  EXPECT_EQ(cli({"region", "--class", "io", "--from", "0,1"}).code, 1);
  EXPECT_EQ(cli({"region", "--class", "mio", "--from", "0,1", "--to", "0,0"}).code, 1);
  EXPECT_EQ(cli({"region", "--class", "io", "--from", "0,1", "--to", "0,0", "--boundary", "4"}).code, 1);
  EXPECT_EQ(cli({"region", "--class", "io", "--from", "0.9,0.9", "--to", "0,0"}).code, 2);
  EXPECT_EQ(cli({"region", "--class", "io", "--from", "abc", "--to", "0,0"}).code, 2);
  EXPECT_EQ(cli({"region", "--class", "io", "--from", "0,1,2,3", "--to", "0,0"}).code, 2);
  EXPECT_EQ(cli({"region", "--class", "io", "--from", "0.5,0", "--boundary", "8"}).code, 2);
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST_F(CliTest, SynthVerifyApplyPipeline) {
  ASSERT_EQ(cli({"synth", "--class", "io", "--from", "0,1", "--to", "0.5,0.5", "--out", path("ex1.json")}).code, 0);
  const auto doc = Json::parse(slurp(path("ex1.json")));
  EXPECT_EQ(doc["format_version"], "1");
  EXPECT_EQ(doc["solution"]["case"], 2);
  const double s6 = std::sqrt(6.0);
  EXPECT_NEAR(doc["kraus"][0][0][0][0].get<double>(), std::sqrt(0.75 + 0.5 / s6), 1e-12);
  EXPECT_NEAR(doc["kraus"][1][1][0][0].get<double>(), -std::sqrt(0.25 - 0.5 / s6), 1e-12);

  auto r = cli({"verify", "--channel", path("ex1.json")});
  ASSERT_EQ(r.code, 0);
  auto rep = Json::parse(r.out);
  EXPECT_TRUE(rep["trace_preserving"].get<bool>());
  EXPECT_EQ(rep["class"], "SIO");

  r = cli({"apply", "--channel", path("ex1.json"), "--state", "0,1"});
  ASSERT_EQ(r.code, 0);
  auto out = Json::parse(r.out)["output"];
  EXPECT_NEAR(out[0].get<double>(), 0.5, 1e-10);
  EXPECT_NEAR(out[1].get<double>(), 0.5, 1e-10);
}

TEST_F(CliTest, SynthRoundTripsForEveryClass) {
  struct Case {
    std::string cls, from, to;
    double z, r;
  };
  for (const auto& c : std::vector<Case>{{"io", "0.577350269189626,0.816496580927726", "0.7071067811865476,0.7071067811865476",
                                          0.7071067811865476, 0.7071067811865476},
                                         {"io", "0.2,0.6,1.3", "-0.3,0.2,2.0", -0.3, 0.2},
                                         {"cpo", "0.5,0.3", "-0.5,0.3", -0.5, 0.3},
                                         {"pio", "0.5,0.6", "0,0.6", 0.0, 0.6},
                                         {"pio", "0.3,0.5", "0.1,0.2", 0.1, 0.2}}) {
    const auto file = path("s.json");
    ASSERT_EQ(cli({"synth", "--class", c.cls, "--from", c.from, "--to", c.to, "--out", file}).code, 0) << c.cls;
    ASSERT_EQ(cli({"verify", "--channel", file}).code, 0);
    auto r = cli({"apply", "--channel", file, "--state", c.from});
    ASSERT_EQ(r.code, 0);
    auto out = Json::parse(r.out)["output"];
    EXPECT_NEAR(out[0].get<double>(), c.z, 1e-10) << c.cls << " " << c.to;
    EXPECT_NEAR(out[1].get<double>(), c.r, 1e-10) << c.cls << " " << c.to;
  }
  const auto doc = Json::parse(slurp(path("s.json")));
  ASSERT_TRUE(doc.contains("mixture"));
  EXPECT_LE(doc["mixture"].size(), 3u);
}

TEST_F(CliTest, SynthCpoSwap) {
  auto r = cli({"synth", "--class", "cpo", "--from", "0.5,0.3", "--to", "-0.5,0.3"});
  ASSERT_EQ(r.code, 0);
  auto doc = Json::parse(r.out);
  ASSERT_EQ(doc["kraus"].size(), 1u);
  EXPECT_EQ(doc["kraus"][0][0][1][0].get<double>(), 1.0);
  EXPECT_EQ(doc["kraus"][0][1][0][0].get<double>(), 1.0);
}

TEST_F(CliTest, SynthUnreachable) {
  auto r = cli({"synth", "--class", "io", "--from", "0.6,0.4", "--to", "0.9,0.3"});
  EXPECT_EQ(r.code, 3);
  EXPECT_TRUE(r.err.empty());
  EXPECT_FALSE(Json::parse(r.out)["reachable"].get<bool>());
  EXPECT_EQ(cli({"synth", "--class", "io", "--from", "0.6,0", "--to", "0.2,0.1"}).code, 3);
  EXPECT_EQ(cli({"synth", "--class", "io", "--from", "2,0", "--to", "0.2,0.1"}).code, 2);
}

TEST_F(CliTest, ConvertSio) {
  const double h = 1 / std::sqrt(2.0);
  cktool::ChannelDocument in;
  in.kraus = {ck_matrix{{{{h, 0}, {h, 0}}, {{0, 0}, {0, 0}}}}, ck_matrix{{{{0, 0}, {0, 0}}, {{h, 0}, {-h, 0}}}}};
  std::ostringstream ss;
  cktool::write_json(ss, cktool::to_json(in));
  spit(path("m.json"), ss.str());

  auto r = cli({"convert-sio", "--channel", path("m.json"), "--state", "0.2,0.6", "--out", path("sio.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = Json::parse(slurp(path("sio.json")));
  const auto a = doc["solution"]["a"];
  EXPECT_NEAR(a[0].get<double>() * a[0].get<double>() + a[1].get<double>() * a[1].get<double>(), 0.8, 1e-12);
  EXPECT_NEAR(doc["solution"]["h1"].get<double>(), 1.6, 1e-12);

  auto v = cli({"verify", "--channel", path("sio.json")});
  EXPECT_EQ(v.code, 0);
  const auto cls = Json::parse(v.out)["class"].get<std::string>();
  EXPECT_TRUE(cls == "SIO" || cls == "PIO" || cls == "CPO") << cls;

  auto before = Json::parse(cli({"apply", "--channel", path("m.json"), "--state", "0.2,0.6"}).out)["output"];
  auto after = Json::parse(cli({"apply", "--channel", path("sio.json"), "--state", "0.2,0.6"}).out)["output"];
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(before[i].get<double>(), after[i].get<double>(), 1e-10);
}

TEST_F(CliTest, ConvertSioPassThroughAndErrors) {
  spit(path("d.json"), R"({"format_version":"1","kraus":[[[[1,0],[0,0]],[[0,0],[0,0]]],[[[0,0],[0,0]],[[0,0],[1,0]]]]})");
  auto r = cli({"convert-sio", "--channel", path("d.json"), "--state", "0.3,0.5"});
  ASSERT_EQ(r.code, 0);
  auto doc = Json::parse(r.out);
  EXPECT_FALSE(doc["solution"]["converted"].get<bool>());
  EXPECT_EQ(doc["kraus"], Json::parse(slurp(path("d.json")))["kraus"]);

  spit(path("h.json"), R"({"format_version":"1","kraus":[[[[0.7071067811865476,0],[0.7071067811865476,0]],[[0.7071067811865476,0],[-0.7071067811865476,0]]]]})");
  r = cli({"convert-sio", "--channel", path("h.json"), "--state", "0,1"});
  EXPECT_EQ(r.code, 4);
  spit(path("bad.json"), R"({"format_version":"1","kraus":[[[1,0],[0,1]]]})");
  EXPECT_EQ(cli({"convert-sio", "--channel", path("bad.json"), "--state", "0,1"}).code, 2);
  spit(path("inc.json"), R"({"format_version":"1","kraus":[[[[0.5,0],[0,0]],[[0,0],[1,0]]]]})");
  EXPECT_EQ(cli({"convert-sio", "--channel", path("inc.json"), "--state", "0,1"}).code, 5);
  EXPECT_EQ(cli({"convert-sio", "--channel", path("missing.json"), "--state", "0,1"}).code, 2);
}

TEST_F(CliTest, VerifyReports) {
  spit(path("id.json"), R"({"format_version":"1","kraus":[[[[1,0],[0,0]],[[0,0],[1,0]]]]})");
  auto r = cli({"verify", "--channel", path("id.json")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(Json::parse(r.out)["class"], "CPO");

  spit(path("inc.json"), R"({"format_version":"1","kraus":[[[[0.5,0],[0,0]],[[0,0],[1,0]]]]})");
  r = cli({"verify", "--channel", path("inc.json")});
  EXPECT_EQ(r.code, 5);
  EXPECT_FALSE(Json::parse(r.out)["trace_preserving"].get<bool>());

  spit(path("h.json"), R"({"format_version":"1","kraus":[[[[0.7071067811865476,0],[0.7071067811865476,0]],[[0.7071067811865476,0],[-0.7071067811865476,0]]]]})");
  EXPECT_EQ(cli({"verify", "--channel", path("h.json")}).code, 4);

  spit(path("v2.json"), R"({"format_version":"2","kraus":[[[[1,0],[0,0]],[[0,0],[1,0]]]]})");
  EXPECT_EQ(cli({"verify", "--channel", path("v2.json")}).code, 2);
  spit(path("junk.json"), "not json");
  EXPECT_EQ(cli({"verify", "--channel", path("junk.json")}).code, 2);
  spit(path("str.json"), R"({"format_version":"1","kraus":[[[["1",0],[0,0]],[[0,0],[1,0]]]]})");
  EXPECT_EQ(cli({"verify", "--channel", path("str.json")}).code, 2);
}

TEST_F(CliTest, SampleDeterminism) {
  ASSERT_EQ(cli({"sample", "--from", "0.3,0.5", "--n", "2000", "--seed", "7", "--out", path("a.csv")}).code, 0);
  ASSERT_EQ(cli({"sample", "--from", "0.3,0.5", "--n", "2000", "--seed", "7", "--out", path("b.csv")}).code, 0);
  const auto a = slurp(path("a.csv"));
  EXPECT_EQ(a, slurp(path("b.csv")));
  EXPECT_EQ(a.rfind("z,r\n", 0), 0u);
  ASSERT_EQ(cli({"sample", "--from", "0.3,0.5", "--n", "2000", "--seed", "8", "--out", path("c.csv")}).code, 0);
  EXPECT_NE(a, slurp(path("c.csv")));
}

TEST_F(CliTest, SampleSummaryAndIncoherentSource) {
  auto r = cli({"sample", "--from", "0,0", "--n", "10", "--seed", "1"});
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_LE(std::abs(std::stod(line.substr(line.find(',') + 1))), 1e-9);
    ++rows;
  }
  EXPECT_EQ(rows, 10);
  auto summary = Json::parse(r.err);
  EXPECT_EQ(summary["violations"], 0);
  EXPECT_EQ(summary["seed"], 1);
}

TEST_F(CliTest, SampleSeedFromEnvironment) {
  ::setenv("COHERENCE_KIT_SEED", "7", 1);
  ASSERT_EQ(cli({"sample", "--from", "0.3,0.5", "--n", "50", "--out", path("env.csv")}).code, 0);
  ::unsetenv("COHERENCE_KIT_SEED");
  ASSERT_EQ(cli({"sample", "--from", "0.3,0.5", "--n", "50", "--seed", "7", "--out", path("flag.csv")}).code, 0);
  EXPECT_EQ(slurp(path("env.csv")), slurp(path("flag.csv")));

  ::setenv("COHERENCE_KIT_SEED", "seven", 1);
  EXPECT_EQ(cli({"sample", "--from", "0.3,0.5", "--n", "5"}).code, 2);
  ::unsetenv("COHERENCE_KIT_SEED");
  EXPECT_EQ(cli({"sample", "--from", "0.3,0.5", "--n", "5", "--max-kraus", "1"}).code, 1);
}

TEST(Document, RoundTripIsLossless) {
  cktool::ChannelDocument doc;
  doc.kraus = {ck_matrix{{{{0.1, 1e-300}, {1.0 / 3, -2.0 / 7}}, {{-0.0, 5e-17}, {0.9999999999999999, 0}}}}};
  doc.metadata["label"] = "x";
  std::ostringstream a;
  cktool::write_json(a, cktool::to_json(doc));
  const auto back = cktool::parse_document(a.str());
  ASSERT_EQ(back.kraus.size(), 1u);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      EXPECT_EQ(back.kraus[0].m[i][j].re, doc.kraus[0].m[i][j].re);
      EXPECT_EQ(back.kraus[0].m[i][j].im, doc.kraus[0].m[i][j].im);
    }
  std::ostringstream b;
  cktool::write_json(b, cktool::to_json(back));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(back.metadata["label"], "x");
}

TEST(Document, SeventeenDigits) {
  EXPECT_EQ(cktool::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(cktool::format_double(0.5), "0.5");
  EXPECT_EQ(cktool::format_double(-2.0), "-2");
  EXPECT_EQ(cktool::format_double(NAN), "null");
}

TEST(Document, StateText) {
  auto s = cktool::parse_state_text("0.5,-0.25");
  ASSERT_TRUE(s);
  EXPECT_EQ(s->z, 0.5);
  EXPECT_EQ(s->r, -0.25);
  EXPECT_EQ(s->theta, 0.0);
  s = cktool::parse_state_text("+1e-1,0.2,3");
  ASSERT_TRUE(s);
  EXPECT_EQ(s->theta, 3.0);
  for (const char* bad : {"", "0.5", "0.5,", ",0.5", "0.5,0.2,1,2", "0.5;0.2", "0.5, 0.2", "a,b"})
    EXPECT_FALSE(cktool::parse_state_text(bad)) << bad;
}
