#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "prd/io.hpp"
#include "prd/manifest.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

using prd::Mat;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("format_double: round-trip and canonical short forms") {
  CHECK(prd::format_double(0.5) == "0.5");
  CHECK(prd::format_double(1.25) == "1.25");
  CHECK(prd::format_double(0.0) == "0");
  CHECK(prd::format_double(-3.0) == "-3");
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -1e-300, 12345.6789}) {
    CHECK(std::stod(prd::format_double(v)) == v);
  }
}

TEST_CASE("csv writer emits exactly the cells it was given") {
  {
    prd::CsvWriter csv("io_test.csv");
    csv.row({"a", "b", "c"});
    csv.row({"1", "2.5", ""});
  }
  CHECK(slurp("io_test.csv") == "a,b,c\n1,2.5,\n");
  std::remove("io_test.csv");
}

TEST_CASE("gray mapping: min-max endpoints, interior rounding, constant field") {
  Mat f(1, 3);
  f << -2.0, 0.0, 2.0;
  auto px = prd::to_gray8(f);
  REQUIRE(px.size() == 3);
  CHECK(px[0] == 0);
  CHECK(px[1] == 128);  // lround(127.5)
  CHECK(px[2] == 255);

  auto flat = prd::to_gray8(Mat::Constant(2, 2, 7.0));
  for (auto p : flat) CHECK(p == 128);
}

TEST_CASE("pgm layout: header then raw payload bytes") {
  prd::write_pgm({0, 10, 20, 255, 128, 64}, 2, 3, "io_test.pgm");
  std::string data = slurp("io_test.pgm");
  CHECK(data == std::string("P5\n3 2\n255\n") +
                    std::string("\x00\x0a\x14\xff\x80\x40", 6));
  std::remove("io_test.pgm");
}

TEST_CASE("pgm rejects mismatched pixel counts") {
  CHECK_THROWS_AS(prd::write_pgm({1, 2, 3}, 2, 2, "bad.pgm"), std::invalid_argument);
}

TEST_CASE("sha256 of known vectors") {
  {
    std::ofstream out("empty.bin", std::ios::binary);
  }
  CHECK(prd::sha256_file("empty.bin") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  {
    std::ofstream out("abc.bin", std::ios::binary);
    out << "abc";
  }
  CHECK(prd::sha256_file("abc.bin") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  std::remove("empty.bin");
  std::remove("abc.bin");
  CHECK_THROWS_AS(prd::sha256_file("no_such_file.bin"), std::runtime_error);
}

TEST_CASE("manifest: full round trip through write and config recovery") {
  prd::RunManifest m;
  m.command = "simulate --model turing";
  m.config_json = R"({"steps": 100, "dt": 0.02, "preset": "default"})";
  m.seeds = {1, 42};
  m.inputs.push_back({"input.idx", "0000"});
  {
    std::ofstream out("artifact.csv");
    out << "step,value\n0,1\n";
  }
  m.artifacts.push_back({"artifact.csv", prd::sha256_file("artifact.csv")});
  m.duration_seconds = 1.5;
  prd::write_manifest(m, "manifest_test.json");

  nlohmann::json j = nlohmann::json::parse(slurp("manifest_test.json"));
  CHECK(j["command"] == "simulate --model turing");
  CHECK(j["config"]["steps"] == 100);
  CHECK(j["seeds"][1] == 42);
  CHECK(j["artifacts"][0]["path"] == "artifact.csv");
  CHECK(j["artifacts"][0]["sha256"] == prd::sha256_file("artifact.csv"));

  nlohmann::json cfg = nlohmann::json::parse(prd::read_config_json("manifest_test.json"));
  CHECK(cfg["dt"] == 0.02);
  CHECK(cfg["preset"] == "default");

  // A bare config file (no wrapping manifest) comes back whole.
  {
    std::ofstream out("bare_config.json");
    out << R"({"steps": 7})";
  }
  nlohmann::json bare = nlohmann::json::parse(prd::read_config_json("bare_config.json"));
  CHECK(bare["steps"] == 7);

  std::remove("artifact.csv");
  std::remove("manifest_test.json");
  std::remove("bare_config.json");
}
