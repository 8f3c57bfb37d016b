#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "levyclt/cli.hpp"

namespace {

namespace fs = std::filesystem;
using levyclt::cli::run_cli;

const std::string models = LEVYCLT_MODELS_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "levyclt");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("levyclt_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(Inspect, Brownian) {
  const auto r = run({"inspect", "--model", models + "/brownian.json"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("kappa       1\n"), std::string::npos);
  EXPECT_NE(r.out.find("Finite"), std::string::npos);
  EXPECT_NE(r.out.find("BothIntegralsFinite"), std::string::npos);
}

TEST(Inspect, HeavyLogTail) {
  const auto r = run({"inspect", "--model", models + "/log_perturbed_gamma1_5.json", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = levyclt::json::parse(r.out);
  EXPECT_EQ(j["regime"], "OnlySigmaTFinite");
  EXPECT_EQ(j["log_moment"]["status"], "Infinite");
}

TEST(Inspect, Degenerate) {
  const auto r = run({"inspect", "--model", models + "/degenerate.json"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("degenerate model"), std::string::npos);
}

TEST(Inspect, MalformedDocument) {
  const auto dir = scratch("malformed");
  std::ofstream(dir / "bad.json") << "{\"gaussian_var\": 1, \"measure\": ";
  EXPECT_EQ(run({"inspect", "--model", (dir / "bad.json").string()}).code, 2);
  EXPECT_EQ(run({"inspect", "--model", (dir / "missing.json").string()}).code, 2);
  std::ofstream(dir / "invalid.json")
      << R"({"gaussian_var": 1, "measure": {"family": "PowerTail", "params": {"amplitude": 1, "index": 1.5, "cut": 1}}})";
  const auto r = run({"inspect", "--model", (dir / "invalid.json").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("index must exceed 2"), std::string::npos);
}

TEST(Args, Invalid) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"scan"}).code, 2);
  const auto dir = scratch("args");
  EXPECT_EQ(run({"scan", "--model", models + "/brownian.json", "--samples", "99", "--out", dir.string()}).code, 2);
  EXPECT_EQ(run({"scan", "--model", models + "/brownian.json", "--alpha", "1", "--out", dir.string()}).code, 2);
  EXPECT_EQ(run({"scan", "--model", models + "/brownian.json", "--format", "xml"}).code, 2);
  EXPECT_TRUE(fs::is_empty(dir));
}

TEST(Identities, ClosedFormFamiliesPass) {
  for (const char* m : {"power_tail", "log_perturbed_gamma3", "log_perturbed_gamma1_5", "mixture",
                        "compound_poisson", "brownian"}) {
    const auto r = run({"identities", "--model", models + "/" + m + ".json"});
    EXPECT_EQ(r.code, 0) << m << '\n' << r.out;
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << m;
  }
}

TEST(Identities, CorruptedToleranceFailsNamedCheck) {
  const auto r = run({"identities", "--model", models + "/log_perturbed_gamma1_5.json", "--tol", "1e-15",
                      "--deficit-tol", "1e-15"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL second_moment_representations"), std::string::npos);
  EXPECT_NE(r.out.find("FAIL sigma_deficit[T=1000]"), std::string::npos);
}

TEST(Scan, WritesReproducibleFiles) {
  const auto a = scratch("scan_a");
  const auto b = scratch("scan_b");
  const std::vector<std::string> common{"scan", "--model", models + "/power_tail.json", "--t-max", "1000",
                                        "--points", "4", "--samples", "2000", "--seed", "3"};
  auto args = common;
  args.insert(args.end(), {"--out", a.string(), "--threads", "1"});
  ASSERT_EQ(run(args).code, 0);
  args = common;
  args.insert(args.end(), {"--out", b.string(), "--threads", "4"});
  ASSERT_EQ(run(args).code, 0);
  const auto csv = slurp(a / "scan.csv");
  EXPECT_EQ(csv, slurp(b / "scan.csv"));
  EXPECT_EQ(slurp(a / "scan.json"), slurp(b / "scan.json"));
  EXPECT_EQ(csv.rfind(levyclt::report_csv_header, 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_FALSE(fs::exists(a / "scan.csv.partial"));
}

TEST(Scan, DocumentRunSectionIsOverriddenByFlags) {
  const auto dir = scratch("precedence");
  std::ofstream(dir / "m.json") << R"({"gaussian_var": 1, "measure": {"family": "Zero"},
      "run": {"t_max": 50, "points": 3, "samples": 500, "seed": 9}})";
  ASSERT_EQ(run({"scan", "--model", (dir / "m.json").string(), "--out", dir.string(), "--points", "2",
                 "--format", "json"})
                .code,
            0);
  const auto j = levyclt::json::parse(slurp(dir / "scan.json"));
  EXPECT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(j["samples"], 500);
  EXPECT_EQ(j["seed"], 9);
  EXPECT_EQ(j["rows"][1]["t"], 50.0);
  EXPECT_FALSE(fs::exists(dir / "scan.csv"));
}

TEST(Sample, BinaryDump) {
  const auto dir = scratch("sample");
  const auto r = run({"sample", "--model", models + "/compound_poisson.json", "--t", "10", "--samples", "1000",
                      "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(fs::file_size(dir / "samples.bin"), 8000u);
  ASSERT_EQ(run({"sample", "--model", models + "/compound_poisson.json", "--t", "10", "--samples", "1000",
                 "--out", dir.string(), "--format", "csv"})
                .code,
            0);
  std::ifstream bin(dir / "samples.bin", std::ios::binary);
  const auto xs = levyclt::read_samples_binary(bin);
  std::ifstream csv(dir / "samples.csv");
  for (double x : xs) {
    double y = 0.0;
    ASSERT_TRUE(csv >> y);
    EXPECT_EQ(x, y);
  }
}

TEST(Outputs, PartialFilesRemovedOnError) {
  const auto dir = scratch("partial");
  try {
    levyclt::cli::detail::OutputSet files(dir);
    files.write("first.csv", std::ios::out, [](std::ostream& f) { f << "x\n"; });
    EXPECT_TRUE(fs::exists(dir / "first.csv"));
    files.write("second.csv", std::ios::out, [](std::ostream&) { throw levyclt::SamplerError("boom"); });
  } catch (const levyclt::SamplerError&) {
  }
  EXPECT_FALSE(fs::exists(dir / "first.csv"));
  EXPECT_FALSE(fs::exists(dir / "second.csv.partial"));
}

}  // namespace
