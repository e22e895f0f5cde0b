#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "carseq/cli.hpp"
#include "carseq/formats.hpp"

using namespace carseq;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("carseq-cli-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run({"--help"}).code == cli::kOk);
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"frobnicate"}).code == cli::kUsage);
  CHECK(run({"solve", "--alg", "NOPE", "--in", "x.csq"}).code == cli::kUsage);
}

TEST_CASE("missing and malformed inputs") {
  TempDir dir;
  CHECK(run({"solve", "--alg", "EXACT", "--in", (dir.path / "absent.csq").string()}).code == cli::kMissingFile);
  const fs::path bad = dir.path / "bad.csq";
  cli::atomic_write(bad, "3 1\n");
  CHECK(run({"solve", "--alg", "EXACT", "--in", bad.string()}).code == cli::kParseError);
  const Run r = run({"features", "--instances", (dir.path / "nowhere").string(), "--out", (dir.path / "f.csv").string()});
  CHECK(r.code == cli::kMissingFile);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("window flags only apply to fixed-window search") {
  TempDir dir;
  const fs::path inst = dir.path / "e4.csq";
  cli::atomic_write(inst, "4 1 2\n1\n2\n0 2 1\n1 2 0\n");
  CHECK(run({"solve", "--alg", "EXACT", "--in", inst.string(), "--window", "4"}).code == cli::kUsage);
  CHECK(run({"solve", "--alg", "LNS10", "--in", inst.string(), "--shift", "1", "--time", "0.2"}).code == cli::kOk);
}

TEST_CASE("solve reports a verified result and appends records") {
  TempDir dir;
  const fs::path inst = dir.path / "e4.csq";
  cli::atomic_write(inst, "# name: E4\n4 1 2\n1\n2\n0 2 1\n1 2 0\n");
  const fs::path runs = dir.path / "out.runs";
  for (const char* alg : {"EXACT", "LR-ACO"}) {
    const Run r = run({"solve", "--alg", alg, "--in", inst.string(), "--time", "0.5", "--out", runs.string()});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("objective=0") != std::string::npos);
    CHECK(r.out.find("sequence") != std::string::npos);
  }
  const auto records = read_results(slurp(runs));
  REQUIRE(records.size() == 2);
  CHECK(records[0].instance_name == "E4");
  CHECK(records[0].algorithm == Algorithm::Exact);
  CHECK(records[1].algorithm == Algorithm::Lraco);
  CHECK(records[0].config_digest.size() == 16);
}

TEST_CASE("small pipeline is reproducible") {
  TempDir dir;
  auto pipeline = [&](const std::string& tag) {
    const fs::path root = dir.path / tag;
    const std::string inst = (root / "inst").string();
    REQUIRE(run({"generate", "--out", inst, "--seed", "3", "--families", "nobhiu,randN", "--sizes", "100",
                 "--replicates", "2"}).code == cli::kOk);
    CHECK(std::distance(fs::directory_iterator(inst), fs::directory_iterator{}) == 4);
    const std::string feats = (root / "features.csv").string();
    REQUIRE(run({"features", "--instances", inst, "--out", feats}).code == cli::kOk);
    CHECK(cli::read_features_csv(slurp(feats)).size() == 4);
    const std::string space = (root / "space.csv").string();
    REQUIRE(run({"project", "--features", feats, "--mode", "fixed", "--out", space}).code == cli::kOk);
    CHECK(cli::read_space_csv(slurp(space)).size() == 4);
    const std::string runs = (root / "results.runs").string();
    REQUIRE(run({"experiment", "--instances", inst, "--algs", "EXACT,ADAPTIVE", "--time", "0.1", "--seeds", "1",
                 "--seed", "3", "--jobs", "2", "--clock", "work", "--out", runs}).code == cli::kOk);
    CHECK(read_results(slurp(runs)).size() == 8);
    return slurp(feats) + slurp(space) + slurp(runs);
  };
  CHECK(pipeline("a") == pipeline("b"));
}

TEST_CASE("digest follows the settings") {
  cli::RunConfig a{"solve", {}}, b{"solve", {}};
  a.set("alg", "EXACT");
  b.set("alg", "LAZY");
  CHECK(a.digest().size() == 16);
  CHECK(a.digest() != b.digest());
  cli::RunConfig c{"solve", {}};
  c.set("alg", "EXACT");
  CHECK(a.digest() == c.digest());
}
