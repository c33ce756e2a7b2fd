#include "nsw/cli.hpp"
#include "nsw/io.hpp"

#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

using namespace nsw;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run nswmarket(std::initializer_list<std::string> args) {
  std::vector<std::string> words{"nswmarket"};
  words.insert(words.end(), args);
  std::vector<const char*> argv;
  for (const auto& w : words) argv.push_back(w.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / ("nsw_cli_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  auto path = scratch_dir() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("generated fixture solves to its known price") {
  std::string market = (scratch_dir() / "prop1.market").string();
  std::string state = (scratch_dir() / "prop1.state").string();
  REQUIRE(nswmarket({"gen", "--kind", "fixture", "--fixture", "prop1", "--out", market}).code == 0);
  Run r = nswmarket({"solve", market, "--exact", "--out", state});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("verify pass") != std::string::npos);
  StateFile s = read_state_file(state);
  CHECK(s.price == std::vector<Rational>{2});
  CHECK(s.allocation.share(0, 0) == Rational(1, 2));
  CHECK(nswmarket({"verify", state}).code == cli::kOk);
}

TEST_CASE("malformed input exits with the parse code") {
  std::string bad = write_file("bad.nsw", "nsw 2 2\ncap 1 x\n");
  CHECK(nswmarket({"solve", bad}).code == cli::kParseError);
  CHECK(nswmarket({"pipeline", bad}).code == cli::kParseError);
  CHECK(nswmarket({"solve", (scratch_dir() / "missing.nsw").string()}).code == cli::kParseError);
  CHECK(nswmarket({"solve"}).code == cli::kParseError);
  CHECK(nswmarket({"gen", "--kind", "nonsense"}).code == cli::kParseError);
}

TEST_CASE("markets that are not money clearing exit with their own code") {
  std::string path = write_file("stuck.market",
                                "market 1 1\nbudget 1 2\nucap 1 100\necap 1 1\nutil 1 1 1\n");
  Run r = nswmarket({"solve", path, "--exact"});
  CHECK(r.code == cli::kNotMoneyClearing);
  Run o = nswmarket({"oracle", path});
  CHECK(o.code == cli::kOk);
  CHECK(o.out.find("money_clearing no") != std::string::npos);
}

TEST_CASE("pipeline on a single agent") {
  std::string path = write_file("one.nsw", "nsw 1 2\ncap 1 5\nval 1 1 2\nval 1 2 4\n");
  Run r = nswmarket({"--no-timestamp", "pipeline", path});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("nsw_product 5\n") != std::string::npos);
  CHECK(r.out.find("ratio_check pass") != std::string::npos);
  CHECK(r.out.find("assign 1 1\nassign 2 1\n") != std::string::npos);
}

TEST_CASE("output is deterministic without the timestamp") {
  std::string path = write_file("det.nsw", "nsw 2 3\ncap 1 4\ncap 2 4\nval 1 1 3\nval 1 2 1\nval 2 2 2\nval 2 3 3\n");
  Run a = nswmarket({"--no-timestamp", "pipeline", path});
  Run b = nswmarket({"--no-timestamp", "pipeline", path});
  CHECK(a.code == cli::kOk);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("nsw_product ", 0) == 0);
  CHECK(nswmarket({"pipeline", path}).out.rfind("# nswmarket pipeline ", 0) == 0);
  Run g1 = nswmarket({"--no-timestamp", "gen", "--n", "3", "--m", "4", "--seed", "7"});
  Run g2 = nswmarket({"--no-timestamp", "gen", "--n", "3", "--m", "4", "--seed", "7"});
  CHECK(g1.out == g2.out);
}

TEST_CASE("oracle output agrees with the pipeline certificate bound") {
  std::string path = write_file("two.nsw", "nsw 2 2\ncap 1 10\ncap 2 10\nval 1 1 3\nval 1 2 1\nval 2 1 1\nval 2 2 3\n");
  Run o = nswmarket({"oracle", path});
  CHECK(o.code == cli::kOk);
  CHECK(o.out.find("opt_product 9\n") != std::string::npos);
  CHECK(o.out.find("assign 1 1\nassign 2 2\n") != std::string::npos);
}

TEST_CASE("bench with no seeds prints only the header") {
  Run r = nswmarket({"--no-timestamp", "bench", "--n", "2", "--m", "3", "--seeds", "0"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out == "# epsilon 1/4 instances 0\n");
  Run s = nswmarket({"--no-timestamp", "bench", "--n", "2", "--m", "3", "--seeds", "4", "--threads", "2"});
  CHECK(s.code == cli::kOk);
  CHECK(s.out.find("seed 4 ") != std::string::npos);
}

TEST_CASE("hardness gadget through the pipeline") {
  std::string path = (scratch_dir() / "gadget.nsw").string();
  REQUIRE(nswmarket({"gen", "--kind", "e3lin2", "--n", "3", "--k", "1", "--seed", "2", "--out", path}).code == 0);
  Run r = nswmarket({"pipeline", path});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("ratio_check pass") != std::string::npos);
  std::filesystem::remove_all(scratch_dir());
}

}  // TEST_SUITE
