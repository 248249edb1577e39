#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bamg/report_io.hpp"

using namespace bamg;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("solve report JSON omits timings by default") {
  SolveReport r;
  r.iterations = 3;
  r.converged = true;
  r.residual_history = {1.0, 1e-3, 1e-8};
  r.setup_seconds = 1.5;
  const Json j = to_json(r);
  CHECK(j["iterations"] == 3);
  CHECK(j["converged"] == true);
  CHECK(j["final_scaled_residual"] == 1e-8);
  CHECK_FALSE(j.contains("setup_seconds"));
  CHECK(to_json(r, true).contains("setup_seconds"));
}

TEST_CASE("splitting and config serialization") {
  const auto s = CfSplitting::from_flags({true, false, true});
  const Json j = to_json(s);
  CHECK(j["coarse"] == Json::array({0, 2}));
  CHECK(j["fine"] == Json::array({1}));
  const Json c = to_json(SetupConfig{});
  CHECK(c["r"] == 8);
  CHECK(c["interp"]["prior"] == "operator");
}

TEST_CASE("vector CSV keeps full precision") {
  const auto dir = std::filesystem::temp_directory_path() / "bamg_unit_io";
  ensure_directory(dir);
  const double third = 1.0 / 3.0;
  write_vector_csv(dir / "x.csv", Vector{third, 2.0}, "x");
  std::istringstream in(slurp(dir / "x.csv"));
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "x");
  CHECK(std::stod(first) == third);
  write_complex_csv(dir / "z.csv", ComplexVector{{1.0, -2.0}});
  CHECK(slurp(dir / "z.csv").find("1,-2") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("writing into an unwritable location raises IoError") {
  CHECK_THROWS_AS(write_text("/proc/bamg_unit/none.txt", "x"), IoError);
}
