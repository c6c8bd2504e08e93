#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "cli_support.hpp"

using namespace lmgd;
using testing::run_cli;
using testing::ScratchDir;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') cell += line[++i];
        else if (c == '"') quoted = false;
        else cell += c;
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell += c;
      }
    }
    cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string header_of(const std::string& file) {
  const std::string text = testing::read_file(file);
  return text.substr(0, text.find('\n'));
}

}  // namespace

TEST_CASE("fixed-points output") {
  ScratchDir dir("fp");
  auto r = run_cli({"fixed-points", "--delta", "0", "--lambda-ratio", "6", "--k", "10", "--out", dir / "a"});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(testing::read_file(dir / "a/fixed_points.csv"));
  REQUIRE(rows.size() == 5);
  CHECK(header_of(dir / "a/fixed_points.csv") == "z,phi,energy,classification,branch_sign");
  CHECK(rows[1][3] == "maximum");
  CHECK(rows[2][3] == "saddle");
  CHECK(rows[3][3] == "maximum");
  CHECK(rows[4][3] == "minimum");
  CHECK(std::stod(rows[1][1]) == 0.0);
  CHECK(std::stod(rows[4][1]) == doctest::Approx(3.141592653589793));

  r = run_cli({"fixed-points", "--delta", "0", "--lambda-ratio", "0", "--k", "0.1", "--out", dir / "b"});
  REQUIRE(r.code == 0);
  const auto two = parse_csv(testing::read_file(dir / "b/fixed_points.csv"));
  REQUIRE(two.size() == 3);
  CHECK(two[1][0] == two[2][0]);
  CHECK(std::stod(two[1][0]) == doctest::Approx(-0.544978).epsilon(1e-6));

  const auto manifest = nlohmann::json::parse(testing::read_file(dir / "a/manifest.json"));
  CHECK(manifest["subcommand"] == "fixed-points");
  CHECK(manifest["tool_version"] == "0.1.0");
  CHECK(manifest["parameters"]["k"] == 10.0);
  CHECK(manifest["outputs"][0]["file"] == "fixed_points.csv");
  CHECK(manifest["outputs"][0]["rows"] == 4);
  CHECK(manifest["timestamp"].get<std::string>().back() == 'Z');
}

TEST_CASE("exit codes") {
  ScratchDir dir("codes");
  CHECK(run_cli({"fixed-points", "--delta", "0", "--lambda-ratio", "6", "--out", dir / "x"}).code == 2);
  CHECK(run_cli({"no-such-command"}).code == 2);
  CHECK(run_cli({"fixed-points", "--delta", "zero", "--lambda-ratio", "6", "--k", "1"}).code == 2);
  CHECK(run_cli({"critical", "--lambda-ratio", "6", "--format", "xml", "--out", dir / "x"}).code == 2);
  CHECK(run_cli({"bifurcation", "--lambda-ratio", "6", "--sweep", "q", "--from", "0", "--to", "1", "--steps",
                 "3", "--out", dir / "x"})
            .code == 2);
  CHECK(run_cli({"--help"}).code == 0);

  const auto none = run_cli({"bounds", "--delta", "1", "--lambda-ratio", "2", "--out", dir / "x"});
  CHECK(none.code == 1);
  CHECK(none.err.find("no real bounds") != std::string::npos);
  CHECK(run_cli({"critical", "--lambda-ratio", "0", "--out", dir / "x"}).code == 1);
  CHECK(run_cli({"trajectory", "--delta", "0", "--lambda-ratio", "0", "--k", "0.1", "--z0", "0.5", "--out",
                 dir / "x"})
            .code == 1);
}

TEST_CASE("critical and bounds outputs") {
  ScratchDir dir("crit");
  REQUIRE(run_cli({"critical", "--lambda-ratio", "6", "--out", dir.path().string()}).code == 0);
  CHECK(header_of(dir / "critical.csv") == "lambda_ratio,z_c,k_c_minus,k_c_plus");
  auto rows = parse_csv(testing::read_file(dir / "critical.csv"));
  CHECK(std::stod(rows[1][1]) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(std::stod(rows[1][3]) == doctest::Approx(13.531973).epsilon(1e-7));

  REQUIRE(run_cli({"critical", "--lambda-ratio", "5000", "--out", dir.path().string()}).code == 0);
  rows = parse_csv(testing::read_file(dir / "critical.csv"));
  CHECK(std::stod(rows[1][3]) == doctest::Approx(1.25e7).epsilon(5e-4));

  REQUIRE(run_cli({"bounds", "--delta", "0", "--lambda-ratio", "6", "--out", dir.path().string()}).code == 0);
  CHECK(header_of(dir / "bounds.csv") == "z_minus,z_plus");
  rows = parse_csv(testing::read_file(dir / "bounds.csv"));
  CHECK(std::stod(rows[1][1]) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("trajectory output conserves energy") {
  ScratchDir dir("traj");
  REQUIRE(run_cli({"trajectory", "--delta", "0", "--lambda-ratio", "0", "--k", "10", "--z0", "0.5", "--phi0", "0",
                   "--tau-max", "100", "--out", dir.path().string()})
              .code == 0);
  CHECK(header_of(dir / "trajectory.csv") == "tau,z,phi,energy");
  const auto rows = parse_csv(testing::read_file(dir / "trajectory.csv"));
  REQUIRE(rows.size() == 10002);
  CHECK(std::stod(rows.back()[0]) == 100.0);
  CHECK(std::abs(std::stod(rows.back()[3]) - std::stod(rows[1][3])) < 1e-8);
}

TEST_CASE("bifurcation and classify outputs") {
  ScratchDir dir("bif");
  REQUIRE(run_cli({"bifurcation", "--delta", "0", "--lambda-ratio", "6", "--sweep", "k", "--from", "0.01", "--to",
                   "20", "--steps", "200", "--samples", "20000", "--out", dir.path().string()})
              .code == 0);
  CHECK(header_of(dir / "bifurcation.csv") == "sweep_value,z,phi,classification,error");
  const auto tr = parse_csv(testing::read_file(dir / "bifurcation_transitions.csv"));
  std::size_t folds = 0;
  for (std::size_t i = 1; i < tr.size(); ++i) folds += tr[i][5] == "fold" && std::stod(tr[i][0]) == 0.0;
  CHECK(folds == 2);

  const auto failed = run_cli({"bifurcation", "--lambda-ratio", "1", "--k", "nan", "--sweep", "delta", "--from",
                               "0", "--to", "1", "--steps", "3", "--out", dir.path().string()});
  CHECK(failed.code == 1);

  const auto c = run_cli({"classify", "--delta", "0", "--lambda-ratio", "6", "--k", "10", "--out", dir.path().string()});
  REQUIRE(c.code == 0);
  CHECK(c.out == "josephson_bistable\n");
  const auto j = nlohmann::json::parse(testing::read_file(dir / "regime.json"));
  CHECK(j["regime"] == "josephson_bistable");
  CHECK(j["count_phi_zero"] == 3);
  CHECK(j["fixed_points"].size() == 4);
}

TEST_CASE("portrait directory layout") {
  ScratchDir dir("por");
  REQUIRE(run_cli({"portrait", "--delta", "0", "--lambda-ratio", "0", "--k", "0.1", "--survey-points", "5",
                   "--tau-max", "5", "--grid", "41", "--out", dir.path().string()})
              .code == 0);
  namespace fs = std::filesystem;
  for (const char* f : {"manifest.json", "fixed_points.csv", "trajectory_index.csv", "trajectories.csv",
                        "landscape.csv"})
    CHECK(fs::exists(dir.path() / "portrait" / f));
  CHECK_FALSE(fs::exists(dir.path() / "portrait/separatrix.csv"));
  const auto m = nlohmann::json::parse(testing::read_file(dir / "portrait/manifest.json"));
  CHECK(m["notes"].size() == 2);
}

TEST_CASE("csv and json carry identical numbers") {
  for (const auto& args : testing::subcommand_invocations()) {
    ScratchDir dir("fmt");
    auto a = args, b = args;
    a.insert(a.end(), {"--out", dir / "csv", "--format", "csv"});
    b.insert(b.end(), {"--out", dir / "json", "--format", "json"});
    REQUIRE(run_cli(a).code == 0);
    REQUIRE(run_cli(b).code == 0);
    if (args[0] == "classify") continue;  // report object rather than a table
    const auto csv_files = testing::data_files(dir / "csv");
    const auto json_files = testing::data_files(dir / "json");
    REQUIRE(csv_files.size() == json_files.size());
    for (const auto& [name, text] : csv_files) {
      const std::string stem = name.substr(0, name.size() - 4);
      CAPTURE(stem);
      const auto rows = parse_csv(text);
      const auto j = nlohmann::json::parse(json_files.at(stem + ".json"));
      REQUIRE(j.size() + 1 == rows.size());
      for (std::size_t i = 0; i < j.size(); ++i) {
        for (std::size_t c = 0; c < rows[0].size(); ++c) {
          const auto& cell = rows[i + 1][c];
          const auto& v = j[i][rows[0][c]];
          if (v.is_null()) CHECK((cell == "nan" || cell == "inf" || cell == "-inf"));
          else if (v.is_number_float()) CHECK(std::stod(cell) == v.get<double>());
          else if (v.is_number_integer()) CHECK(std::stoll(cell) == v.get<long long>());
          else CHECK(cell == v.get<std::string>());
        }
      }
    }
  }
}

TEST_CASE("re-runs are byte-identical") {
  for (const auto& args : testing::subcommand_invocations()) {
    ScratchDir dir("det");
    auto a = args, b = args;
    a.insert(a.end(), {"--out", dir / "a"});
    b.insert(b.end(), {"--out", dir / "b"});
    REQUIRE(run_cli(a).code == 0);
    REQUIRE(run_cli(b).code == 0);
    const auto fa = testing::data_files(dir / "a");
    CHECK_FALSE(fa.empty());
    CHECK(fa == testing::data_files(dir / "b"));
  }
}

TEST_CASE("table formatting") {
  cli::Table t({"x", "name", "n"});
  t.add_row({0.1, std::string("a,\"b\""), 3LL});
  t.add_row({std::nan(""), std::string("c"), -1LL});
  std::ostringstream csv, js;
  t.write_csv(csv);
  t.write_json(js);
  CHECK(csv.str() == "x,name,n\n0.10000000000000001,\"a,\"\"b\"\"\",3\nnan,c,-1\n");
  const auto j = nlohmann::json::parse(js.str());
  CHECK(j[0]["x"] == 0.1);
  CHECK(j[1]["x"].is_null());
  CHECK(cli::format_double(1.0 / 3.0) == "0.33333333333333331");
}

TEST_CASE("installed executable") {
  ScratchDir dir("exe");
  const std::string base = std::string(LMGD_TOOL_PATH) + " fixed-points --delta 0 --lambda-ratio 6 --k 10 --out " +
                           dir.path().string() + " > /dev/null 2>&1";
  CHECK(std::system(base.c_str()) == 0);
  CHECK(std::filesystem::exists(dir.path() / "fixed_points.csv"));
  const std::string missing = std::string(LMGD_TOOL_PATH) + " fixed-points --delta 0 > /dev/null 2>&1";
  const int status = std::system(missing.c_str());
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 2);
}
