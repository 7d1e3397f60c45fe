// Copyright 2026 The flyby-dp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "flyby_dp.h"
#include "support/fixture.hpp"

namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("flyby_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    write("catalog.csv", flyby::testing::kFixtureCatalog);
    write("sequence.json", flyby::testing::kFixtureSequence);
  }
  ~Workspace() { fs::remove_all(dir); }

  std::string path(const std::string& name) const { return (dir / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir / name) << text; }
  std::string read(const std::string& name) const {
    std::ifstream in(dir / name);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }
};

// Runs the CLI with stdout and stderr captured to files; returns the exit code.
int run(const Workspace& w, const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " FLYBY_CLI_PATH " " + args + " > " + w.path("stdout") + " 2> " +
                          w.path("stderr");
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string inputs(const Workspace& w) {
  return "--catalog " + w.path("catalog.csv") + " --sequence " + w.path("sequence.json");
}

}  // namespace

TEST_CASE("solve, validate and export") {
  Workspace w;
  REQUIRE(run(w, "solve " + inputs(w) + " --step 25 --m-min 0 --out " + w.path("sol.json")) == 0);
  CHECK(w.read("stdout").find("m/s") != std::string::npos);
  const std::string sol = w.read("sol.json");
  CHECK(sol.find("\"schema_version\"") != std::string::npos);

  CHECK(run(w, "validate " + inputs(w) + " --m-min 0 --solution " + w.path("sol.json")) == 0);
  CHECK(w.read("stdout").find("\"ok\": true") != std::string::npos);

  std::string tampered = sol;
  const auto at = tampered.find("\"epoch_mjd2000\": ");
  REQUIRE(at != std::string::npos);
  tampered.insert(at + 17, "1");
  w.write("bad.json", tampered);
  CHECK(run(w, "validate " + inputs(w) + " --m-min 0 --solution " + w.path("bad.json")) == 3);

  REQUIRE(run(w, "export-plot --catalog " + w.path("catalog.csv") + " --solution " + w.path("sol.json") +
                     " --sample-days 10 --out " + w.path("plot.csv")) == 0);
  CHECK(w.read("plot.csv").rfind("leg,epoch_mjd2000,x_au,y_au,z_au,r_au\n", 0) == 0);
}

TEST_CASE("the CLI reproduces the C interface") {
  Workspace w;
  REQUIRE(run(w, "solve " + inputs(w) + " --step 25 --json") == 0);
  const std::string cli = w.read("stdout");

  fdp_catalog* cat = nullptr;
  fdp_sequence* seq = nullptr;
  REQUIRE(fdp_catalog_parse(flyby::testing::kFixtureCatalog, &cat) == FDP_OK);
  REQUIRE(fdp_sequence_parse(cat, flyby::testing::kFixtureSequence, &seq) == FDP_OK);
  fdp_grid g;
  fdp_grid_default(&g);
  g.step_days = 25.0;
  fdp_solution* sol = nullptr;
  REQUIRE(fdp_solve(cat, seq, nullptr, &g, &sol) == FDP_OK);
  char* text = nullptr;
  REQUIRE(fdp_solution_to_json(sol, &text) == FDP_OK);
  CHECK(cli == std::string(text) + "\n");
  fdp_string_free(text);
  fdp_solution_free(sol);
  fdp_sequence_free(seq);
  fdp_catalog_free(cat);

  // Worker count, from the flag or the environment, does not change the answer.
  REQUIRE(run(w, "solve " + inputs(w) + " --step 25 --json --workers 3") == 0);
  CHECK(w.read("stdout") == cli);
  REQUIRE(run(w, "solve " + inputs(w) + " --step 25 --json", "FLYBY_DP_WORKERS=2") == 0);
  CHECK(w.read("stdout") == cli);
}

TEST_CASE("exit codes") {
  Workspace w;
  CHECK(run(w, "--help") == 0);
  CHECK(run(w, "solve " + inputs(w) + " --step 25 --end 3500") == 2);
  CHECK(w.read("stderr").find("\"kind\":\"no-solution\"") != std::string::npos);
  CHECK(w.read("stderr").find("\"stage\":3") != std::string::npos);
  CHECK(run(w, "solve " + inputs(w) + " --bogus") == 3);
  CHECK(run(w, "solve --catalog " + w.path("missing.csv") + " --sequence " + w.path("sequence.json")) == 3);
  CHECK(run(w, "solve " + inputs(w) + " --step -4") == 3);
  CHECK(run(w, "solve " + inputs(w), "FLYBY_DP_WORKERS=zero") == 3);
  w.write("broken.csv", "id,name,epoch_mjd,a_au,e,i_deg,raan_deg,argp_deg,m0_deg\n0,X,54000,1,1.2,0,0,0,0\n");
  CHECK(run(w, "solve --catalog " + w.path("broken.csv") + " --sequence " + w.path("sequence.json")) == 3);
  CHECK(w.read("stderr").find("line 2") != std::string::npos);
  CHECK(run(w, "") == 3);
}

TEST_CASE("refine, error statistics and catalog conversion") {
  Workspace w;
  REQUIRE(run(w, "refine " + inputs(w) + " --initial-step 32 --final-step 2 --history " + w.path("h.csv")) == 0);
  CHECK(w.read("h.csv").rfind("step_days,total_dv_mps,seconds\n32,", 0) == 0);

  REQUIRE(run(w, "error-stats " + inputs(w) + " --steps 1 0.1 --samples 20 --seed 3") == 0);
  const std::string first = w.read("stdout");
  CHECK(first.rfind("step_days,samples,mean_abs_error_mps,max_abs_error_mps\n", 0) == 0);
  REQUIRE(run(w, "error-stats " + inputs(w) + " --steps 1 0.1 --samples 20 --seed 3 --workers 2") == 0);
  CHECK(w.read("stdout") == first);
  CHECK(run(w, "error-stats " + inputs(w) + " --rounding sideways") == 3);

  w.write("raw.txt", "Name Epoch a e i LAN w M\nAlpha 54000 1.05 0.08 1.5 40 120 10\n");
  REQUIRE(run(w, "convert-catalog --from gtoc4 --in " + w.path("raw.txt") + " --out " + w.path("conv.csv")) == 0);
  const std::string conv = w.read("conv.csv");
  CHECK(conv.find("0,Earth,") != std::string::npos);
  CHECK(conv.find("1,Alpha,") != std::string::npos);
  CHECK(run(w, "convert-catalog --from gtoc9 --in " + w.path("raw.txt") + " --out " + w.path("x.csv")) == 3);
}
