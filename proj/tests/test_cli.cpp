// Copyright (c) 2026 The LDConv Authors. All Rights Reserved.
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


// Drives the built CLI binary and checks its exit-code contract and outputs.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "ldconv_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const std::string& stdout_name = "stdout.txt") {
  const std::string cmd = "cd '" + work_dir().string() + "' && LDCONV_THREADS=1 '" LDCONV_CLI_PATH "' " + args +
                          " > " + stdout_name + " 2> stderr.txt";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& name) {
  std::ifstream f(work_dir() / name, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

void put(const fs::path& name, const std::string& text) { std::ofstream(work_dir() / name) << text; }

}  // namespace

TEST_CASE("gen-coords") {
  CHECK(run("gen-coords --n 5") == 0);
  CHECK(slurp("stdout.txt") == "index,row,col\n0,0,0\n1,0,1\n2,1,0\n3,1,1\n4,2,0\n");
  CHECK(run("gen-coords --n 0") == 2);
  put("dup.txt", "0 0\n1 1\n0 0\n");
  CHECK(run("gen-coords --shape-file dup.txt") == 2);
  CHECK(slurp("stderr.txt").find("duplicate coordinate") != std::string::npos);
  CHECK(run("gen-coords --n 3 --shape-file dup.txt") == 2);
  CHECK(run("gen-coords --n 7 --format svg --out p1.svg --no-timestamp") == 0);
  CHECK(run("gen-coords --n 7 --format svg --out p2.svg --no-timestamp") == 0);
  CHECK(slurp("p1.svg") == slurp("p2.svg"));
  CHECK(run("gen-coords --n 7 --format png") == 2);
}

TEST_CASE("check-grad exit codes") {
  CHECK(run("check-grad --n 3 --dims 1,2,5,5 --f64 --seed 1 --out cg.json --no-timestamp") == 0);
  const auto report = nlohmann::json::parse(slurp("cg.json"));
  CHECK(report["passed"] == true);
  CHECK(report["command"] == "check-grad");
  CHECK(run("check-grad --n 3 --dims 1,2,5,5 --f64 --sabotage") == 1);
  CHECK(run("check-grad --dims 1,2,0,5") == 2);
  CHECK(run("check-grad --dims 1,2,5") == 2);
  CHECK(run("check-grad --bogus") == 2);
}

TEST_CASE("bench") {
  CHECK(run("bench --n 5 --c-in 4 --c-out 6 --dims 2,4,12,12 --iters 3 --warmup 1 --out bench.json") == 0);
  const auto report = nlohmann::json::parse(slurp("bench.json"));
  CHECK(report["outputs_agree"] == true);
  CHECK(report["checksum_spread"].get<double>() <= 1e-5);
  REQUIRE(report["strategies"].size() == 3);
  for (const auto& row : report["strategies"]) {
    CHECK(row.contains("median_ms"));
    CHECK(row["p90_ms"].get<double>() >= row["median_ms"].get<double>());
    const double c0 = report["strategies"][0]["checksum"].get<double>();
    CHECK(row["checksum"].get<double>() == doctest::Approx(c0).epsilon(1e-5));
  }
  CHECK(run("bench --iters 0") == 2);
  CHECK(run("bench --c-in 4 --dims 1,3,8,8") == 2);
}

TEST_CASE("growth") {
  CHECK(run("growth --c-in 16 --c-out 32 --n-max 16 --out growth --no-timestamp") == 0);
  const std::string csv = slurp("growth/growth.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);
  CHECK(csv.find("2,1636,") != std::string::npos);
  std::size_t deltas = 0;
  for (std::size_t p = csv.find(",802,"); p != std::string::npos; p = csv.find(",802,", p + 1)) ++deltas;
  CHECK(deltas == 15);
  const std::string svg = slurp("growth/growth.svg");
  CHECK(svg.find("id=\"ldconv\"") != std::string::npos);
  CHECK(svg.find("id=\"standard\"") != std::string::npos);
  CHECK(run("growth --n-max 1 --out g1") == 0);
  CHECK(slurp("g1/growth.csv").find("\n1,") != std::string::npos);
  CHECK(std::count(slurp("g1/growth.csv").begin(), slurp("g1/growth.csv").end(), '\n') >= 2);
  CHECK(run("growth --n-max 0") == 2);
}

TEST_CASE("train and analyze-ao") {
  put("short.json", R"({"n1": 5, "n2": 5, "strategy": "conv3d", "epochs": 2, "batch": 8, "lr": 0.05, "seed": 3, "subset": 32})");
  CHECK(run("train short.json --synthetic --out run1 --no-timestamp") == 0);
  CHECK(run("train short.json --synthetic --out run2 --no-timestamp") == 0);
  CHECK(slurp("run1/report.json") == slurp("run2/report.json"));
  const auto report = nlohmann::json::parse(slurp("run1/report.json"));
  CHECK(report["loss"].size() == 2);
  CHECK(report.contains("final_acc"));
  CHECK(report.contains("param_count"));
  CHECK(report["ao"]["l2"].contains("mean"));
  CHECK_FALSE(report.contains("timestamp"));
  CHECK(fs::exists(work_dir() / "run1" / "checkpoint.ldt"));
  CHECK(fs::exists(work_dir() / "run1" / "checkpoint.json"));

  CHECK(run("train short.json --out nodata") == 2);
  CHECK(run("train missing.json --synthetic") == 2);
  put("typo.json", R"({"epoch": 2})");
  CHECK(run("train typo.json --synthetic") == 2);
  put("diverge.json", R"({"epochs": 3, "batch": 8, "lr": 1e10, "subset": 32})");
  CHECK(run("train diverge.json --synthetic --out div") == 1);
  CHECK(slurp("stderr.txt").find("epoch") != std::string::npos);

  CHECK(run("analyze-ao --checkpoint run1/checkpoint.ldt --checkpoint run2/checkpoint.ldt --out ao --no-timestamp") == 0);
  CHECK(slurp("ao/ao_shape0.csv") == slurp("ao/ao_shape1.csv"));
  CHECK(slurp("ao/ao_shape0.csv").rfind("b,i,j,ao\n", 0) == 0);
  CHECK(run("analyze-ao --checkpoint nope.ldt") == 2);
}
