//
// Copyright 2026 The dpmh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gtest/gtest.h"

namespace {

namespace fs = std::filesystem;

int RunTool(const std::string& args) {
  const std::string command =
      std::string(DPMH_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
  const int raw = std::system(command.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

fs::path FreshDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dpmh_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  return text.str();
}

constexpr char kConfig[] = R"([model]
type = mixture
temperature = 100
domain_lower = -1.5,-1.5
domain_upper = 2.5,2.5
n = 100

[sampler]
mode = dpfast
lambda = 10
batch_cap = auto
epsilon = 0.1
delta = 1e-5
proposal_scale = 0.2
iters = 200
seed = 1
)";

TEST(CliTest, MissingConfigExitsWithInputError) {
  EXPECT_EQ(RunTool("run --config /nonexistent.cfg --out /tmp/x"), 2);
}

TEST(CliTest, UnknownSubcommandIsAUsageError) {
  EXPECT_EQ(RunTool("frobnicate"), 2);
}

TEST(CliTest, MalformedConfigExitsWithInputError) {
  const fs::path dir = FreshDir("bad");
  std::ofstream(dir / "bad.cfg") << "[sampler]\nlambda = -1\n";
  EXPECT_EQ(RunTool("run --config " + (dir / "bad.cfg").string() + " --out " +
                    (dir / "out").string()),
            2);
}

TEST(CliTest, RunWritesArtifactsAndSeedOverrideChangesTrace) {
  const fs::path dir = FreshDir("run");
  std::ofstream(dir / "mix.cfg") << kConfig;
  const std::string cfg = (dir / "mix.cfg").string();
  ASSERT_EQ(RunTool("run --config " + cfg + " --out " + (dir / "a").string()),
            0);
  ASSERT_EQ(RunTool("run --config " + cfg + " --out " + (dir / "b").string()),
            0);
  ASSERT_EQ(RunTool("run --config " + cfg + " --seed 2 --out " +
                    (dir / "c").string()),
            0);
  for (const char* name : {"trace.csv", "ledger.csv", "metrics.csv",
                           "resolved.cfg", "grid_posterior.csv"}) {
    EXPECT_TRUE(fs::exists(dir / "a" / name)) << name;
  }
  EXPECT_EQ(ReadFile(dir / "a" / "trace.csv"),
            ReadFile(dir / "b" / "trace.csv"));
  EXPECT_NE(ReadFile(dir / "a" / "trace.csv"),
            ReadFile(dir / "c" / "trace.csv"));
}

TEST(CliTest, SweepWritesIndex) {
  const fs::path dir = FreshDir("sweep");
  std::ofstream(dir / "sweep.cfg")
      << kConfig << "\n[sweep]\nmodes = dpfast,penalty\nepsilons = 0.1\n";
  ASSERT_EQ(
      RunTool("sweep --workers 2 --config " + (dir / "sweep.cfg").string() +
              " --out " + (dir / "out").string()),
      0);
  EXPECT_TRUE(fs::exists(dir / "out" / "sweep_index.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "sweep_metrics.csv"));
}

TEST(CliTest, DataGenWritesBothKinds) {
  const fs::path dir = FreshDir("gen");
  ASSERT_EQ(RunTool("data-gen --kind mixture --n 50 --out " +
                    (dir / "mix.csv").string()),
            0);
  ASSERT_EQ(RunTool("data-gen --kind logistic --n 40 --theta 1,-1 --out " +
                    (dir / "logit.csv").string()),
            0);
  EXPECT_EQ(
      RunTool("data-gen --kind poisson --out " + (dir / "x.csv").string()), 2);
  std::ifstream mix(dir / "mix.csv");
  int lines = 0;
  for (std::string line; std::getline(mix, line);) ++lines;
  EXPECT_GE(lines, 50);
  EXPECT_EQ(ReadFile(dir / "logit.csv").substr(0, 12), "x0,x1,label\n");
}

}  // namespace
