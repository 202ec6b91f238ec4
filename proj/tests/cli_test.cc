// Copyright 2026 The FreqNorm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>
#include <string>

#include "freqnorm/image_io.h"
#include "freqnorm/tensor.h"

namespace freqnorm {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;  // stdout and stderr interleaved
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(FREQNORM_CLI_PATH) + " " + args + " 2>&1";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("freqnorm_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
    std::ofstream(dir_ / "small.cfg") << "model.stages=1x4,1x4,1x8,1x8\n"
                                         "model.stem_channels=4\n";
    data_ = run("gen-data --out " + (dir_ / "data").string() +
                " --images-per-class 50 --classes 4 --size 16");
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string path(const std::string& name) { return (dir_ / name).string(); }

  static std::string train_args(const std::string& variant, const std::string& out,
                                const std::string& extra = "") {
    return "train --config " + path("small.cfg") + " --variant " + variant + " --data " +
           path("data") + " --holdout sketch --seed 3 --epochs 2 --iters 2 --batch 8 --out " +
           path(out) + " " + extra;
  }

  static fs::path dir_;
  static CliRun data_;
};

fs::path CliTest::dir_;
CliRun CliTest::data_;

TEST_F(CliTest, HelpListsEveryFlag) {
  const struct {
    const char* cmd;
    std::vector<const char*> flags;
  } cases[] = {
      {"verify", {"--sizes", "--trials", "--seed", "--inject-bug"}},
      {"gen-data", {"--config", "--out", "--seed", "--images-per-class", "--classes", "--size"}},
      {"train",
       {"--config", "--variant", "--data", "--holdout", "--seed", "--lr", "--epochs", "--iters",
        "--batch", "--momentum-stats", "--val-fraction", "--min-lr", "--tolerance",
        "--stop-grad-stats", "--out"}},
      {"eval", {"--checkpoint", "--data", "--holdout", "--out"}},
      {"lambdas", {"--checkpoint", "--out"}},
      {"ablate-lambda", {"--checkpoint", "--module", "--value", "--data", "--holdout", "--out"}},
      {"style-transfer", {"--mode", "--content", "--style", "--ratio", "--band", "--out"}},
  };
  for (const auto& c : cases) {
    const CliRun r = run(std::string(c.cmd) + " --help");
    EXPECT_EQ(r.code, 0) << c.cmd;
    for (const char* f : c.flags) EXPECT_NE(r.out.find(f), std::string::npos) << c.cmd << " " << f;
  }
  const CliRun top = run("--help");
  EXPECT_EQ(top.code, 0);
  for (const char* sub : {"verify", "selftest", "gen-data", "train", "eval", "lambdas",
                          "ablate-lambda", "style-transfer"}) {
    EXPECT_NE(top.out.find(sub), std::string::npos) << sub;
  }
}

TEST_F(CliTest, VerifyPassesWithinTolerance) {
  const CliRun r = run("verify --sizes 3-8 --trials 4");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("verify PASS"), std::string::npos);
  const std::regex err(R"(max_error=([0-9.eE+-]+))");
  std::size_t seen = 0;
  for (auto it = std::sregex_iterator(r.out.begin(), r.out.end(), err);
       it != std::sregex_iterator(); ++it, ++seen) {
    EXPECT_LE(std::stod((*it)[1].str()), 1e-9) << it->str();
  }
  EXPECT_GT(seen, 0u) << r.out;
}

TEST_F(CliTest, VerifyDegenerateSize) {
  const CliRun r = run("verify --sizes 1x1 --trials 2");
  EXPECT_EQ(r.code, 0) << r.out;
}

TEST_F(CliTest, InjectedBugIsCaught) {
  const CliRun r = run("verify --sizes 4-6 --trials 2 --inject-bug");
  EXPECT_EQ(r.code, 3) << r.out;
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  const CliRun unknown = run("verify --bogus");
  EXPECT_EQ(unknown.code, 2) << unknown.out;
  EXPECT_NE(unknown.out.find("error: kind="), std::string::npos);
  EXPECT_EQ(run("").code, 2);
  const CliRun missing = run("train --variant baseline");
  EXPECT_EQ(missing.code, 2) << missing.out;
  const CliRun variant = run(train_args("resnet", "bad"));
  EXPECT_EQ(variant.code, 2) << variant.out;
}

TEST_F(CliTest, TrainEvalRoundTrip) {
  ASSERT_EQ(data_.code, 0) << data_.out;
  const CliRun t = run(train_args("baseline", "ck_base"));
  ASSERT_EQ(t.code, 0) << t.out;
  EXPECT_NE(t.out.find("run baseline-sketch-s3 best_epoch="), std::string::npos) << t.out;
  EXPECT_TRUE(fs::exists(path("ck_base") + "/results.csv"));
  EXPECT_TRUE(fs::exists(path("ck_base") + "/lambdas.csv"));

  const CliRun e = run("eval --checkpoint " + path("ck_base") + " --data " + path("data"));
  ASSERT_EQ(e.code, 0) << e.out;
  const std::regex row(R"(run_id,variant,held_out,test_acc\nbaseline-sketch-s3,baseline,sketch,[0-9.]+)");
  EXPECT_TRUE(std::regex_search(e.out, row)) << e.out;
}

TEST_F(CliTest, UntrainedLambdasAreHalf) {
  ASSERT_EQ(data_.code, 0) << data_.out;
  const CliRun t = run(train_args("dac_sc", "ck_sc", "--lr 0"));
  ASSERT_EQ(t.code, 0) << t.out;
  const CliRun l = run("lambdas --checkpoint " + path("ck_sc"));
  ASSERT_EQ(l.code, 0) << l.out;
  std::istringstream in(l.out);
  std::string line;
  std::getline(in, line);  // header
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    EXPECT_NE(line.find(",0.5,0.5"), std::string::npos) << line;
  }
  EXPECT_EQ(rows, 7u) << l.out;

  const CliRun a = run("ablate-lambda --checkpoint " + path("ck_sc") + " --module scnorm9");
  EXPECT_EQ(a.code, 2) << a.out;
}

TEST_F(CliTest, StyleTransferSelfSwapIsPixelIdentical) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> d(0, 255);
  Image8 img;
  img.width = 12;
  img.height = 10;
  img.rgb.resize(12 * 10 * 3);
  for (auto& b : img.rgb) b = static_cast<std::uint8_t>(d(gen));
  write_image(path("in.png"), image_to_tensor(img));
  const CliRun r = run("style-transfer --mode swap --content " + path("in.png") + " --style " +
                    path("in.png") + " --out " + path("out.png"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("clipped_fraction="), std::string::npos);
  EXPECT_EQ(read_image(path("out.png")), read_image(path("in.png")));
}

TEST_F(CliTest, MissingFileIsIoError) {
  const std::string missing = path("nowhere/ck");
  const CliRun r = run("lambdas --checkpoint " + missing);
  EXPECT_EQ(r.code, 4) << r.out;
  EXPECT_NE(r.out.find("error: kind=io"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find(missing), std::string::npos) << r.out;
}

TEST_F(CliTest, DeterministicTrain) {
  ASSERT_EQ(data_.code, 0) << data_.out;
  ASSERT_EQ(run(train_args("dac_p", "det_a")).code, 0);
  ASSERT_EQ(run(train_args("dac_p", "det_b")).code, 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(path("det_a"))) {
    ++files;
    EXPECT_EQ(slurp(e.path()), slurp(fs::path(path("det_b")) / e.path().filename()))
        << e.path().filename();
  }
  EXPECT_GE(files, 3u);
}

TEST_F(CliTest, Selftest) {
  const CliRun r = run("selftest");
  EXPECT_EQ(r.code, 0) << r.out;
}

}  // namespace
}  // namespace freqnorm
