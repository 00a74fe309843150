// Copyright 2026 The Tempo Authors. All Rights Reserved.
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


#include <gtest/gtest.h>

#include <cstdlib>
#include <sys/wait.h>

#include "tempo/io.hpp"

namespace tempo {
namespace {

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "tempo_cli_test";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " \"" + TEMPO_CLI_PATH + "\" " + args + " > \"" +
                            (dir_ / "stdout.txt").string() + "\" 2> \"" +
                            (dir_ / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  static std::string out() { return read_file(dir_ / "stdout.txt"); }
  static std::string path(const std::string& rel) { return (dir_ / rel).string(); }

  static std::string tiny_flags() {
    return "--channels 4,8 --num-blocks 2 --groups 2 --frames 4 --crop 12 --scale-min 14 "
           "--scale-max 16 --scales 12,14,16 --num-clips 2 --crops 2 --batch 2 --max-iters 4 "
           "--warmup-iters 1 --eval-interval 2 --checkpoint-interval 2 ";
  }

  static inline fs::path dir_;
};

TEST_F(Cli, GenSynthIsDeterministic) {
  ASSERT_EQ(run("gen-synth --out-dir " + path("a") + " --num-videos 6 --frames 8 --height 16 --width 16"), 0);
  ASSERT_EQ(run("gen-synth --out-dir " + path("b") + " --num-videos 6 --frames 8 --height 16 --width 16"), 0);
  EXPECT_EQ(read_file(path("a/train.txt")), read_file(path("b/train.txt")));
  EXPECT_EQ(read_file(path("a/train/vid_00005.xvid")), read_file(path("b/train/vid_00005.xvid")));
  EXPECT_EQ(run("gen-synth --out-dir " + path("c") + " --num-videos 5"), 1);
}

TEST_F(Cli, TrainEvalMapEnsemble) {
  ASSERT_EQ(run("gen-synth --out-dir " + path("d") + " --num-videos 6 --frames 8 --height 16 --width 16"), 0);
  ASSERT_EQ(run("gen-synth --out-dir " + path("d") + " --split val --num-videos 4 --frames 8 "
                "--height 16 --width 16 --seed 3"), 0);
  const std::string env = "X_TEMPORAL_DATA_ROOT=\"" + path("d") + "\"";
  ASSERT_EQ(run("train " + tiny_flags() + "--output-dir " + path("run"), env), 0) << out();
  EXPECT_TRUE(fs::exists(path("run/final.xtck")));
  EXPECT_TRUE(fs::exists(path("run/checkpoint_00000002.xtck")));

  ASSERT_EQ(run("train " + tiny_flags() + "--output-dir " + path("run2"), env), 0);
  EXPECT_EQ(read_file(path("run/final.xtck")), read_file(path("run2/final.xtck")));
  fs::copy(path("run"), path("run3"));
  fs::remove(path("run3/final.xtck"));
  ASSERT_EQ(run("train --config " + path("run/config.txt") + " --output-dir " + path("run3") +
                    " --resume " + path("run3/checkpoint_00000002.xtck"),
                env),
            0);
  EXPECT_EQ(read_file(path("run/final.xtck")), read_file(path("run3/final.xtck")));
  EXPECT_EQ(read_file(path("run/train.log")), read_file(path("run3/train.log")));

  ASSERT_EQ(run("eval --config " + path("run/config.txt") + " --checkpoint " +
                    path("run/final.xtck") + " --mode dense --output " + path("dense.txt"),
                env),
            0);
  EXPECT_NE(out().find("views_per_video\t12"), std::string::npos);
  EXPECT_NE(out().find("sample_mAP\t"), std::string::npos);
  const ScoreMatrix preds = read_scores(path("dense.txt"));
  EXPECT_EQ(preds.num_samples(), 4u);
  EXPECT_EQ(preds.num_classes, 6u);

  ASSERT_EQ(run("map --predictions " + path("dense.txt") + " --labels " + path("d/val.txt")), 0);
  const std::string single = out();
  const std::string sample = single.substr(0, single.find('\n'));
  ASSERT_EQ(run("ensemble --predictions " + path("dense.txt") + " " + path("dense.txt") +
                " --labels " + path("d/val.txt") + " --output " + path("ens.txt")),
            0);
  EXPECT_NE(out().find("ensemble\t" + sample), std::string::npos) << out();
  EXPECT_EQ(read_file(path("ens.txt")), read_file(path("dense.txt")));

  EXPECT_EQ(run("eval --config " + path("run/config.txt") + " --channels 4,4 --checkpoint " +
                    path("run/final.xtck"),
                env),
            1);
  EXPECT_EQ(run("ensemble --predictions " + path("dense.txt") + " --weights 0.5 --labels " +
                path("d/val.txt") + " --predictions " + path("dense.txt")),
            1);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("train --no-such-key 3"), 1);
  EXPECT_EQ(run("train --lr fast"), 1);
  EXPECT_EQ(run("train --temporal-mode lstm"), 1);
  EXPECT_EQ(run("train --data-root " + path("missing")), 2);
  EXPECT_EQ(run("eval --checkpoint " + path("missing.xtck")), 2);
  EXPECT_EQ(run("map --predictions " + path("missing.txt") + " --labels x"), 2);
  EXPECT_EQ(run("map --predictions x --labels y --mode micro"), 1);
  EXPECT_EQ(run(""), 1);
}

TEST_F(Cli, GradcheckReportsFaultWithExitThree) {
  EXPECT_EQ(run("gradcheck --scope ops --cases 5 --inject-fault interlace"), 3);
  EXPECT_NE(out().find("interlace"), std::string::npos);
  EXPECT_NE(out().find("FAIL"), std::string::npos);
  EXPECT_EQ(run("gradcheck --scope ops --cases 5"), 0);
  EXPECT_EQ(run("gradcheck --inject-fault nothing"), 1);
}

}  // namespace
}  // namespace tempo
