// Copyright 2026 The Qeyboard Authors
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

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qeyboard/wav.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string &args) {
    const std::string cmd = std::string(QEYBOARD_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string bytes(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("qeyboard_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string out(const std::string &name) const { return (dir_ / name).string(); }
    std::string score(const std::string &name) const { return std::string(QEYBOARD_SCORES_DIR) + "/" + name; }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, usage_errors_exit_2) {
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("render"), 2);
    EXPECT_EQ(run("render --score x.json --out y.wav --bogus"), 2);
    EXPECT_EQ(run("--help"), 0);
}

TEST_F(CliTest, input_errors_exit_3) {
    EXPECT_EQ(run("render --score /nonexistent.json --out " + out("a.wav")), 3);
    {
        std::ofstream f(out("bad.json"));
        f << "{\"version\": 1, \"n_qubits\": ";
    }
    EXPECT_EQ(run("render --score " + out("bad.json") + " --out " + out("a.wav")), 3);
    EXPECT_EQ(run("ising --n 1 --out " + out("b.wav")), 3);
    EXPECT_EQ(run("ising --h-grid 2:0:0.1 --out " + out("b.wav")), 3);
}

TEST_F(CliTest, render_writes_wav_csv_and_meta) {
    ASSERT_EQ(run("render --score " + score("piecewise.json") + " --out " + out("p.wav") + " --features " +
                  out("p.csv") + " --spectrogram " + out("p.spec.csv")),
              0);
    const auto w = qeyboard::decode_wav(std::vector<std::uint8_t>(
        std::istreambuf_iterator<char>(*std::make_unique<std::ifstream>(out("p.wav"), std::ios::binary)), {}));
    EXPECT_EQ(w.sample_rate, 44100);
    EXPECT_EQ(w.samples.size(), 8u * 44100u);
    EXPECT_TRUE(fs::exists(out("p.meta.json")));
    EXPECT_TRUE(fs::exists(out("p.spec.csv")));
    std::ifstream csv(out("p.csv"));
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "t,f_0,i_0");
}

TEST_F(CliTest, render_is_deterministic) {
    const std::string s = score("piecewise_noisy.json");
    ASSERT_EQ(run("render --score " + s + " --out " + out("a.wav") + " --features " + out("a.csv")), 0);
    ASSERT_EQ(run("render --score " + s + " --out " + out("b.wav") + " --features " + out("b.csv")), 0);
    EXPECT_EQ(bytes(out("a.wav")), bytes(out("b.wav")));
    EXPECT_EQ(bytes(out("a.csv")), bytes(out("b.csv")));
    // seed override changes the noisy result
    ASSERT_EQ(run("render --score " + s + " --seed 8 --out " + out("c.wav")), 0);
    EXPECT_NE(bytes(out("a.wav")), bytes(out("c.wav")));
}

TEST_F(CliTest, ising_modes) {
    ASSERT_EQ(run("ising --mode spectrum --n 3 --h-grid 0:1:0.5 --out " + out("s.wav") + " --csv " + out("s.csv")), 0);
    std::ifstream csv(out("s.csv"));
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header.substr(0, 8), "h,E_0,E_");
    ASSERT_EQ(run("ising --mode magnetization --n 3 --h-grid 0:1:0.5 --out " + out("m.wav")), 0);
    ASSERT_EQ(run("ising --mode callback --n 2 --h 0.5 --levels 2 --starts 1 --seed 3 --out " + out("c.wav") +
                  " --csv " + out("c.csv")),
              0);
    ASSERT_EQ(run("ising --mode callback --n 2 --h 0.5 --levels 2 --starts 1 --seed 3 --out " + out("d.wav") +
                  " --csv " + out("d.csv")),
              0);
    EXPECT_EQ(bytes(out("c.wav")), bytes(out("d.wav")));
    EXPECT_EQ(bytes(out("c.csv")), bytes(out("d.csv")));
}
