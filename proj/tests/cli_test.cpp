// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nle/cli/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "nle-desk");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = nle::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("nle_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// Small enough for a few seconds of training.
std::string tiny_config(const fs::path& dir) {
  const auto p = dir / "tiny.cfg";
  std::ofstream(p) << "train.steps=6\ntrain.batch_size=3\ntrain.base_steps=3\ntrain.eval_every=3\n"
                      "train.checkpoint_every=3\ntrain.valid_max=8\nmodel.d_model=16\nmodel.heads=2\n"
                      "model.d_ff=32\nmodel.lora_rank=4\nmodel.lora_alpha=4\n";
  return p.string();
}

std::string gen_small(const fs::path& dir) {
  EXPECT_EQ(run({"gen", "--out", dir.string(), "--n", "200", "--seed", "3"}).code, 0);
  return (dir / "corpus.txt").string();
}

class PrecisionEnv {
 public:
  explicit PrecisionEnv(const char* v) { setenv("NLE_DESK_PRECISION", v, 1); }
  ~PrecisionEnv() { unsetenv("NLE_DESK_PRECISION"); }
};

}  // namespace

TEST(Cli, UsageMatchesGolden) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, slurp(fs::path(NLE_GOLDEN_DIR) / "usage.txt"));
  EXPECT_EQ(nle::cli::usage(), r.out);
}

TEST(Cli, UsageErrorsExitTwo) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {}, {"frobnicate"}, {"gen", "--out", "x", "--bogus"}, {"eval"}, {"gen", "--n", "many", "--out", "x"}}) {
    const auto r = run(args);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("Usage: nle-desk"), std::string::npos);
  }
}

TEST(Cli, RuntimeErrorsExitOne) {
  const auto d = scratch("runtime");
  EXPECT_EQ(run({"eval", "--corpus", (d / "missing.txt").string()}).code, 1);
  const auto c = gen_small(d);
  auto r = run({"eval", "--corpus", c, "--split", "dev"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  r = run({"eval", "--corpus", c, "--system", "editor"});
  EXPECT_EQ(r.code, 1);
  {
    PrecisionEnv env("f16");
    EXPECT_EQ(run({"eval", "--corpus", c}).code, 1);
  }
}

TEST(Cli, GenIsByteIdentical) {
  const auto a = scratch("gen_a"), b = scratch("gen_b");
  const auto ca = gen_small(a), cb = gen_small(b);
  EXPECT_EQ(slurp(ca), slurp(cb));
  EXPECT_FALSE(slurp(ca).empty());
  const auto c = scratch("gen_c");
  EXPECT_EQ(run({"gen", "--out", c.string(), "--n", "200", "--seed", "4"}).code, 0);
  EXPECT_NE(slurp(ca), slurp(c / "corpus.txt"));
}

TEST(Cli, PassthroughEvalWritesReport) {
  const auto d = scratch("pass");
  const auto c = gen_small(d);
  const auto r = run({"eval", "--corpus", c, "--out", (d / "ev").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("eval: passthrough"), std::string::npos);
  const auto summary = slurp(d / "ev" / "summary.txt");
  EXPECT_NE(summary.find("identity_holds=true"), std::string::npos);
  EXPECT_NE(summary.find("forward_calls_per_utt=0"), std::string::npos);
}

TEST(Cli, TrainEvalPipeline) {
  const auto d = scratch("pipe");
  const auto c = gen_small(d);
  const auto cfg = tiny_config(d);
  const auto ed = (d / "ed").string(), ed2 = (d / "ed2").string(), ar = (d / "ar").string();

  auto r = run({"train", "--corpus", c, "--config", cfg, "--out", ed});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("6 steps"), std::string::npos);
  r = run({"train", "--corpus", c, "--config", cfg, "--out", ed2});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(fs::path(ed) / "metrics.csv"), slurp(fs::path(ed2) / "metrics.csv"));

  // explicit flags override the config file
  r = run({"train", "--corpus", c, "--config", cfg, "--steps", "4", "--objective", "ar", "--out", ar});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("train: ar[full] 4 steps"), std::string::npos);

  const auto ck = (fs::path(ed) / "last.ckpt").string();
  const auto e1 = (d / "e1").string(), e2 = (d / "e2").string();
  ASSERT_EQ(run({"eval", "--corpus", c, "--checkpoint", ck, "--out", e1}).code, 0);
  ASSERT_EQ(run({"eval", "--corpus", c, "--checkpoint", ck, "--out", e2, "--workers", "3"}).code, 0);
  EXPECT_EQ(slurp(fs::path(e1) / "eval.csv"), slurp(fs::path(e2) / "eval.csv"));
  EXPECT_NE(slurp(fs::path(e1) / "summary.txt").find("forward_calls_per_utt=1\n"), std::string::npos);

  r = run({"multistep-sweep", "--corpus", c, "--checkpoint", ck, "--out", (d / "ms").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("call counts exact"), std::string::npos);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 5);

  r = run({"bench", "--corpus", c, "--checkpoint", ck, "--ar-checkpoint", (fs::path(ar) / "last.ckpt").string(),
           "--limit", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("editor 1 call/utt ok"), std::string::npos);
  EXPECT_NE(r.out.find("ar len+1 calls ok"), std::string::npos);

  r = run({"show-edits", "--corpus", c, "--checkpoint", ck, "--limit", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3 * 4 + 1);
  EXPECT_NE(r.out.find("REF  "), std::string::npos);
}

TEST(Cli, DoublePrecisionTrains) {
  PrecisionEnv env("f64");
  const auto d = scratch("f64");
  const auto c = gen_small(d);
  const auto r = run({"train", "--corpus", c, "--config", tiny_config(d), "--no-lora", "--out", (d / "m").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("editor[NoLoRA]"), std::string::npos);
}

TEST(Cli, ShowEditsTags) {
  using nle::cli::detail::tag_edit;
  using nle::cli::detail::tag_hypothesis;
  const std::vector<std::string> ref{"the", "cat", "sat"}, hyp{"the", "cap", "sat"};
  EXPECT_EQ(tag_hypothesis(ref, hyp), "the [ERR:cap] sat");
  EXPECT_EQ(tag_edit(ref, hyp, {"the", "cat", "sat"}), "the [FIX:cat] sat");
  EXPECT_EQ(tag_edit(ref, hyp, {"the", "cap"}), "the [ERR:cap] [LOST:sat]");
}
