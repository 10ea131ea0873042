// End-to-end checks of the installed command-line binary. The test runner
// passes the executable location through the NSPFORGE_CLI environment
// variable; every invocation here shells out to that binary.
#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "nspforge/io.hpp"
#include "nspforge/model.hpp"
#include "support/golden.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
  int code = -1;
  std::string out;
};

const std::string& cli_path() {
  static const std::string path = [] {
    const char* env = std::getenv("NSPFORGE_CLI");
    return env ? std::string(env) : std::string();
  }();
  return path;
}

RunResult run_cli(const std::string& args, const std::string& log_mode = "quiet",
                  const std::string& stderr_path = "/dev/null") {
  const std::string command = "env NSPFORGE_LOG=" + log_mode + " " + cli_path() + " " + args +
                              " 2>" + stderr_path;
  RunResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return result;
  char buffer[4096];
  std::size_t got;
  while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0) result.out.append(buffer, got);
  const int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string read_all(const fs::path& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>{});
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    ASSERT_FALSE(cli_path().empty()) << "NSPFORGE_CLI must point at the binary";
    dir_ = fs::path(::testing::TempDir()) / "nspforge_cli";
    fs::create_directories(dir_);

    write(dir_ / "txns.csv", golden::kTransactionsCsv);
    write(dir_ / "quantities.csv", golden::kQuantityCsv);
    write(dir_ / "tiny.txt", golden::kTinyInstance);
    write(dir_ / "nb_train.csv", golden::kNbTrainCsv);
    write(dir_ / "nb_test.csv", golden::kNbTestCsv);

    // Impossible variant of the tiny instance: every slot demands both
    // nurses, but no domain pattern covers every slot.
    std::string blocked = golden::kTinyInstance;
    std::size_t pos = 0;
    while ((pos = blocked.find("1/2", pos)) != std::string::npos) blocked.replace(pos, 3, "2/2");
    write(dir_ / "blocked.txt", blocked);

    // Rank-2 matrix with an exact factorization, written as numeric CSV.
    write(dir_ / "planted.csv",
          "1,2,4,5,2,1,4\n2,1,5,4,1,2,5\n3,1,7,5,1,3,7\n1,1,3,3,1,1,3\n2,3,7,8,3,2,7\n");
    write(dir_ / "mask.csv",
          "0,1,1,1,1,1,1\n1,1,1,1,1,1,1\n1,1,1,1,1,1,1\n1,1,1,1,1,1,1\n1,1,1,1,1,1,0\n");
    write(dir_ / "partial.csv",
          "0,2,4,5,2,1,4\n2,1,5,4,1,2,5\n3,1,7,5,1,3,7\n1,1,3,3,1,1,3\n2,3,7,8,3,2,0\n");

    // Bound-extraction corpus: one roster, duplicated.
    nsp::Schedule roster(2, 1, 2);
    roster.set(0, 0, true);
    roster.set(1, 1, true);
    fs::create_directories(dir_ / "corpus");
    write(dir_ / "corpus" / "a.csv", nsp::io::schedule_to_csv(roster));
    write(dir_ / "corpus" / "b.csv", nsp::io::schedule_to_csv(roster));
    write(dir_ / "shift_costs.csv", "1,2\n1,2\n");

    // History roster for the posterior sampler.
    nsp::Schedule history(3, 2, 2);
    history.set(0, 0, true);
    history.set(1, 2, true);
    history.set(2, 3, true);
    write(dir_ / "history.csv", nsp::io::schedule_to_csv(history));

    // Coverage-only instance matching the five transaction items.
    write(dir_ / "sim_target.txt",
          "[meta]\nn=5\ndays=7\nshifts=1\ny=2\n[coverage]\n1/3,1/3,1/3,1/3,1/3,1/3,1/3\n"
          "[limits]\nnurse_1,5,3\nnurse_2,5,3\nnurse_3,5,3\nnurse_4,5,3\nnurse_5,5,3\n"
          "[costs]\n1\n1\n1\n1\n1\n");
  }

  static void write(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
  }

  static std::string arg(const fs::path& p) { return p.string(); }

  static fs::path dir_;
};

fs::path CliTest::dir_;

TEST_F(CliTest, HelpSucceedsAndNamesTheSubcommands) {
  const auto result = run_cli("--help");
  EXPECT_EQ(result.code, 0);
  EXPECT_NE(result.out.find("mine"), std::string::npos);
  EXPECT_NE(result.out.find("solve"), std::string::npos);
  EXPECT_NE(result.out.find("learn"), std::string::npos);
}

TEST_F(CliTest, UsageMistakesExitWithOne) {
  EXPECT_EQ(run_cli("mine rules").code, 1);   // missing required --in
  EXPECT_EQ(run_cli("mine rules --in " + arg(dir_ / "txns.csv") + " --no-such-flag").code, 1);
  EXPECT_EQ(run_cli("totally-unknown").code, 1);
  // Stochastic subcommands refuse to run without an explicit seed.
  EXPECT_EQ(run_cli("solve sls --in " + arg(dir_ / "tiny.txt")).code, 1);
  EXPECT_EQ(run_cli("bayes simulate --history " + arg(dir_ / "history.csv")).code, 1);
}

TEST_F(CliTest, MissingAndMalformedInputsExitWithOne) {
  EXPECT_EQ(run_cli("mine rules --in /no/such/file.csv").code, 1);
  const auto bad = dir_ / "bad.csv";
  write(bad, "#universe: A\nrow1,B\n");  // item outside the declared universe
  EXPECT_EQ(run_cli("mine rules --in " + arg(bad)).code, 1);
}

TEST_F(CliTest, MineRulesMatchesTheFrozenCounts) {
  const auto result = run_cli("mine rules --in " + arg(dir_ / "txns.csv") +
                              " --min-support 2 --min-confidence 3/5 --single-consequent"
                              " --min-antecedent 2");
  ASSERT_EQ(result.code, 0);
  const auto j = json::parse(result.out);
  EXPECT_EQ(j["transaction_count"].get<int>(), 7);
  EXPECT_EQ(j["min_support_count"].get<int>(), 2);
  EXPECT_EQ(j["frequent"].size(), 17u);
  ASSERT_EQ(j["rules"].size(), 6u);
  for (const auto& rule : j["rules"]) EXPECT_EQ(rule["confidence"].get<std::string>(), "1");

  // A fractional threshold is scaled by the transaction count: 2/7 of 7.
  const auto ratio = run_cli("mine rules --in " + arg(dir_ / "txns.csv") +
                             " --min-support 2/7 --min-confidence 3/5");
  ASSERT_EQ(ratio.code, 0);
  EXPECT_EQ(json::parse(ratio.out)["min_support_count"].get<int>(), 2);
}

TEST_F(CliTest, MineHuimMatchesTheFrozenCounts) {
  const auto result =
      run_cli("mine huim --in " + arg(dir_ / "quantities.csv") + " --min-utility 15");
  ASSERT_EQ(result.code, 0);
  const auto j = json::parse(result.out);
  EXPECT_EQ(j["phase1"].size(), 19u);
  EXPECT_EQ(j["phase2"].size(), 14u);
}

TEST_F(CliTest, SolveBnbReportsOptimumOptimaAndNodeCounts) {
  const std::string base = "solve bnb --in " + arg(dir_ / "tiny.txt") + " --sense max";
  const auto raw = run_cli(base + " --all-optima");
  ASSERT_EQ(raw.code, 0);
  const auto j = json::parse(raw.out);
  EXPECT_EQ(j["status"], "optimal");
  EXPECT_TRUE(j["optimal"].get<bool>());
  EXPECT_EQ(j["cost"].get<std::string>(), "6");
  EXPECT_EQ(j["stats"]["nodes_expanded"].get<long long>(), 9);
  ASSERT_EQ(j["optima"].size(), 2u);

  const auto filtered = run_cli(base + " --nc --gac");
  ASSERT_EQ(filtered.code, 0);
  const auto fj = json::parse(filtered.out);
  EXPECT_EQ(fj["cost"].get<std::string>(), "6");
  EXPECT_EQ(fj["stats"]["nodes_expanded"].get<long long>(), 4);
}

TEST_F(CliTest, UnsolvableInstanceExitsTwoWithProof) {
  const auto result = run_cli("solve bnb --in " + arg(dir_ / "blocked.txt"));
  EXPECT_EQ(result.code, 2);
  const auto j = json::parse(result.out);
  EXPECT_EQ(j["status"], "infeasible");
  EXPECT_TRUE(j["proved_infeasible"].get<bool>());
  EXPECT_TRUE(j["assignment"].is_null());

  // A node budget that runs out is also "no solution", but not a proof.
  const auto capped =
      run_cli("solve bnb --in " + arg(dir_ / "tiny.txt") + " --node-limit 1");
  EXPECT_EQ(capped.code, 2);
  const auto cj = json::parse(capped.out);
  EXPECT_EQ(cj["status"], "budget_exhausted");
  EXPECT_FALSE(cj["proved_infeasible"].get<bool>());
}

TEST_F(CliTest, LocalSearchFindsTheTinyOptimumUnderEveryInit) {
  for (const std::string init : {"random", "dfs", "dfs-cp"}) {
    const auto result = run_cli("solve sls --in " + arg(dir_ / "tiny.txt") +
                                " --init " + init + " --budget 25 --seed 3");
    ASSERT_EQ(result.code, 0) << init;
    const auto j = json::parse(result.out);
    EXPECT_EQ(j["cost"].get<std::string>(), "6") << init;
    ASSERT_FALSE(j["cost_trace"].empty());
  }
}

TEST_F(CliTest, BayesTrainPredictEvaluatePipeline) {
  const auto model_path = dir_ / "model.json";
  const auto train = run_cli("bayes train --in " + arg(dir_ / "nb_train.csv") +
                             " --target-col Shift4 --out " + arg(model_path));
  ASSERT_EQ(train.code, 0);
  EXPECT_TRUE(train.out.empty());  // --out keeps stdout silent
  ASSERT_TRUE(fs::exists(model_path));

  const auto predict = run_cli("bayes predict --model " + arg(model_path) + " --in " +
                               arg(dir_ / "nb_test.csv") + " --target-col Shift4 --evaluate");
  ASSERT_EQ(predict.code, 0);
  const auto j = json::parse(predict.out);
  EXPECT_EQ(j["accuracy"].get<std::string>(), "2/3");
  EXPECT_EQ(j["hits"].get<int>(), 4);
  EXPECT_EQ(j["misses"].get<int>(), 2);
  ASSERT_EQ(j["predictions"].size(), 6u);
  EXPECT_EQ(j["predictions"][0]["row"], "Day15");
  EXPECT_EQ(j["predictions"][0]["label"], "N3");
  EXPECT_EQ(j["predictions"][0]["scores"]["N1"].get<std::string>(), "1/189");
}

TEST_F(CliTest, SeededSubcommandsAreByteDeterministic) {
  const std::string sim = "mine simulate --from " + arg(dir_ / "txns.csv") + " --instance " +
                          arg(dir_ / "sim_target.txt") +
                          " --min-support 2 --min-confidence 3/5 --count 2 --seed 9";
  const auto sim1 = run_cli(sim), sim2 = run_cli(sim);
  ASSERT_EQ(sim1.code, 0);
  EXPECT_EQ(sim1.out, sim2.out);

  const std::string bayes = "bayes simulate --history " + arg(dir_ / "history.csv") +
                            " --count 3 --seed 11";
  const auto b1 = run_cli(bayes), b2 = run_cli(bayes);
  ASSERT_EQ(b1.code, 0);
  EXPECT_EQ(b1.out, b2.out);

  const std::string sls = "solve sls --in " + arg(dir_ / "tiny.txt") +
                          " --init random --budget 10 --seed 21";
  const auto s1 = run_cli(sls), s2 = run_cli(sls);
  ASSERT_EQ(s1.code, 0);
  EXPECT_EQ(s1.out, s2.out);

  const std::string nmf = "learn nmf --in " + arg(dir_ / "planted.csv") +
                          " --rank 2 --max-iter 120 --tol 0 --seed 1";
  const auto n1 = run_cli(nmf), n2 = run_cli(nmf);
  ASSERT_EQ(n1.code, 0);
  EXPECT_EQ(n1.out, n2.out);
}

TEST_F(CliTest, LearnCspEmitsContractKeysAndABuildableInstance) {
  const auto instance_path = dir_ / "learned_instance.txt";
  const auto result = run_cli("learn csp --in " + arg(dir_ / "corpus") + " --instance-out " +
                              arg(instance_path) + " --costs " + arg(dir_ / "shift_costs.csv"));
  ASSERT_EQ(result.code, 0);
  const auto j = json::parse(result.out);
  EXPECT_EQ(j["n"].get<int>(), 2);
  EXPECT_EQ(j["days"].get<int>(), 1);
  EXPECT_EQ(j["shifts_per_day"].get<int>(), 2);
  EXPECT_EQ(j["domain_exponent"].get<int>(), 2);
  EXPECT_EQ(j["c2"].get<int>(), 1);
  EXPECT_EQ(j["c3"].get<int>(), 1);
  EXPECT_TRUE(j["c4"].get<bool>());
  EXPECT_EQ(j["c5"].get<int>(), 1);
  EXPECT_EQ(j["c5_min"].get<int>(), 1);

  // The materialized instance is itself solvable input.
  const auto solve = run_cli("solve dfs --in " + arg(instance_path));
  ASSERT_EQ(solve.code, 0);
  const auto sj = json::parse(solve.out);
  EXPECT_EQ(sj["status"], "feasible");

  // Requesting an instance without per-shift costs is a usage error.
  EXPECT_EQ(run_cli("learn csp --in " + arg(dir_ / "corpus") + " --instance-out " +
                    arg(dir_ / "x.txt"))
                .code,
            1);
}

TEST_F(CliTest, LearnNmfAndCompleteRecoverHiddenCells) {
  const auto factors_path = dir_ / "factors.json";
  const auto nmf = run_cli("learn nmf --in " + arg(dir_ / "planted.csv") +
                           " --rank 2 --max-iter 400 --tol 0 --seed 1 --out " +
                           arg(factors_path));
  ASSERT_EQ(nmf.code, 0);
  const auto factors = json::parse(read_all(factors_path));
  EXPECT_EQ(factors["rank"].get<int>(), 2);
  EXPECT_LT(factors["error"].get<double>(), 1e-6);

  const auto complete = run_cli("learn complete --factors " + arg(factors_path) + " --in " +
                                arg(dir_ / "partial.csv") + " --mask " + arg(dir_ / "mask.csv"));
  ASSERT_EQ(complete.code, 0);
  const auto j = json::parse(complete.out);
  EXPECT_TRUE(j["accepted"].get<bool>());
  // The two hidden corners come back as the planted integers 1 and 7.
  EXPECT_DOUBLE_EQ(j["completed"][0][0].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(j["completed"][4][6].get<double>(), 7.0);

  // The same matrix with one known cell shifted far away is rejected.
  auto far = read_all(dir_ / "partial.csv");
  far.replace(far.find("5,4"), 3, "5,900");
  write(dir_ / "far.csv", far);
  const auto rejected = run_cli("learn complete --factors " + arg(factors_path) + " --in " +
                                arg(dir_ / "far.csv") + " --mask " + arg(dir_ / "mask.csv"));
  ASSERT_EQ(rejected.code, 0);
  const auto rj = json::parse(rejected.out);
  EXPECT_FALSE(rj["accepted"].get<bool>());
  EXPECT_FALSE(rj.contains("completed"));
}

TEST_F(CliTest, LearnBenchReportsOneTimedRowPerSize) {
  const auto result = run_cli("learn bench --sizes 2,4 --seed 5");
  ASSERT_EQ(result.code, 0);
  const auto j = json::parse(result.out);
  ASSERT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(j["rows"][0]["corpus_size"].get<int>(), 2);
  EXPECT_EQ(j["rows"][1]["corpus_size"].get<int>(), 4);
  for (const auto& row : j["rows"]) EXPECT_GT(row["seconds"].get<double>(), 0.0);
}

TEST_F(CliTest, EvalFnAndReport) {
  write(dir_ / "a.csv", "1,2\n3,4\n");
  write(dir_ / "b.csv", "4,2\n3,0\n");
  const auto fn = run_cli("eval fn --a " + arg(dir_ / "a.csv") + " --b " + arg(dir_ / "b.csv"));
  ASSERT_EQ(fn.code, 0);
  EXPECT_DOUBLE_EQ(json::parse(fn.out)["frobenius"].get<double>(), 5.0);
  EXPECT_EQ(run_cli("eval fn --a " + arg(dir_ / "a.csv") + " --b " +
                    arg(dir_ / "planted.csv"))
                .code,
            1);  // shape mismatch

  const auto report = run_cli("eval report --reference " + arg(dir_ / "corpus" / "a.csv") +
                              " --generated " + arg(dir_ / "corpus") + " --method self --mode max");
  ASSERT_EQ(report.code, 0);
  const auto j = json::parse(report.out);
  EXPECT_EQ(j["method"], "self");
  EXPECT_EQ(j["count"].get<int>(), 2);
  EXPECT_DOUBLE_EQ(j["aggregate"].get<double>(), 0.0);  // corpus equals the reference
}

TEST_F(CliTest, QuietModeSilencesStderrAndDefaultModeDoesNot) {
  const auto err_quiet = dir_ / "stderr_quiet.txt";
  const auto err_loud = dir_ / "stderr_default.txt";
  const std::string args = "mine rules --in " + arg(dir_ / "txns.csv") + " --min-support 2";
  ASSERT_EQ(run_cli(args, "quiet", arg(err_quiet)).code, 0);
  EXPECT_TRUE(read_all(err_quiet).empty());
  ASSERT_EQ(run_cli(args, "default", arg(err_loud)).code, 0);
  EXPECT_FALSE(read_all(err_loud).empty());
}

TEST_F(CliTest, OutFlagRedirectsThePrimaryOutput) {
  const auto out_path = dir_ / "rules.json";
  const auto result = run_cli("mine rules --in " + arg(dir_ / "txns.csv") +
                              " --min-support 2 --out " + arg(out_path));
  ASSERT_EQ(result.code, 0);
  EXPECT_TRUE(result.out.empty());
  const auto j = json::parse(read_all(out_path));
  EXPECT_EQ(j["frequent"].size(), 17u);
}

}  // namespace
