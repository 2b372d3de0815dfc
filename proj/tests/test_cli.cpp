// Copyright 2026 The mmulrv Authors
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
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using nlohmann::json;

namespace
{
  struct Result
  {
    int status = -1;
    std::string out;
  };

  Result
  cli(const std::string& args, bool mergeStderr = false)
  {
    std::string cmd = std::string(MMULRV_CLI) + " " + args
      + (mergeStderr ? " 2>&1" : " 2>/dev/null");
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p)
      return r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0)
      r.out.append(buf, n);
    int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
  }

  json
  golden(const std::string& name)
  {
    std::ifstream in(std::filesystem::path(MMULRV_GOLDEN_DIR) / name);
    return json::parse(in);
  }

  /// Same keys in the same order; numbers equal up to rounding.
  void
  expectMatches(const json& got, const json& want, const std::string& path = "")
  {
    ASSERT_EQ(got.type(), want.type()) << path;
    if (want.is_object())
      {
        std::vector<std::string> gk, wk;
        for (auto it = got.begin(); it != got.end(); ++it)
          gk.push_back(it.key());
        for (auto it = want.begin(); it != want.end(); ++it)
          wk.push_back(it.key());
        ASSERT_EQ(gk, wk) << path;
        for (const std::string& k : wk)
          expectMatches(got[k], want[k], path + "." + k);
      }
    else if (want.is_array())
      {
        ASSERT_EQ(got.size(), want.size()) << path;
        for (size_t i = 0; i < want.size(); ++i)
          expectMatches(got[i], want[i], path + "[" + std::to_string(i) + "]");
      }
    else if (want.is_number_float())
      EXPECT_NEAR(got.get<double>(), want.get<double>(),
                  1e-12 * std::max(1.0, std::abs(want.get<double>()))) << path;
    else
      EXPECT_EQ(got, want) << path;
  }
}

TEST(Run, JsonMatchesGolden)
{
  Result r = cli("run --guest montmul --config CI-AE --format json");
  ASSERT_EQ(r.status, 0);
  expectMatches(json::parse(r.out), golden("run_montmul_ciae.json"));
}

TEST(Run, InterruptJsonMatchesGolden)
{
  Result r = cli("run --guest irq_sweep_partial --config CI-PE --irq 100,400 --format json");
  ASSERT_EQ(r.status, 0);
  expectMatches(json::parse(r.out), golden("run_irq_partial.json"));
}

TEST(Run, AcceleratedModexpReportsInvocations)
{
  Result r = cli("run --guest modexp256 --config CI-AE --format json");
  ASSERT_EQ(r.status, 0);
  json j = json::parse(r.out);
  EXPECT_GT(j["mmul_invocations"].get<uint64_t>(), 0u);
  EXPECT_TRUE(j["result_ok"].get<bool>());
  double ne = j["normalized_energy"].get<double>();
  EXPECT_GT(ne, 0.0);
  EXPECT_LT(ne, 0.5);
  EXPECT_GT(j["baseline_cycles"].get<uint64_t>(), j["total_cycles"].get<uint64_t>());
}

TEST(Run, BaselineUsesNoMmul)
{
  Result r = cli("run --guest montmul --config BA --format json");
  ASSERT_EQ(r.status, 0);
  json j = json::parse(r.out);
  EXPECT_EQ(j["mmul_invocations"], 0);
  EXPECT_EQ(j["module_active_cycles"]["mmul"], 0);
  EXPECT_DOUBLE_EQ(j["normalized_energy"].get<double>(), 1.0);
}

TEST(Run, ModuleCountersBoundedByTotal)
{
  for (const char* cfg : {"BA", "CI-AE", "CI-PE"})
    {
      json j = json::parse(cli(std::string("run --guest modexp128 --format json --config ") + cfg).out);
      uint64_t total = j["total_cycles"];
      for (auto& [k, v] : j["module_active_cycles"].items())
        EXPECT_LE(v.get<uint64_t>(), total) << cfg << " " << k;
    }
}

TEST(Run, ExitStatusContract)
{
  EXPECT_EQ(cli("run --guest montmul --config CI-PE").status, 0);
  // 8-word guest on 4-word hardware: MMUL traps.
  Result trap = cli("run --guest modexp256 --config CI-AE --words 4 --format json");
  EXPECT_EQ(trap.status, 2);
  json j = json::parse(trap.out);
  EXPECT_EQ(j["stop_reason"], "trapped");
  EXPECT_TRUE(j["normalized_energy"].is_null());
  Result budget = cli("run --guest modexp256 --config BA --budget 1000 --format json");
  EXPECT_EQ(budget.status, 3);
  EXPECT_EQ(json::parse(budget.out)["stop_reason"], "cycle_budget_exhausted");
  // Even modulus is rejected before the guest is built.
  EXPECT_EQ(cli("run --guest montmul --config CI-AE --input n=10").status, 1);
}

TEST(Run, UsageErrors)
{
  Result nf = cli("run --guest no_such_guest --config BA", true);
  EXPECT_EQ(nf.status, 1);
  EXPECT_NE(nf.out.find("unknown guest"), std::string::npos);
  EXPECT_EQ(cli("run --guest montmul --config CI-XX").status, 1);
  EXPECT_EQ(cli("run --guest irq_sweep_atomic --config CI-PE").status, 1);
  EXPECT_EQ(cli("run --guest montmul --config BA --read-latency 0").status, 1);
  EXPECT_EQ(cli("run --guest montmul --config BA --words 40").status, 1);
  EXPECT_EQ(cli("run --guest montmul --config BA --sweep 5:1").status, 1);
  EXPECT_NE(cli("bogus").status, 0);
}

TEST(Run, OutFileAndTable)
{
  std::filesystem::path out = std::filesystem::temp_directory_path() / "mmulrv_cli_test.json";
  std::filesystem::remove(out);
  ASSERT_EQ(cli("run --guest montmul --config CI-AE --format json --out " + out.string()).status, 0);
  std::ifstream in(out);
  json j = json::parse(in);
  EXPECT_EQ(j["total_cycles"], 555);
  std::filesystem::remove(out);
  Result t = cli("run --guest montmul --config CI-AE --format table");
  EXPECT_NE(t.out.find("total cycles"), std::string::npos);
  EXPECT_NE(t.out.find("555"), std::string::npos);
}

TEST(Run, PartialSweepStaysWithinBound)
{
  Result r = cli("run --guest irq_sweep_partial --config CI-PE --sweep 0:600:1 --format json");
  ASSERT_EQ(r.status, 0);
  json j = json::parse(r.out);
  EXPECT_EQ(j["sweep_runs"], 600);
  EXPECT_GT(j["interrupt_latencies"].size(), 500u);
  EXPECT_LE(j["interrupt_latency_max"].get<uint64_t>(), 26u + 4);
  EXPECT_TRUE(j["result_ok"].get<bool>());
}

TEST(Compare, ThreeConfigurationsOrdered)
{
  Result r = cli("compare --guest modexp128 --format json");
  ASSERT_EQ(r.status, 0);
  json j = json::parse(r.out);
  ASSERT_EQ(j["rows"].size(), 3u);
  double ba = j["rows"][0]["speedup"], ae = j["rows"][1]["speedup"], pe = j["rows"][2]["speedup"];
  EXPECT_DOUBLE_EQ(ba, 1.0);
  EXPECT_GE(ae, pe);
  EXPECT_GT(pe, 1.0);
  double nae = j["rows"][1]["normalized_energy"], npe = j["rows"][2]["normalized_energy"];
  EXPECT_LT(nae, npe);
  EXPECT_LT(npe, 1.0);
}

TEST(Compare, SingleConfigIsSelfReference)
{
  json j = json::parse(cli("compare --guest montmul --config CI-AE --format json").out);
  ASSERT_EQ(j["rows"].size(), 1u);
  EXPECT_DOUBLE_EQ(j["rows"][0]["speedup"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(j["rows"][0]["normalized_energy"].get<double>(), 1.0);
}

TEST(Compare, LatencySensitivityRowFlagged)
{
  json j = json::parse(cli("compare --guest montmul --config BA,BA@3:1 --format json").out);
  ASSERT_EQ(j["rows"].size(), 2u);
  EXPECT_FALSE(j["rows"][0]["latency_sensitivity"].get<bool>());
  EXPECT_TRUE(j["rows"][1]["latency_sensitivity"].get<bool>());
  EXPECT_NE(j["rows"][1]["speedup"].get<double>(), 1.0);
}

TEST(Compare, TableLayout)
{
  Result r = cli("compare --guest montmul");
  ASSERT_EQ(r.status, 0);
  for (const char* s : {"BA", "CI-AE", "CI-PE", "speedup"})
    EXPECT_NE(r.out.find(s), std::string::npos) << s;
}

TEST(Selftest, PassesWithSeed)
{
  EXPECT_EQ(cli("selftest --count 10").status, 0);
  std::string cmd = std::string("MMULRV_SEED=99 ") + MMULRV_CLI + " selftest --count 5";
  FILE* p = popen(cmd.c_str(), "r");
  ASSERT_NE(p, nullptr);
  char buf[256] = {};
  size_t n = fread(buf, 1, sizeof buf - 1, p);
  buf[n] = 0;
  EXPECT_EQ(WEXITSTATUS(pclose(p)), 0);
  EXPECT_NE(std::string(buf).find("seed=99"), std::string::npos);
}

TEST(Encode, WordAndDirective)
{
  Result r = cli("encode --rd 10 --rs1 11 --rs2 12 --rs3 13 --words 4");
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("0x68c5b50b"), std::string::npos);
  EXPECT_NE(r.out.find(".insn r4 0x0b, 3, 0, x10, x11, x12, x13"), std::string::npos);
  EXPECT_NE(r.out.find("32768"), std::string::npos);
  Result d = cli("encode --decode 68C5B50B");
  EXPECT_NE(d.out.find("words=4"), std::string::npos);
  EXPECT_NE(cli("encode --words 33").status, 0);
  EXPECT_NE(cli("encode --decode 00000033").status, 0);
}

TEST(Guests, ListAndListing)
{
  Result r = cli("guests");
  ASSERT_EQ(r.status, 0);
  for (const char* g : {"montmul", "modexp256", "x25519_ladder", "irq_sweep_atomic",
                        "irq_sweep_partial"})
    EXPECT_NE(r.out.find(g), std::string::npos) << g;
  Result l = cli("guests --guest irq_sweep_atomic --config CI-AE");
  EXPECT_NE(l.out.find("mmul"), std::string::npos);
  EXPECT_NE(l.out.find("mret"), std::string::npos);
}
