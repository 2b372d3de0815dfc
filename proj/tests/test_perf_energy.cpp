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

#include "mmulrv/assembler.hpp"
#include "mmulrv/core.hpp"
#include "mmulrv/perf_energy.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mmulrv;
using namespace mmulrv::reg;

namespace
{
  std::array<double, kModules.size()>
  allOn()
  {
    std::array<double, kModules.size()> d;
    d.fill(1.0);
    return d;
  }

  RunStats
  runProgram(ProgramBuilder& b, Machine& m)
  {
    std::vector<uint8_t> code = b.finish();
    m.memory().loadImage(0, code);
    Core core(m);
    RunResult r = core.run();
    EXPECT_EQ(r.reason, StopReason::Halted);
    return r.stats;
  }
}

TEST(PowerModel, DefaultValues)
{
  PowerModel p = PowerModel::defaults();
  EXPECT_NO_THROW(p.validate());
  EXPECT_DOUBLE_EQ(p.staticPower(Configuration::BA), 0.107);
  EXPECT_DOUBLE_EQ(p.staticPower(Configuration::CIAE), 0.105);
  EXPECT_DOUBLE_EQ(p.staticPower(Configuration::CIPE), 0.106);
  EXPECT_DOUBLE_EQ(p.modulePower(Configuration::BA, Module::Fetch), 0.058);
  EXPECT_DOUBLE_EQ(p.modulePower(Configuration::CIAE, Module::Fetch), 0.002);
  EXPECT_DOUBLE_EQ(p.modulePower(Configuration::CIPE, Module::Fetch), 0.026);
  EXPECT_DOUBLE_EQ(p.modulePower(Configuration::BA, Module::Mmul), 0.0);
  EXPECT_DOUBLE_EQ(p.modulePower(Configuration::CIAE, Module::Mmul), 0.054);
  EXPECT_DOUBLE_EQ(p.modulePower(Configuration::CIPE, Module::Mmul), 0.053);
  EXPECT_DOUBLE_EQ(p.modulePower(Configuration::CIPE, Module::RegFile), 0.003);
  for (Configuration c : kConfigurations)
    EXPECT_NEAR(p.staticWatts[size_t(c)] + p.measuredDynamicWatts[size_t(c)],
                p.measuredTotalWatts[size_t(c)], 0.0011);
}

TEST(PowerModel, NegativeEntryRejected)
{
  PowerModel p = PowerModel::defaults();
  p.moduleWatts[0][2] = -0.01;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Estimate, FullDutyBa)
{
  auto d = allOn();
  EnergyEstimate e = estimateFromDuty(d, PowerModel::defaults(), Configuration::BA);
  EXPECT_NEAR(e.modulePowerWatts(), 0.222, 1e-9);
  EXPECT_NEAR(e.avgPowerWatts, 0.261, 0.001);
}

TEST(Estimate, FullDutyMatchesTotalsForEveryConfig)
{
  auto d = allOn();
  PowerModel p = PowerModel::defaults();
  // Static and dynamic are each rounded to 1 mW in the source table, so
  // their sum may differ from the printed total by one unit (CI-AE).
  for (Configuration c : kConfigurations)
    EXPECT_NEAR(estimateFromDuty(d, p, c).avgPowerWatts,
                p.measuredTotalWatts[size_t(c)], 0.0011);
}

TEST(Estimate, LinearInDuty)
{
  RunStats s;
  s.totalCycles = 1000;
  s.activeCycles = {500, 250, 100, 0, 0};
  PowerModel p = PowerModel::defaults();
  EnergyEstimate e = estimateEnergy(s, p, Configuration::BA);
  double dyn = 0.058 * 0.5 + 0.014 * 0.25 + 0.031 * 0.1;
  EXPECT_NEAR(e.moduleDynamicWatts, dyn, 1e-12);
  EXPECT_NEAR(e.avgPowerWatts, 0.107 + dyn + p.unattributedPower(Configuration::BA), 1e-12);
  EXPECT_NEAR(e.energy, e.avgPowerWatts * 1000, 1e-9);
}

TEST(Estimate, SelfNormalizationIsOne)
{
  RunStats s;
  s.totalCycles = 777;
  s.activeCycles = {700, 700, 300, 500, 0};
  for (Configuration c : kConfigurations)
    {
      EnergyEstimate e = estimateEnergy(s, PowerModel::defaults(), c);
      EXPECT_DOUBLE_EQ(normalizedEnergy(e, &e), 1.0);
    }
}

TEST(Estimate, MissingReference)
{
  RunStats s;
  s.totalCycles = 10;
  EnergyEstimate e = estimateEnergy(s, PowerModel::defaults(), Configuration::CIAE);
  EXPECT_THROW(normalizedEnergy(e, nullptr), MissingReferenceRun);
  EnergyEstimate empty;
  EXPECT_THROW(normalizedEnergy(e, &empty), MissingReferenceRun);
}

TEST(Latency, ReportSummarizes)
{
  std::vector<InterruptLatency> l = {{10, 13}, {20, 25}, {30, 33}, {40, 70}};
  LatencyReport r = interruptLatencyReport(l);
  EXPECT_EQ(r.count, 4u);
  EXPECT_EQ(r.min, 3u);
  EXPECT_EQ(r.max, 30u);
  EXPECT_DOUBLE_EQ(r.mean, (3 + 5 + 3 + 30) / 4.0);
  EXPECT_EQ(r.histogram.at(3), 2u);
  EXPECT_EQ(r.histogram.at(30), 1u);
  EXPECT_THROW(interruptLatencyReport({}), NoInterruptsRecorded);
}

TEST(Configuration, Names)
{
  for (Configuration c : kConfigurations)
    EXPECT_EQ(parseConfiguration(configurationName(c)), c);
  EXPECT_EQ(parseConfiguration("ci_pe"), Configuration::CIPE);
  EXPECT_EQ(parseConfiguration("ciae"), Configuration::CIAE);
  EXPECT_THROW(parseConfiguration("CI-XX"), ConfigError);
}

TEST(Activity, RecordIsMonotone)
{
  RunStats s;
  recordActivity(s, Module::Mmul, 257);
  recordActivity(s, Module::Mmul, 3);
  EXPECT_EQ(s.active(Module::Mmul), 260u);
  EXPECT_EQ(s.active(Module::Fetch), 0u);
}

TEST(Activity, PlainInstructionTouchesPipelineModules)
{
  Machine m;
  ProgramBuilder b;
  b.addi(1, 1, 1);
  std::vector<uint8_t> code = b.finish();
  m.memory().loadImage(0, code);
  Core core(m);
  core.step();
  RunStats s = m.stats();
  EXPECT_EQ(s.active(Module::Fetch), 1u);
  EXPECT_EQ(s.active(Module::Decode), 1u);
  EXPECT_EQ(s.active(Module::Alu), 1u);
  EXPECT_EQ(s.active(Module::RegFile), 1u);
  EXPECT_EQ(s.active(Module::Mmul), 0u);
}

TEST(Activity, AtomicMmulCountsComputeCycles)
{
  Machine m;
  m.memory().pokeWord(0x10200, 0xffffffff);  // odd modulus
  ProgramBuilder b;
  b.li(a0, 0x10000);
  b.li(a1, 0x10100);
  b.li(a2, 0x10200);
  b.li(a3, 0x10300);
  b.mmul(a3, a0, a1, a2, 4);
  b.halt();
  RunStats s = runProgram(b, m);
  EXPECT_EQ(s.active(Module::Mmul), 257u);
  EXPECT_EQ(s.mmulInvocations, 1u);
  EXPECT_EQ(s.mmulComputeCycles, 257u);
  EXPECT_EQ(s.mmulEngineCycles, 257u + 12 + 4);
  EXPECT_EQ(s.memReads, 12u);
  EXPECT_EQ(s.memWrites, 4u);
}

TEST(Activity, ActiveCyclesNeverExceedTotal)
{
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial)
    {
      Machine m(MachineConfig{8, unsigned(1 + rng() % 4), unsigned(1 + rng() % 4), 1});
      for (uint32_t a = 0x10200; a < 0x10220; a += 4)
        m.memory().pokeWord(a, rng() | 1);
      ProgramBuilder b;
      Label loop = b.newLabel();
      b.li(a0, 0x10000);
      b.li(a1, 0x10100);
      b.li(a2, 0x10200);
      b.li(a3, 0x10300);
      b.li(s0, 1 + rng() % 5);
      if (trial % 2)
        b.csrwi(csr::kMmulMode, 1);
      b.bind(loop);
      for (unsigned k = 0; k < (trial % 2 ? 64u : 1u); ++k)
        b.mmul(a3, a0, a1, a2, 2);
      b.lw(t1, 0, a3);
      b.sw(t1, 4, a0);
      b.addi(s0, s0, -1);
      b.bnez(s0, loop);
      b.halt();
      RunStats s = runProgram(b, m);
      for (Module mod : kModules)
        ASSERT_LE(s.active(mod), s.totalCycles) << moduleName(mod);
      for (const InterruptLatency& l : s.interruptLatencies)
        ASSERT_GE(l.serviceCycle, l.assertCycle);
    }
}
