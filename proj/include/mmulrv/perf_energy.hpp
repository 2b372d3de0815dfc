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

#pragma once

#include "mmulrv/error.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

namespace mmulrv
{

  /// Datapath blocks whose activity is tracked.
  enum class Module : uint8_t { Fetch, Decode, Alu, RegFile, Mmul };

  constexpr std::array<Module, 5> kModules = {
    Module::Fetch, Module::Decode, Module::Alu, Module::RegFile, Module::Mmul
  };

  std::string_view moduleName(Module module);


  /// Processor configuration being measured.
  enum class Configuration : uint8_t
  {
    BA,    // Base RV32EC, software Montgomery multiplication.
    CIAE,  // MMUL with atomic execution.
    CIPE   // MMUL with partial execution.
  };

  constexpr std::array<Configuration, 3> kConfigurations = {
    Configuration::BA, Configuration::CIAE, Configuration::CIPE
  };

  std::string_view configurationName(Configuration config);

  /// Accepts "BA", "CI-AE", "CI-PE" (case-insensitive, dash optional).
  Configuration parseConfiguration(std::string_view text);


  struct InterruptLatency
  {
    uint64_t assertCycle = 0;
    uint64_t serviceCycle = 0;

    uint64_t latency() const
    { return serviceCycle - assertCycle; }

    friend bool operator==(const InterruptLatency&, const InterruptLatency&) = default;
  };


  /// Counters collected over one run.
  struct RunStats
  {
    uint64_t totalCycles = 0;
    uint64_t retiredInstructions = 0;
    uint64_t memReads = 0;
    uint64_t memWrites = 0;
    uint64_t fetches = 0;
    std::array<uint64_t, kModules.size()> activeCycles{};
    std::vector<InterruptLatency> interruptLatencies;
    uint64_t mmulInvocations = 0;
    uint64_t mmulEngineCycles = 0;
    uint64_t mmulComputeCycles = 0;

    uint64_t active(Module module) const
    { return activeCycles[size_t(module)]; }

    double duty(Module module) const
    { return totalCycles ? double(active(module)) / double(totalCycles) : 0.0; }

    friend bool operator==(const RunStats&, const RunStats&) = default;
  };

  void recordActivity(RunStats& stats, Module module, uint64_t cycles);


  /// Static and per-module dynamic power of each configuration. The
  /// defaults are the averaged FPGA measurements taken during a modular
  /// multiplication; dynamic power the per-module breakdown does not
  /// attribute to any of the five modules is kept as a separate
  /// always-on term so that the configuration totals are reproduced.
  struct PowerModel
  {
    using PerConfig = std::array<double, kConfigurations.size()>;

    PerConfig staticWatts{};
    PerConfig measuredDynamicWatts{};
    PerConfig measuredTotalWatts{};
    std::array<std::array<double, kModules.size()>, kConfigurations.size()> moduleWatts{};

    static PowerModel defaults();

    double staticPower(Configuration c) const
    { return staticWatts[size_t(c)]; }

    double modulePower(Configuration c, Module m) const
    { return moduleWatts[size_t(c)][size_t(m)]; }

    double moduleSum(Configuration c) const;

    /// measuredDynamic - sum of module powers, never negative.
    double unattributedPower(Configuration c) const;

    /// Throws ConfigError on any negative entry.
    void validate() const;
  };


  struct EnergyEstimate
  {
    Configuration config = Configuration::BA;
    uint64_t totalCycles = 0;
    double staticWatts = 0;
    std::array<double, kModules.size()> moduleWatts{};  // power x duty
    double moduleDynamicWatts = 0;
    double unattributedWatts = 0;
    double avgPowerWatts = 0;
    double energy = 0;  // avgPowerWatts x totalCycles

    /// static + per-module dynamic, excluding the unattributed term.
    double modulePowerWatts() const
    { return staticWatts + moduleDynamicWatts; }
  };

  /// Average power for given per-module duty factors in [0, 1].
  EnergyEstimate estimateFromDuty(std::span<const double, kModules.size()> duty,
                                  const PowerModel& model, Configuration config);

  /// avg_power = static + sum_m power[m] * active[m]/total + unattributed,
  /// energy = avg_power * total_cycles.
  EnergyEstimate estimateEnergy(const RunStats& stats, const PowerModel& model,
                                Configuration config);


  class MissingReferenceRun : public SimError
  {
  public:
    MissingReferenceRun()
      : SimError("normalized energy needs a BA reference run")
    { }
  };

  /// run.energy / baseline.energy.
  double normalizedEnergy(const EnergyEstimate& run, const EnergyEstimate* baseline);


  class NoInterruptsRecorded : public SimError
  {
  public:
    NoInterruptsRecorded()
      : SimError("no interrupts were recorded")
    { }
  };

  struct LatencyReport
  {
    uint64_t min = 0;
    uint64_t max = 0;
    double mean = 0;
    size_t count = 0;
    std::map<uint64_t, size_t> histogram;  // latency -> occurrences
  };

  LatencyReport interruptLatencyReport(std::span<const InterruptLatency> latencies);

}
