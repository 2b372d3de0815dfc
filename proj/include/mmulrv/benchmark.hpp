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

#include "mmulrv/core.hpp"
#include "mmulrv/error.hpp"
#include "mmulrv/guest_kit.hpp"
#include "mmulrv/perf_energy.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mmulrv
{

  class InvalidConfig : public ConfigError
  {
  public:
    using ConfigError::ConfigError;
  };


  class MismatchedWorkloads : public SimError
  {
  public:
    using SimError::SimError;
  };


  /// Interrupt assert cycles start, start+step, ... below end.
  struct SweepSpec
  {
    uint64_t start = 0;
    uint64_t end = 0;
    uint64_t step = 1;

    /// Parses "start:end:step" (step optional, default 1).
    static SweepSpec parse(std::string_view text);

    std::vector<uint64_t> points() const;
  };


  enum class ReportFormat { Json, Table };


  struct RunConfig
  {
    std::string guest;
    GuestInputs inputs;
    Configuration config = Configuration::BA;
    unsigned maxWords = 8;
    unsigned readLatency = 1;
    unsigned writeLatency = 1;
    std::vector<uint64_t> interrupts;
    std::optional<SweepSpec> sweep;
    uint64_t cycleBudget = 2'000'000'000;

    /// Throws InvalidConfig.
    void validate() const;

    MachineConfig machineConfig() const;
  };


  /// Exit status of the command-line runner.
  namespace exit_status
  {
    constexpr int kOk = 0;
    constexpr int kUsage = 1;
    constexpr int kTrapped = 2;
    constexpr int kBudgetExhausted = 3;
    constexpr int kWrongResult = 4;
  }


  struct RunReport
  {
    std::string guest;
    Configuration config = Configuration::BA;
    unsigned maxWords = 8;
    unsigned readLatency = 1;
    unsigned writeLatency = 1;
    StopReason reason = StopReason::Halted;
    std::optional<Trap> trap;
    RunStats stats;
    EnergyEstimate energy;
    /// Against a BA run of the same workload; 1 for BA itself. Unset
    /// when the run did not complete.
    std::optional<double> normalizedEnergy;
    uint64_t baselineCycles = 0;
    std::optional<std::string> result;
    bool resultOk = false;
    /// Number of interrupt sweep points executed (0 without a sweep).
    size_t sweepRuns = 0;

    int exitStatus() const;
  };


  /// Build the guest and run it once with the given interrupt schedule.
  /// No normalization.
  RunReport runSingle(const RunConfig& cfg, const std::vector<uint64_t>& interrupts,
                      const PowerModel& model = PowerModel::defaults());

  /// Run the configured guest, expanding a sweep into one run per assert
  /// cycle, and normalize energy against a BA run of the same workload.
  /// With a sweep, counters and energy come from an interrupt-free run and
  /// interrupt_latencies collects every serviced sweep point.
  RunReport runBenchmark(const RunConfig& cfg,
                         const PowerModel& model = PowerModel::defaults());

  /// The BA workload an energy figure is normalized against.
  RunConfig baselineFor(const RunConfig& cfg);


  struct CompareRow
  {
    RunConfig cfg;
    RunReport report;
    double speedup = 1.0;
    double normalizedEnergy = 1.0;
    /// Same configuration as the reference but different memory latency.
    bool latencySensitivity = false;
  };

  struct Comparison
  {
    std::string guest;
    size_t referenceRow = 0;
    std::vector<CompareRow> rows;
  };

  /// Speedup and energy of every configuration against the first BA
  /// configuration, or the first row when none is BA. All configs must
  /// share guest and inputs.
  Comparison compare(const std::vector<RunConfig>& cfgs,
                     const PowerModel& model = PowerModel::defaults());


  std::string reportJson(const RunReport& report);
  std::string reportTable(const RunReport& report);
  std::string comparisonJson(const Comparison& comparison);
  std::string comparisonTable(const Comparison& comparison);

}
