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

#include "mmulrv/isa.hpp"
#include "mmulrv/machine.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mmulrv
{

  /// Cycle costs of the in-order two-stage core. One cycle per retired
  /// instruction, a refetch penalty on taken control transfers, memory
  /// wait-states beyond the first cycle of each fetch or data access,
  /// and the MMUL engine's own cycles for MMUL instructions.
  struct TimingModel
  {
    unsigned baseCpi = 1;
    unsigned takenBranchPenalty = 1;
    unsigned trapEntryCycles = 3;

    /// Cycles a memory access adds beyond the first one.
    static unsigned waitStates(unsigned latency)
    { return latency > 1 ? latency - 1 : 0; }
  };


  /// mcause values.
  namespace cause
  {
    constexpr uint32_t kInstructionMisaligned = 0;
    constexpr uint32_t kInstructionAccessFault = 1;
    constexpr uint32_t kIllegalInstruction = 2;
    constexpr uint32_t kBreakpoint = 3;
    constexpr uint32_t kLoadMisaligned = 4;
    constexpr uint32_t kLoadAccessFault = 5;
    constexpr uint32_t kStoreMisaligned = 6;
    constexpr uint32_t kStoreAccessFault = 7;
    constexpr uint32_t kEcallFromM = 11;
    constexpr uint32_t kInterruptBit = 0x80000000u;
    constexpr uint32_t kMachineExternalInterrupt = kInterruptBit | 11;
  }


  struct Trap
  {
    uint32_t cause = 0;
    uint32_t tval = 0;
    uint32_t pc = 0;       // pc of the interrupted or faulting instruction.
    std::string detail;

    bool isInterrupt() const
    { return cause & cause::kInterruptBit; }
  };


  struct StepReport
  {
    uint32_t pc = 0;
    std::optional<DecodedInstruction> retired;
    uint64_t cycles = 0;
    std::optional<Trap> trap;
    bool halted = false;
  };


  enum class StopReason { Halted, PcSentinel, CycleBudgetExhausted, Trapped };

  const char* stopReasonName(StopReason reason);


  struct RunOptions
  {
    uint64_t cycleBudget = 2'000'000'000;
    std::optional<uint32_t> pcSentinel;
    /// Cycles at which external interrupt line 0 is asserted.
    std::vector<uint64_t> interruptSchedule;
    /// Written to mtvec before the first step.
    std::optional<uint32_t> trapVector;
    /// End the run on a synchronous exception instead of vectoring to
    /// the guest's handler.
    bool stopOnException = true;
  };


  struct RunResult
  {
    StopReason reason = StopReason::Halted;
    RunStats stats;
    std::optional<Trap> trap;
  };


  /// Halt convention: ecall with t0 (x5) equal to zero.
  constexpr unsigned kHaltRegister = 5;


  /// Fetch/decode/execute loop over one machine.
  class Core
  {
  public:
    explicit Core(Machine& machine, TimingModel timing = {});

    /// Take a pending enabled interrupt, or retire one instruction, or
    /// take a synchronous exception.
    StepReport step();

    /// Step until halt, pc sentinel, exhausted budget, or (by default) a
    /// synchronous exception.
    RunResult run(const RunOptions& options = {});

    const TimingModel& timing() const
    { return timing_; }

    Machine& machine()
    { return machine_; }

  private:
    struct CacheEntry
    {
      uint32_t raw = 0;
      bool valid = false;
      DecodedInstruction inst;
    };

    const DecodedInstruction& decodeCached(uint32_t pc, uint32_t raw);
    void execute(const DecodedInstruction& inst, StepReport& report,
                 uint64_t fetchCycles);
    void takeException(StepReport& report, uint32_t causeCode, uint32_t tval,
                       const std::string& detail);

    Machine& machine_;
    TimingModel timing_;
    std::vector<std::vector<CacheEntry>> cache_;
  };

}
