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

#include "mmulrv/memory.hpp"
#include "mmulrv/mmul_engine.hpp"
#include "mmulrv/perf_energy.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace mmulrv
{

  /// CSR addresses implemented by the machine.
  namespace csr
  {
    constexpr uint16_t kMstatus    = 0x300;
    constexpr uint16_t kMisa       = 0x301;
    constexpr uint16_t kMie        = 0x304;
    constexpr uint16_t kMtvec      = 0x305;
    constexpr uint16_t kMscratch   = 0x340;
    constexpr uint16_t kMepc       = 0x341;
    constexpr uint16_t kMcause     = 0x342;
    constexpr uint16_t kMtval      = 0x343;
    constexpr uint16_t kMip        = 0x344;
    constexpr uint16_t kMmulMode   = 0x7c0;  // bit 0: partial execution.
    constexpr uint16_t kMmulStatus = 0x7c1;  // read-only engine status.
    constexpr uint16_t kMcycle     = 0xb00;
    constexpr uint16_t kMinstret   = 0xb02;
    constexpr uint16_t kMcycleh    = 0xb80;
    constexpr uint16_t kMinstreth  = 0xb82;
    constexpr uint16_t kCycle      = 0xc00;
    constexpr uint16_t kInstret    = 0xc02;
    constexpr uint16_t kCycleh     = 0xc80;
    constexpr uint16_t kInstreth   = 0xc82;
    constexpr uint16_t kMhartid    = 0xf14;

    constexpr uint32_t kMstatusMie  = 1u << 3;
    constexpr uint32_t kMstatusMpie = 1u << 7;
    constexpr uint32_t kMstatusMpp  = 3u << 11;
    constexpr uint32_t kMeip        = 1u << 11;  // mip/mie external interrupt.
  }

  enum class CsrOp { Read, Write, Set, Clear };


  /// x0..x15. x0 reads as zero and ignores writes.
  class RegisterFile
  {
  public:
    static constexpr unsigned kCount = 16;

    uint32_t read(unsigned index) const
    { return regs_[index & 0xf]; }

    void write(unsigned index, uint32_t value)
    {
      if (index & 0xf)
        regs_[index & 0xf] = value;
    }

    friend bool operator==(const RegisterFile&, const RegisterFile&) = default;

  private:
    std::array<uint32_t, kCount> regs_{};
  };


  struct InterruptLine
  {
    bool pending = false;
    uint64_t assertCycle = 0;
  };


  /// External interrupt lines. Line 0 drives mip.MEIP.
  class InterruptController
  {
  public:
    explicit InterruptController(unsigned lines = 1)
      : lines_(lines)
    { }

    /// Assert a line. A line that is already pending keeps its original
    /// assert cycle. Throws ConfigError for an unknown line.
    void raise(unsigned line, uint64_t atCycle);

    void clear(unsigned line);

    bool pending(unsigned line) const;

    const InterruptLine& line(unsigned index) const;

    unsigned count() const
    { return unsigned(lines_.size()); }

  private:
    std::vector<InterruptLine> lines_;
  };


  struct MachineConfig
  {
    unsigned maxWords = MmulEngine::kDefaultMaxWords;
    unsigned readLatency = 1;
    unsigned writeLatency = 1;
    unsigned interruptLines = 1;
  };


  /// Architectural state of one RV32EC hart with the MMUL functional
  /// unit: registers, pc, CSRs, memory, interrupt lines, cycle and
  /// retired-instruction counters, and the activity counters of the run.
  class Machine
  {
  public:
    explicit Machine(const MachineConfig& config = {});

    /// Use a custom memory layout instead of the default one.
    Machine(const MachineConfig& config, Memory memory);

    RegisterFile& regs()
    { return regs_; }

    const RegisterFile& regs() const
    { return regs_; }

    Memory& memory()
    { return memory_; }

    const Memory& memory() const
    { return memory_; }

    MmulEngine& engine()
    { return engine_; }

    const MmulEngine& engine() const
    { return engine_; }

    InterruptController& interrupts()
    { return interrupts_; }

    const InterruptController& interrupts() const
    { return interrupts_; }

    uint32_t pc() const
    { return pc_; }

    void setPc(uint32_t pc)
    { pc_ = pc; }

    uint64_t cycle() const
    { return cycle_; }

    void advance(uint64_t cycles)
    { cycle_ += cycles; }

    uint64_t instret() const
    { return instret_; }

    void retire()
    { ++instret_; }

    /// Read-modify-write a CSR with RISC-V csrrw/csrrs/csrrc semantics.
    /// Returns the value before the access. Throws CsrFault for an
    /// unimplemented CSR or a write to a read-only one.
    uint32_t csrAccess(uint16_t addr, CsrOp op, uint32_t value = 0);

    /// Current MMUL_MODE bit 0.
    bool partialModeSelected() const
    { return mmulMode_ & 1; }

    void raiseInterrupt(unsigned line, uint64_t atCycle)
    { interrupts_.raise(line, atCycle); }

    /// External interrupt pending and enabled by mstatus.MIE and mie.MEIE.
    bool interruptReady() const;

    /// Enter the trap handler at mtvec: saves pc to mepc, records the
    /// cause, and stacks mstatus.MIE.
    void enterTrap(uint32_t cause, uint32_t tval);

    /// Return from a trap handler.
    void returnFromTrap();

    bool inTrapHandler() const
    { return inTrapHandler_; }

    /// Live activity counters; memory counters are folded in by stats().
    RunStats& activity()
    { return activity_; }

    /// Snapshot of the run statistics so far.
    RunStats stats() const;

  private:
    RegisterFile regs_;
    Memory memory_;
    MmulEngine engine_;
    InterruptController interrupts_;
    uint32_t pc_ = 0;
    uint64_t cycle_ = 0;
    uint64_t instret_ = 0;

    uint32_t mstatus_ = csr::kMstatusMpp;
    uint32_t mie_ = 0;
    uint32_t mtvec_ = 0;
    uint32_t mscratch_ = 0;
    uint32_t mepc_ = 0;
    uint32_t mcause_ = 0;
    uint32_t mtval_ = 0;
    uint32_t mmulMode_ = 0;
    bool inTrapHandler_ = false;

    RunStats activity_;
  };

}
