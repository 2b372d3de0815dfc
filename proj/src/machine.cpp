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

#include "mmulrv/machine.hpp"
#include "mmulrv/error.hpp"

#include <string>

namespace mmulrv
{

  void
  InterruptController::raise(unsigned index, uint64_t atCycle)
  {
    if (index >= lines_.size())
      throw ConfigError("interrupt line " + std::to_string(index)
                        + " not configured (have "
                        + std::to_string(lines_.size()) + ")");
    InterruptLine& l = lines_[index];
    if (!l.pending)
      {
        l.pending = true;
        l.assertCycle = atCycle;
      }
  }


  void
  InterruptController::clear(unsigned index)
  {
    if (index < lines_.size())
      lines_[index].pending = false;
  }


  bool
  InterruptController::pending(unsigned index) const
  {
    return index < lines_.size() && lines_[index].pending;
  }


  const InterruptLine&
  InterruptController::line(unsigned index) const
  {
    if (index >= lines_.size())
      throw ConfigError("interrupt line " + std::to_string(index)
                        + " not configured");
    return lines_[index];
  }


  Machine::Machine(const MachineConfig& config)
    : Machine(config, Memory::withDefaultLayout(config.readLatency,
                                                config.writeLatency))
  { }


  Machine::Machine(const MachineConfig& config, Memory memory)
    : memory_(std::move(memory)), engine_(config.maxWords),
      interrupts_(config.interruptLines)
  { }


  bool
  Machine::interruptReady() const
  {
    return interrupts_.pending(0) && (mstatus_ & csr::kMstatusMie)
      && (mie_ & csr::kMeip);
  }


  void
  Machine::enterTrap(uint32_t cause, uint32_t tval)
  {
    mepc_ = pc_;
    mcause_ = cause;
    mtval_ = tval;
    uint32_t mie = mstatus_ & csr::kMstatusMie;
    mstatus_ &= ~(csr::kMstatusMie | csr::kMstatusMpie);
    if (mie)
      mstatus_ |= csr::kMstatusMpie;
    pc_ = mtvec_;
    inTrapHandler_ = true;
  }


  void
  Machine::returnFromTrap()
  {
    uint32_t mpie = mstatus_ & csr::kMstatusMpie;
    mstatus_ &= ~csr::kMstatusMie;
    if (mpie)
      mstatus_ |= csr::kMstatusMie;
    mstatus_ |= csr::kMstatusMpie;
    pc_ = mepc_;
    inTrapHandler_ = false;
  }


  uint32_t
  Machine::csrAccess(uint16_t addr, CsrOp op, uint32_t value)
  {
    auto newValue = [&](uint32_t old) -> uint32_t {
      switch (op)
        {
        case CsrOp::Write: return value;
        case CsrOp::Set:   return old | value;
        case CsrOp::Clear: return old & ~value;
        case CsrOp::Read:  break;
        }
      return old;
    };
    auto readOnly = [&](uint32_t current) -> uint32_t {
      if (op != CsrOp::Read)
        throw CsrFault(addr, "write to read-only CSR");
      return current;
    };
    // Read-write CSR with the given writable-bit mask.
    auto masked = [&](uint32_t& reg, uint32_t mask) -> uint32_t {
      uint32_t old = reg;
      if (op != CsrOp::Read)
        reg = (old & ~mask) | (newValue(old) & mask);
      return old;
    };

    switch (addr)
      {
      case csr::kMstatus:
        return masked(mstatus_, csr::kMstatusMie | csr::kMstatusMpie);
      case csr::kMisa:
        // RV32 with E and C; writes are ignored (WARL).
        return (1u << 30) | (1u << 4) | (1u << 2);
      case csr::kMie:
        return masked(mie_, csr::kMeip);
      case csr::kMtvec:
        return masked(mtvec_, ~uint32_t(3));
      case csr::kMscratch:
        return masked(mscratch_, ~uint32_t(0));
      case csr::kMepc:
        return masked(mepc_, ~uint32_t(1));
      case csr::kMcause:
        return masked(mcause_, ~uint32_t(0));
      case csr::kMtval:
        return masked(mtval_, ~uint32_t(0));
      case csr::kMip:
        {
          uint32_t old = interrupts_.pending(0) ? csr::kMeip : 0;
          if (op != CsrOp::Read && !(newValue(old) & csr::kMeip))
            interrupts_.clear(0);
          return old;
        }
      case csr::kMmulMode:
        return masked(mmulMode_, 1);
      case csr::kMmulStatus:
        return readOnly(engine_.statusWord());
      case csr::kMcycle:
      case csr::kCycle:
        return readOnly(uint32_t(cycle_));
      case csr::kMcycleh:
      case csr::kCycleh:
        return readOnly(uint32_t(cycle_ >> 32));
      case csr::kMinstret:
      case csr::kInstret:
        return readOnly(uint32_t(instret_));
      case csr::kMinstreth:
      case csr::kInstreth:
        return readOnly(uint32_t(instret_ >> 32));
      case csr::kMhartid:
        return readOnly(0);
      default:
        throw CsrFault(addr, "unimplemented CSR");
      }
  }


  RunStats
  Machine::stats() const
  {
    RunStats s = activity_;
    s.totalCycles = cycle_;
    s.retiredInstructions = instret_;
    s.memReads = memory_.reads();
    s.memWrites = memory_.writes();
    return s;
  }

}
