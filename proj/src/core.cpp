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

#include "mmulrv/core.hpp"
#include "mmulrv/error.hpp"

#include <algorithm>

namespace mmulrv
{

  namespace
  {
    bool
    usesAlu(Op op)
    {
      switch (op)
        {
        case Op::Lui: case Op::Fence: case Op::Ecall: case Op::Ebreak:
        case Op::Mret: case Op::Wfi: case Op::Mmul:
        case Op::Csrrw: case Op::Csrrs: case Op::Csrrc:
        case Op::Csrrwi: case Op::Csrrsi: case Op::Csrrci:
          return false;
        default:
          return true;
        }
    }

    bool
    usesRegFile(Op op)
    {
      switch (op)
        {
        case Op::Fence: case Op::Ebreak: case Op::Mret: case Op::Wfi:
          return false;
        default:
          return true;
        }
    }

    uint32_t
    memoryCause(const MemoryFault& f)
    {
      if (f.kind() == MemoryFault::MisalignedAccess)
        return f.isStore() ? cause::kStoreMisaligned : cause::kLoadMisaligned;
      return f.isStore() ? cause::kStoreAccessFault : cause::kLoadAccessFault;
    }
  }


  const char*
  stopReasonName(StopReason reason)
  {
    switch (reason)
      {
      case StopReason::Halted:               return "halted";
      case StopReason::PcSentinel:           return "pc_sentinel";
      case StopReason::CycleBudgetExhausted: return "cycle_budget_exhausted";
      case StopReason::Trapped:              return "trapped";
      }
    return "?";
  }


  Core::Core(Machine& machine, TimingModel timing)
    : machine_(machine), timing_(timing),
      cache_(machine.memory().regions().size())
  { }


  const DecodedInstruction&
  Core::decodeCached(uint32_t pc, uint32_t raw)
  {
    const auto& regions = machine_.memory().regions();
    for (size_t i = 0; i < regions.size(); ++i)
      {
        const MemoryRegion& region = regions[i];
        if (pc < region.base || pc >= region.end())
          continue;
        auto& slots = cache_[i];
        if (slots.empty())
          slots.resize(region.bytes.size() / 2);
        CacheEntry& entry = slots[(pc - region.base) / 2];
        if (!entry.valid || entry.raw != raw)
          {
            entry.inst = decode(raw);
            entry.raw = raw;
            entry.valid = true;
          }
        return entry.inst;
      }
    throw MemoryFault(MemoryFault::UnmappedAddress, pc, false);
  }


  void
  Core::takeException(StepReport& report, uint32_t causeCode, uint32_t tval,
                      const std::string& detail)
  {
    Machine& m = machine_;
    m.engine().abort();
    m.enterTrap(causeCode, tval);
    uint64_t cycles = timing_.baseCpi + timing_.trapEntryCycles;
    m.advance(cycles);
    report.cycles = cycles;
    report.trap = Trap{causeCode, tval, report.pc, detail};
  }


  StepReport
  Core::step()
  {
    Machine& m = machine_;
    StepReport report;
    report.pc = m.pc();

    if (m.interruptReady())
      {
        uint64_t asserted = m.interrupts().line(0).assertCycle;
        m.enterTrap(cause::kMachineExternalInterrupt, 0);
        m.advance(timing_.trapEntryCycles);
        recordActivity(m.activity(), Module::Fetch, timing_.trapEntryCycles);
        m.activity().interruptLatencies.push_back({asserted, m.cycle()});
        report.cycles = timing_.trapEntryCycles;
        report.trap = Trap{cause::kMachineExternalInterrupt, 0, report.pc,
                           "machine external interrupt"};
        return report;
      }

    uint32_t raw;
    uint64_t fetchCycles;
    try
      {
        LoadResult lo = m.memory().fetchHalf(report.pc);
        unsigned latency = lo.latency;
        raw = lo.value;
        if (isFullLength(raw))
          {
            LoadResult hi = m.memory().fetchHalf(report.pc + 2);
            raw |= hi.value << 16;
            latency = std::max(latency, hi.latency);
          }
        fetchCycles = timing_.baseCpi + TimingModel::waitStates(latency);
      }
    catch (const MemoryFault& f)
      {
        takeException(report,
                      f.kind() == MemoryFault::MisalignedAccess
                        ? cause::kInstructionMisaligned
                        : cause::kInstructionAccessFault,
                      f.address(), f.what());
        return report;
      }

    try
      {
        const DecodedInstruction& inst = decodeCached(report.pc, raw);
        execute(inst, report, fetchCycles);
      }
    catch (const IllegalInstruction& e)
      {
        takeException(report, cause::kIllegalInstruction, raw, e.what());
      }
    catch (const CsrFault& e)
      {
        takeException(report, cause::kIllegalInstruction, raw, e.what());
      }
    catch (const MmulFault& e)
      {
        takeException(report, cause::kIllegalInstruction, raw, e.what());
      }
    catch (const MemoryFault& f)
      {
        takeException(report, memoryCause(f), f.address(), f.what());
      }
    return report;
  }


  void
  Core::execute(const DecodedInstruction& d, StepReport& report,
                uint64_t fetchCycles)
  {
    Machine& m = machine_;
    RegisterFile& x = m.regs();
    const uint32_t pc = report.pc;
    uint32_t next = pc + d.size();
    uint64_t cycles = fetchCycles;
    bool taken = false;

    const uint32_t a = x.read(d.rs1);
    const uint32_t b = x.read(d.rs2);
    const uint32_t imm = uint32_t(d.imm);

    auto branch = [&](bool cond) {
      if (cond)
        {
          next = pc + imm;
          taken = true;
        }
    };
    auto loadValue = [&](unsigned size) {
      LoadResult r = m.memory().load(a + imm, size);
      cycles += TimingModel::waitStates(r.latency);
      return r.value;
    };
    auto storeValue = [&](unsigned size) {
      unsigned latency = m.memory().store(a + imm, size, b);
      cycles += TimingModel::waitStates(latency);
    };
    auto csrOp = [&](CsrOp op, uint32_t operand, bool writes) {
      uint32_t old = m.csrAccess(d.csr, writes ? op : CsrOp::Read, operand);
      x.write(d.rd, old);
    };

    switch (d.op)
      {
      case Op::Lui:   x.write(d.rd, imm); break;
      case Op::Auipc: x.write(d.rd, pc + imm); break;
      case Op::Jal:
        x.write(d.rd, next);
        next = pc + imm;
        taken = true;
        break;
      case Op::Jalr:
        {
          uint32_t target = (a + imm) & ~uint32_t(1);
          x.write(d.rd, next);
          next = target;
          taken = true;
          break;
        }
      case Op::Beq:  branch(a == b); break;
      case Op::Bne:  branch(a != b); break;
      case Op::Blt:  branch(int32_t(a) < int32_t(b)); break;
      case Op::Bge:  branch(int32_t(a) >= int32_t(b)); break;
      case Op::Bltu: branch(a < b); break;
      case Op::Bgeu: branch(a >= b); break;

      case Op::Lb:  x.write(d.rd, uint32_t(int32_t(int8_t(loadValue(1))))); break;
      case Op::Lh:  x.write(d.rd, uint32_t(int32_t(int16_t(loadValue(2))))); break;
      case Op::Lw:  x.write(d.rd, loadValue(4)); break;
      case Op::Lbu: x.write(d.rd, loadValue(1)); break;
      case Op::Lhu: x.write(d.rd, loadValue(2)); break;
      case Op::Sb:  storeValue(1); break;
      case Op::Sh:  storeValue(2); break;
      case Op::Sw:  storeValue(4); break;

      case Op::Addi:  x.write(d.rd, a + imm); break;
      case Op::Slti:  x.write(d.rd, int32_t(a) < d.imm); break;
      case Op::Sltiu: x.write(d.rd, a < imm); break;
      case Op::Xori:  x.write(d.rd, a ^ imm); break;
      case Op::Ori:   x.write(d.rd, a | imm); break;
      case Op::Andi:  x.write(d.rd, a & imm); break;
      case Op::Slli:  x.write(d.rd, a << (imm & 31)); break;
      case Op::Srli:  x.write(d.rd, a >> (imm & 31)); break;
      case Op::Srai:  x.write(d.rd, uint32_t(int32_t(a) >> (imm & 31))); break;

      case Op::Add:  x.write(d.rd, a + b); break;
      case Op::Sub:  x.write(d.rd, a - b); break;
      case Op::Sll:  x.write(d.rd, a << (b & 31)); break;
      case Op::Slt:  x.write(d.rd, int32_t(a) < int32_t(b)); break;
      case Op::Sltu: x.write(d.rd, a < b); break;
      case Op::Xor:  x.write(d.rd, a ^ b); break;
      case Op::Srl:  x.write(d.rd, a >> (b & 31)); break;
      case Op::Sra:  x.write(d.rd, uint32_t(int32_t(a) >> (b & 31))); break;
      case Op::Or:   x.write(d.rd, a | b); break;
      case Op::And:  x.write(d.rd, a & b); break;

      case Op::Fence:
      case Op::Wfi:
        break;

      case Op::Ecall:
        if (x.read(kHaltRegister) == 0)
          report.halted = true;
        else
          {
            takeException(report, cause::kEcallFromM, 0, "environment call");
            return;
          }
        break;

      case Op::Ebreak:
        takeException(report, cause::kBreakpoint, pc, "breakpoint");
        return;

      case Op::Mret:
        m.returnFromTrap();
        next = m.pc();
        taken = true;
        break;

      case Op::Csrrw:  csrOp(CsrOp::Write, a, true); break;
      case Op::Csrrs:  csrOp(CsrOp::Set, a, d.rs1 != 0); break;
      case Op::Csrrc:  csrOp(CsrOp::Clear, a, d.rs1 != 0); break;
      case Op::Csrrwi: csrOp(CsrOp::Write, imm, true); break;
      case Op::Csrrsi: csrOp(CsrOp::Set, imm, imm != 0); break;
      case Op::Csrrci: csrOp(CsrOp::Clear, imm, imm != 0); break;

      case Op::Mmul:
        {
          MmulEngine& engine = m.engine();
          if (m.inTrapHandler() && engine.busy())
            throw MmulFault(MmulFault::SequenceBroken,
                            "MMUL issued in a trap handler while a partial"
                            " sequence is in flight");
          MmulOperands ops{a, b, x.read(d.rs3), x.read(d.rd),
                           unsigned(d.lenField) + 1};
          MmulCallReport r = engine.execute(m.memory(), ops,
                                            m.partialModeSelected());
          cycles += r.cycles();
          RunStats& s = m.activity();
          ++s.mmulInvocations;
          s.mmulEngineCycles += r.cycles();
          s.mmulComputeCycles += r.computeCycles;
          recordActivity(s, Module::Mmul, r.computeCycles);
          // Operand addresses are formed in the ALU (base + offset).
          recordActivity(s, Module::Alu, r.loads + r.stores);
          break;
        }
      }

    if (taken)
      cycles += timing_.takenBranchPenalty;

    RunStats& s = m.activity();
    recordActivity(s, Module::Fetch,
                   fetchCycles + (taken ? timing_.takenBranchPenalty : 0));
    recordActivity(s, Module::Decode, 1);
    if (usesAlu(d.op))
      recordActivity(s, Module::Alu, 1);
    if (usesRegFile(d.op))
      recordActivity(s, Module::RegFile, 1);
    ++s.fetches;

    m.advance(cycles);
    m.retire();
    m.setPc(next);
    report.cycles = cycles;
    report.retired = d;
  }


  RunResult
  Core::run(const RunOptions& options)
  {
    Machine& m = machine_;
    if (options.trapVector)
      m.csrAccess(csr::kMtvec, CsrOp::Write, *options.trapVector);

    std::vector<uint64_t> schedule = options.interruptSchedule;
    std::sort(schedule.begin(), schedule.end());
    size_t nextIrq = 0;

    RunResult result;
    while (true)
      {
        if (options.pcSentinel && m.pc() == *options.pcSentinel)
          {
            result.reason = StopReason::PcSentinel;
            break;
          }
        if (m.cycle() >= options.cycleBudget)
          {
            result.reason = StopReason::CycleBudgetExhausted;
            break;
          }
        while (nextIrq < schedule.size() && schedule[nextIrq] <= m.cycle())
          m.raiseInterrupt(0, schedule[nextIrq++]);

        StepReport r = step();
        if (r.halted)
          {
            result.reason = StopReason::Halted;
            break;
          }
        if (r.trap && !r.trap->isInterrupt() && options.stopOnException)
          {
            result.reason = StopReason::Trapped;
            result.trap = r.trap;
            break;
          }
      }
    result.stats = m.stats();
    return result;
  }

}
