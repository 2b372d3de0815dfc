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

#include <cstdint>
#include <string>
#include <vector>

namespace mmulrv
{

  /// ABI register numbers available under RV32E.
  namespace reg
  {
    constexpr unsigned zero = 0, ra = 1, sp = 2, gp = 3, tp = 4;
    constexpr unsigned t0 = 5, t1 = 6, t2 = 7, s0 = 8, s1 = 9;
    constexpr unsigned a0 = 10, a1 = 11, a2 = 12, a3 = 13, a4 = 14, a5 = 15;
  }


  /// Re-encode a decoded instruction in its 32-bit form.
  uint32_t encodeInstruction(const DecodedInstruction& inst);


  struct Label
  {
    size_t id = SIZE_MAX;
  };


  /// Minimal two-pass assembler for RV32EC + MMUL. Instructions are
  /// appended in order at a fixed origin; label references are patched
  /// by finish(). Keeps an assembler-syntax listing of what it emitted.
  class ProgramBuilder
  {
  public:
    explicit ProgramBuilder(uint32_t origin = 0);

    Label newLabel(std::string name = {});
    void bind(Label label);
    uint32_t address(Label label) const;

    uint32_t origin() const
    { return origin_; }

    uint32_t here() const
    { return origin_ + uint32_t(bytes_.size()); }

    size_t instructionCount() const;

    void emit32(uint32_t word, std::string text);
    void emit16(uint16_t half, std::string text);

    // RV32E base.
    void lui(unsigned rd, uint32_t imm20);
    void auipc(unsigned rd, uint32_t imm20);
    void jal(unsigned rd, Label target);
    void jalr(unsigned rd, unsigned rs1, int32_t imm);
    void beq(unsigned rs1, unsigned rs2, Label target);
    void bne(unsigned rs1, unsigned rs2, Label target);
    void blt(unsigned rs1, unsigned rs2, Label target);
    void bge(unsigned rs1, unsigned rs2, Label target);
    void bltu(unsigned rs1, unsigned rs2, Label target);
    void bgeu(unsigned rs1, unsigned rs2, Label target);
    void lb(unsigned rd, int32_t off, unsigned rs1);
    void lh(unsigned rd, int32_t off, unsigned rs1);
    void lw(unsigned rd, int32_t off, unsigned rs1);
    void lbu(unsigned rd, int32_t off, unsigned rs1);
    void lhu(unsigned rd, int32_t off, unsigned rs1);
    void sb(unsigned rs2, int32_t off, unsigned rs1);
    void sh(unsigned rs2, int32_t off, unsigned rs1);
    void sw(unsigned rs2, int32_t off, unsigned rs1);
    void addi(unsigned rd, unsigned rs1, int32_t imm);
    void slti(unsigned rd, unsigned rs1, int32_t imm);
    void sltiu(unsigned rd, unsigned rs1, int32_t imm);
    void xori(unsigned rd, unsigned rs1, int32_t imm);
    void ori(unsigned rd, unsigned rs1, int32_t imm);
    void andi(unsigned rd, unsigned rs1, int32_t imm);
    void slli(unsigned rd, unsigned rs1, unsigned shamt);
    void srli(unsigned rd, unsigned rs1, unsigned shamt);
    void srai(unsigned rd, unsigned rs1, unsigned shamt);
    void add(unsigned rd, unsigned rs1, unsigned rs2);
    void sub(unsigned rd, unsigned rs1, unsigned rs2);
    void sll(unsigned rd, unsigned rs1, unsigned rs2);
    void slt(unsigned rd, unsigned rs1, unsigned rs2);
    void sltu(unsigned rd, unsigned rs1, unsigned rs2);
    void xor_(unsigned rd, unsigned rs1, unsigned rs2);
    void srl(unsigned rd, unsigned rs1, unsigned rs2);
    void sra(unsigned rd, unsigned rs1, unsigned rs2);
    void or_(unsigned rd, unsigned rs1, unsigned rs2);
    void and_(unsigned rd, unsigned rs1, unsigned rs2);
    void fence();
    void ecall();
    void ebreak();
    void mret();
    void wfi();
    void csrrw(unsigned rd, uint16_t csr, unsigned rs1);
    void csrrs(unsigned rd, uint16_t csr, unsigned rs1);
    void csrrc(unsigned rd, uint16_t csr, unsigned rs1);
    void csrrwi(unsigned rd, uint16_t csr, unsigned uimm);
    void csrrsi(unsigned rd, uint16_t csr, unsigned uimm);
    void csrrci(unsigned rd, uint16_t csr, unsigned uimm);

    /// R4-type MMUL: P at [rd], A at [rs1], B at [rs2], N at [rs3].
    void mmul(unsigned rd, unsigned rs1, unsigned rs2, unsigned rs3,
              unsigned words);

    // Pseudo-instructions.
    void nop()                                   { addi(0, 0, 0); }
    void mv(unsigned rd, unsigned rs)            { addi(rd, rs, 0); }
    void j(Label target)                         { jal(reg::zero, target); }
    void call(Label target)                      { jal(reg::ra, target); }
    void ret()                                   { jalr(reg::zero, reg::ra, 0); }
    void beqz(unsigned rs, Label target)         { beq(rs, reg::zero, target); }
    void bnez(unsigned rs, Label target)         { bne(rs, reg::zero, target); }
    void csrr(unsigned rd, uint16_t csr)         { csrrs(rd, csr, reg::zero); }
    void csrw(uint16_t csr, unsigned rs)         { csrrw(reg::zero, csr, rs); }
    void csrwi(uint16_t csr, unsigned uimm)      { csrrwi(reg::zero, csr, uimm); }
    void csrsi(uint16_t csr, unsigned uimm)      { csrrsi(reg::zero, csr, uimm); }
    void csrci(uint16_t csr, unsigned uimm)      { csrrci(reg::zero, csr, uimm); }

    /// Load a 32-bit constant with addi, lui, or lui+addi.
    void li(unsigned rd, uint32_t value);

    /// Load a label's absolute address with lui+addi.
    void la(unsigned rd, Label target);

    /// t0 = 0; ecall.
    void halt();

    // RV32C forms.
    void c_nop();
    void c_addi(unsigned rd, int32_t imm);
    void c_li(unsigned rd, int32_t imm);
    void c_lui(unsigned rd, int32_t imm6);
    void c_addi16sp(int32_t imm);
    void c_addi4spn(unsigned rdp, uint32_t imm);
    void c_srli(unsigned rdp, unsigned shamt);
    void c_srai(unsigned rdp, unsigned shamt);
    void c_andi(unsigned rdp, int32_t imm);
    void c_sub(unsigned rdp, unsigned rs2p);
    void c_xor(unsigned rdp, unsigned rs2p);
    void c_or(unsigned rdp, unsigned rs2p);
    void c_and(unsigned rdp, unsigned rs2p);
    void c_slli(unsigned rd, unsigned shamt);
    void c_mv(unsigned rd, unsigned rs2);
    void c_add(unsigned rd, unsigned rs2);
    void c_jr(unsigned rs1);
    void c_jalr(unsigned rs1);
    void c_ebreak();
    void c_lw(unsigned rdp, uint32_t off, unsigned rs1p);
    void c_sw(unsigned rs2p, uint32_t off, unsigned rs1p);
    void c_lwsp(unsigned rd, uint32_t off);
    void c_swsp(unsigned rs2, uint32_t off);
    void c_j(Label target);
    void c_jal(Label target);
    void c_beqz(unsigned rs1p, Label target);
    void c_bnez(unsigned rs1p, Label target);

    /// Resolve label references and return the code image.
    std::vector<uint8_t> finish();

    /// One line per emitted instruction: address, encoding, text.
    std::string listing() const;

  private:
    enum class FixupKind { Branch, Jal, CJump, CBranch, AbsHiLo };

    struct Fixup
    {
      FixupKind kind;
      size_t offset;
      Label label;
    };

    struct Line
    {
      uint32_t addr;
      uint32_t bits;
      bool compressed;
      std::string text;
      bool label = false;
    };

    void reference(FixupKind kind, Label label);
    std::string labelName(Label label) const;
    void branch(unsigned f3, const char* name, unsigned rs1, unsigned rs2,
                Label target);
    void cbranch(unsigned f3, const char* name, unsigned rs1p, Label target);
    void cjump(unsigned f3, const char* name, Label target);
    void patch32(size_t offset, uint32_t word);
    void patch16(size_t offset, uint16_t half);
    uint32_t read32(size_t offset) const;
    uint16_t read16(size_t offset) const;

    uint32_t origin_;
    std::vector<uint8_t> bytes_;
    std::vector<int64_t> labels_;
    std::vector<std::string> labelNames_;
    std::vector<Fixup> fixups_;
    std::vector<Line> listing_;
  };

}
