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
#include "mmulrv/error.hpp"
#include "mmulrv/mmul_encoding.hpp"

#include <iomanip>
#include <sstream>

namespace mmulrv
{

  namespace
  {
    std::string
    x(unsigned r)
    {
      return "x" + std::to_string(r);
    }

    unsigned
    checkReg(unsigned r)
    {
      if (r >= 16)
        throw ConfigError("register " + x(r) + " not available under RV32E");
      return r;
    }

    unsigned
    checkCReg(unsigned r)
    {
      if (r < 8 || r > 15)
        throw ConfigError("register " + x(r) + " not addressable by compressed form");
      return r - 8;
    }

    void
    checkSigned(int64_t value, unsigned width, const char* what)
    {
      int64_t lim = int64_t(1) << (width - 1);
      if (value < -lim || value >= lim)
        throw ConfigError(std::string(what) + " immediate " + std::to_string(value)
                          + " out of range");
    }

    uint32_t
    typeI(uint32_t opcode, unsigned rd, unsigned f3, unsigned rs1, int32_t imm)
    {
      checkSigned(imm, 12, "I-type");
      return (uint32_t(imm & 0xfff) << 20) | (checkReg(rs1) << 15) | (f3 << 12)
        | (checkReg(rd) << 7) | opcode;
    }

    uint32_t
    typeR(uint32_t opcode, unsigned rd, unsigned f3, unsigned rs1, unsigned rs2,
          unsigned f7)
    {
      return (f7 << 25) | (checkReg(rs2) << 20) | (checkReg(rs1) << 15) | (f3 << 12)
        | (checkReg(rd) << 7) | opcode;
    }

    uint32_t
    typeS(unsigned f3, unsigned rs1, unsigned rs2, int32_t imm)
    {
      checkSigned(imm, 12, "S-type");
      uint32_t u = uint32_t(imm);
      return (((u >> 5) & 0x7f) << 25) | (checkReg(rs2) << 20) | (checkReg(rs1) << 15)
        | (f3 << 12) | ((u & 0x1f) << 7) | 0x23;
    }

    uint32_t
    typeB(unsigned f3, unsigned rs1, unsigned rs2, int32_t imm)
    {
      checkSigned(imm, 13, "branch");
      uint32_t u = uint32_t(imm);
      return (((u >> 12) & 1) << 31) | (((u >> 5) & 0x3f) << 25)
        | (checkReg(rs2) << 20) | (checkReg(rs1) << 15) | (f3 << 12)
        | (((u >> 1) & 0xf) << 8) | (((u >> 11) & 1) << 7) | 0x63;
    }

    uint32_t
    typeJ(unsigned rd, int32_t imm)
    {
      checkSigned(imm, 21, "jal");
      uint32_t u = uint32_t(imm);
      return (((u >> 20) & 1) << 31) | (((u >> 1) & 0x3ff) << 21)
        | (((u >> 11) & 1) << 20) | (((u >> 12) & 0xff) << 12)
        | (checkReg(rd) << 7) | 0x6f;
    }

    uint32_t
    typeU(uint32_t opcode, unsigned rd, uint32_t imm20)
    {
      if (imm20 > 0xfffff)
        throw ConfigError("U-type immediate out of range");
      return (imm20 << 12) | (checkReg(rd) << 7) | opcode;
    }

    uint16_t
    cJumpBits(int32_t off)
    {
      checkSigned(off, 12, "c.j");
      uint32_t u = uint32_t(off);
      return uint16_t((((u >> 11) & 1) << 12) | (((u >> 4) & 1) << 11)
                      | (((u >> 8) & 3) << 9) | (((u >> 10) & 1) << 8)
                      | (((u >> 6) & 1) << 7) | (((u >> 7) & 1) << 6)
                      | (((u >> 1) & 7) << 3) | (((u >> 5) & 1) << 2));
    }

    uint16_t
    cBranchBits(int32_t off)
    {
      checkSigned(off, 9, "c.beqz");
      uint32_t u = uint32_t(off);
      return uint16_t((((u >> 8) & 1) << 12) | (((u >> 3) & 3) << 10)
                      | (((u >> 6) & 3) << 5) | (((u >> 1) & 3) << 3)
                      | (((u >> 5) & 1) << 2));
    }

    uint16_t
    cImm6(int32_t imm)
    {
      checkSigned(imm, 6, "compressed");
      uint32_t u = uint32_t(imm);
      return uint16_t((((u >> 5) & 1) << 12) | ((u & 0x1f) << 2));
    }
  }


  uint32_t
  encodeInstruction(const DecodedInstruction& d)
  {
    const int32_t imm = d.imm;
    switch (d.op)
      {
      case Op::Lui:   return typeU(0x37, d.rd, uint32_t(imm) >> 12);
      case Op::Auipc: return typeU(0x17, d.rd, uint32_t(imm) >> 12);
      case Op::Jal:   return typeJ(d.rd, imm);
      case Op::Jalr:  return typeI(0x67, d.rd, 0, d.rs1, imm);
      case Op::Beq:   return typeB(0, d.rs1, d.rs2, imm);
      case Op::Bne:   return typeB(1, d.rs1, d.rs2, imm);
      case Op::Blt:   return typeB(4, d.rs1, d.rs2, imm);
      case Op::Bge:   return typeB(5, d.rs1, d.rs2, imm);
      case Op::Bltu:  return typeB(6, d.rs1, d.rs2, imm);
      case Op::Bgeu:  return typeB(7, d.rs1, d.rs2, imm);
      case Op::Lb:    return typeI(0x03, d.rd, 0, d.rs1, imm);
      case Op::Lh:    return typeI(0x03, d.rd, 1, d.rs1, imm);
      case Op::Lw:    return typeI(0x03, d.rd, 2, d.rs1, imm);
      case Op::Lbu:   return typeI(0x03, d.rd, 4, d.rs1, imm);
      case Op::Lhu:   return typeI(0x03, d.rd, 5, d.rs1, imm);
      case Op::Sb:    return typeS(0, d.rs1, d.rs2, imm);
      case Op::Sh:    return typeS(1, d.rs1, d.rs2, imm);
      case Op::Sw:    return typeS(2, d.rs1, d.rs2, imm);
      case Op::Addi:  return typeI(0x13, d.rd, 0, d.rs1, imm);
      case Op::Slti:  return typeI(0x13, d.rd, 2, d.rs1, imm);
      case Op::Sltiu: return typeI(0x13, d.rd, 3, d.rs1, imm);
      case Op::Xori:  return typeI(0x13, d.rd, 4, d.rs1, imm);
      case Op::Ori:   return typeI(0x13, d.rd, 6, d.rs1, imm);
      case Op::Andi:  return typeI(0x13, d.rd, 7, d.rs1, imm);
      case Op::Slli:  return typeI(0x13, d.rd, 1, d.rs1, imm & 31);
      case Op::Srli:  return typeI(0x13, d.rd, 5, d.rs1, imm & 31);
      case Op::Srai:  return typeI(0x13, d.rd, 5, d.rs1, 0x400 | (imm & 31));
      case Op::Add:   return typeR(0x33, d.rd, 0, d.rs1, d.rs2, 0);
      case Op::Sub:   return typeR(0x33, d.rd, 0, d.rs1, d.rs2, 0x20);
      case Op::Sll:   return typeR(0x33, d.rd, 1, d.rs1, d.rs2, 0);
      case Op::Slt:   return typeR(0x33, d.rd, 2, d.rs1, d.rs2, 0);
      case Op::Sltu:  return typeR(0x33, d.rd, 3, d.rs1, d.rs2, 0);
      case Op::Xor:   return typeR(0x33, d.rd, 4, d.rs1, d.rs2, 0);
      case Op::Srl:   return typeR(0x33, d.rd, 5, d.rs1, d.rs2, 0);
      case Op::Sra:   return typeR(0x33, d.rd, 5, d.rs1, d.rs2, 0x20);
      case Op::Or:    return typeR(0x33, d.rd, 6, d.rs1, d.rs2, 0);
      case Op::And:   return typeR(0x33, d.rd, 7, d.rs1, d.rs2, 0);
      case Op::Fence: return 0x0ff0000f;
      case Op::Ecall: return 0x00000073;
      case Op::Ebreak: return 0x00100073;
      case Op::Mret:  return 0x30200073;
      case Op::Wfi:   return 0x10500073;
      case Op::Csrrw:
      case Op::Csrrs:
      case Op::Csrrc:
        {
          unsigned f3 = d.op == Op::Csrrw ? 1 : d.op == Op::Csrrs ? 2 : 3;
          return (uint32_t(d.csr) << 20) | (checkReg(d.rs1) << 15) | (f3 << 12)
            | (checkReg(d.rd) << 7) | 0x73;
        }
      case Op::Csrrwi:
      case Op::Csrrsi:
      case Op::Csrrci:
        {
          unsigned f3 = d.op == Op::Csrrwi ? 5 : d.op == Op::Csrrsi ? 6 : 7;
          return (uint32_t(d.csr) << 20) | (uint32_t(imm & 31) << 15) | (f3 << 12)
            | (checkReg(d.rd) << 7) | 0x73;
        }
      case Op::Mmul:
        return encodeR4(d.rd, d.rs1, d.rs2, d.rs3, unsigned(d.lenField) + 1);
      }
    throw ConfigError("cannot encode instruction");
  }


  ProgramBuilder::ProgramBuilder(uint32_t origin)
    : origin_(origin)
  {
    if (origin & 1)
      throw ConfigError("program origin must be halfword aligned");
  }


  Label
  ProgramBuilder::newLabel(std::string name)
  {
    Label l{labels_.size()};
    labels_.push_back(-1);
    if (name.empty())
      name = ".L" + std::to_string(l.id);
    labelNames_.push_back(std::move(name));
    return l;
  }


  void
  ProgramBuilder::bind(Label label)
  {
    if (label.id >= labels_.size())
      throw ConfigError("unknown label");
    if (labels_[label.id] >= 0)
      throw ConfigError("label " + labelNames_[label.id] + " bound twice");
    labels_[label.id] = int64_t(here());
    listing_.push_back({here(), 0, false, labelNames_[label.id] + ":", true});
  }


  uint32_t
  ProgramBuilder::address(Label label) const
  {
    if (label.id >= labels_.size() || labels_[label.id] < 0)
      throw ConfigError("label " + labelName(label) + " is not bound");
    return uint32_t(labels_[label.id]);
  }


  std::string
  ProgramBuilder::labelName(Label label) const
  {
    return label.id < labelNames_.size() ? labelNames_[label.id] : "?";
  }


  size_t
  ProgramBuilder::instructionCount() const
  {
    size_t n = 0;
    for (const Line& line : listing_)
      n += line.label ? 0 : 1;
    return n;
  }


  void
  ProgramBuilder::emit32(uint32_t word, std::string text)
  {
    listing_.push_back({here(), word, false, std::move(text)});
    for (int i = 0; i < 4; ++i)
      bytes_.push_back(uint8_t(word >> (8 * i)));
  }


  void
  ProgramBuilder::emit16(uint16_t half, std::string text)
  {
    listing_.push_back({here(), half, true, std::move(text)});
    bytes_.push_back(uint8_t(half));
    bytes_.push_back(uint8_t(half >> 8));
  }


  void
  ProgramBuilder::reference(FixupKind kind, Label label)
  {
    if (label.id >= labels_.size())
      throw ConfigError("unknown label");
    fixups_.push_back({kind, bytes_.size(), label});
  }


  uint32_t
  ProgramBuilder::read32(size_t offset) const
  {
    return uint32_t(bytes_[offset]) | (uint32_t(bytes_[offset + 1]) << 8)
      | (uint32_t(bytes_[offset + 2]) << 16) | (uint32_t(bytes_[offset + 3]) << 24);
  }


  uint16_t
  ProgramBuilder::read16(size_t offset) const
  {
    return uint16_t(bytes_[offset] | (bytes_[offset + 1] << 8));
  }


  void
  ProgramBuilder::patch32(size_t offset, uint32_t word)
  {
    for (int i = 0; i < 4; ++i)
      bytes_[offset + i] = uint8_t(word >> (8 * i));
  }


  void
  ProgramBuilder::patch16(size_t offset, uint16_t half)
  {
    bytes_[offset] = uint8_t(half);
    bytes_[offset + 1] = uint8_t(half >> 8);
  }


  void ProgramBuilder::lui(unsigned rd, uint32_t imm20)
  {
    std::ostringstream os;
    os << "lui " << x(rd) << ", 0x" << std::hex << imm20;
    emit32(typeU(0x37, rd, imm20), os.str());
  }

  void ProgramBuilder::auipc(unsigned rd, uint32_t imm20)
  {
    std::ostringstream os;
    os << "auipc " << x(rd) << ", 0x" << std::hex << imm20;
    emit32(typeU(0x17, rd, imm20), os.str());
  }

  void ProgramBuilder::jal(unsigned rd, Label target)
  {
    reference(FixupKind::Jal, target);
    emit32(typeJ(rd, 0), "jal " + x(rd) + ", " + labelName(target));
  }

  void ProgramBuilder::jalr(unsigned rd, unsigned rs1, int32_t imm)
  {
    emit32(typeI(0x67, rd, 0, rs1, imm),
           "jalr " + x(rd) + ", " + std::to_string(imm) + "(" + x(rs1) + ")");
  }

  void
  ProgramBuilder::branch(unsigned f3, const char* name, unsigned rs1,
                         unsigned rs2, Label target)
  {
    reference(FixupKind::Branch, target);
    emit32(typeB(f3, rs1, rs2, 0),
           std::string(name) + " " + x(rs1) + ", " + x(rs2) + ", " + labelName(target));
  }

  void ProgramBuilder::beq(unsigned rs1, unsigned rs2, Label t)  { branch(0, "beq", rs1, rs2, t); }
  void ProgramBuilder::bne(unsigned rs1, unsigned rs2, Label t)  { branch(1, "bne", rs1, rs2, t); }
  void ProgramBuilder::blt(unsigned rs1, unsigned rs2, Label t)  { branch(4, "blt", rs1, rs2, t); }
  void ProgramBuilder::bge(unsigned rs1, unsigned rs2, Label t)  { branch(5, "bge", rs1, rs2, t); }
  void ProgramBuilder::bltu(unsigned rs1, unsigned rs2, Label t) { branch(6, "bltu", rs1, rs2, t); }
  void ProgramBuilder::bgeu(unsigned rs1, unsigned rs2, Label t) { branch(7, "bgeu", rs1, rs2, t); }

  namespace
  {
    std::string
    memText(const char* name, unsigned r, int32_t off, unsigned base)
    {
      return std::string(name) + " " + x(r) + ", " + std::to_string(off) + "(" + x(base) + ")";
    }
  }

  void ProgramBuilder::lb(unsigned rd, int32_t off, unsigned rs1)  { emit32(typeI(0x03, rd, 0, rs1, off), memText("lb", rd, off, rs1)); }
  void ProgramBuilder::lh(unsigned rd, int32_t off, unsigned rs1)  { emit32(typeI(0x03, rd, 1, rs1, off), memText("lh", rd, off, rs1)); }
  void ProgramBuilder::lw(unsigned rd, int32_t off, unsigned rs1)  { emit32(typeI(0x03, rd, 2, rs1, off), memText("lw", rd, off, rs1)); }
  void ProgramBuilder::lbu(unsigned rd, int32_t off, unsigned rs1) { emit32(typeI(0x03, rd, 4, rs1, off), memText("lbu", rd, off, rs1)); }
  void ProgramBuilder::lhu(unsigned rd, int32_t off, unsigned rs1) { emit32(typeI(0x03, rd, 5, rs1, off), memText("lhu", rd, off, rs1)); }
  void ProgramBuilder::sb(unsigned rs2, int32_t off, unsigned rs1) { emit32(typeS(0, rs1, rs2, off), memText("sb", rs2, off, rs1)); }
  void ProgramBuilder::sh(unsigned rs2, int32_t off, unsigned rs1) { emit32(typeS(1, rs1, rs2, off), memText("sh", rs2, off, rs1)); }
  void ProgramBuilder::sw(unsigned rs2, int32_t off, unsigned rs1) { emit32(typeS(2, rs1, rs2, off), memText("sw", rs2, off, rs1)); }

  namespace
  {
    std::string
    immText(const char* name, unsigned rd, unsigned rs1, int64_t imm)
    {
      return std::string(name) + " " + x(rd) + ", " + x(rs1) + ", " + std::to_string(imm);
    }

    std::string
    regText(const char* name, unsigned rd, unsigned rs1, unsigned rs2)
    {
      return std::string(name) + " " + x(rd) + ", " + x(rs1) + ", " + x(rs2);
    }

    unsigned
    checkShamt(unsigned shamt)
    {
      if (shamt > 31)
        throw ConfigError("shift amount out of range");
      return shamt;
    }
  }

  void ProgramBuilder::addi(unsigned rd, unsigned rs1, int32_t imm)  { emit32(typeI(0x13, rd, 0, rs1, imm), immText("addi", rd, rs1, imm)); }
  void ProgramBuilder::slti(unsigned rd, unsigned rs1, int32_t imm)  { emit32(typeI(0x13, rd, 2, rs1, imm), immText("slti", rd, rs1, imm)); }
  void ProgramBuilder::sltiu(unsigned rd, unsigned rs1, int32_t imm) { emit32(typeI(0x13, rd, 3, rs1, imm), immText("sltiu", rd, rs1, imm)); }
  void ProgramBuilder::xori(unsigned rd, unsigned rs1, int32_t imm)  { emit32(typeI(0x13, rd, 4, rs1, imm), immText("xori", rd, rs1, imm)); }
  void ProgramBuilder::ori(unsigned rd, unsigned rs1, int32_t imm)   { emit32(typeI(0x13, rd, 6, rs1, imm), immText("ori", rd, rs1, imm)); }
  void ProgramBuilder::andi(unsigned rd, unsigned rs1, int32_t imm)  { emit32(typeI(0x13, rd, 7, rs1, imm), immText("andi", rd, rs1, imm)); }
  void ProgramBuilder::slli(unsigned rd, unsigned rs1, unsigned sh)  { emit32(typeI(0x13, rd, 1, rs1, int32_t(checkShamt(sh))), immText("slli", rd, rs1, sh)); }
  void ProgramBuilder::srli(unsigned rd, unsigned rs1, unsigned sh)  { emit32(typeI(0x13, rd, 5, rs1, int32_t(checkShamt(sh))), immText("srli", rd, rs1, sh)); }
  void ProgramBuilder::srai(unsigned rd, unsigned rs1, unsigned sh)  { emit32(typeI(0x13, rd, 5, rs1, int32_t(0x400 | checkShamt(sh))), immText("srai", rd, rs1, sh)); }
  void ProgramBuilder::add(unsigned rd, unsigned rs1, unsigned rs2)  { emit32(typeR(0x33, rd, 0, rs1, rs2, 0), regText("add", rd, rs1, rs2)); }
  void ProgramBuilder::sub(unsigned rd, unsigned rs1, unsigned rs2)  { emit32(typeR(0x33, rd, 0, rs1, rs2, 0x20), regText("sub", rd, rs1, rs2)); }
  void ProgramBuilder::sll(unsigned rd, unsigned rs1, unsigned rs2)  { emit32(typeR(0x33, rd, 1, rs1, rs2, 0), regText("sll", rd, rs1, rs2)); }
  void ProgramBuilder::slt(unsigned rd, unsigned rs1, unsigned rs2)  { emit32(typeR(0x33, rd, 2, rs1, rs2, 0), regText("slt", rd, rs1, rs2)); }
  void ProgramBuilder::sltu(unsigned rd, unsigned rs1, unsigned rs2) { emit32(typeR(0x33, rd, 3, rs1, rs2, 0), regText("sltu", rd, rs1, rs2)); }
  void ProgramBuilder::xor_(unsigned rd, unsigned rs1, unsigned rs2) { emit32(typeR(0x33, rd, 4, rs1, rs2, 0), regText("xor", rd, rs1, rs2)); }
  void ProgramBuilder::srl(unsigned rd, unsigned rs1, unsigned rs2)  { emit32(typeR(0x33, rd, 5, rs1, rs2, 0), regText("srl", rd, rs1, rs2)); }
  void ProgramBuilder::sra(unsigned rd, unsigned rs1, unsigned rs2)  { emit32(typeR(0x33, rd, 5, rs1, rs2, 0x20), regText("sra", rd, rs1, rs2)); }
  void ProgramBuilder::or_(unsigned rd, unsigned rs1, unsigned rs2)  { emit32(typeR(0x33, rd, 6, rs1, rs2, 0), regText("or", rd, rs1, rs2)); }
  void ProgramBuilder::and_(unsigned rd, unsigned rs1, unsigned rs2) { emit32(typeR(0x33, rd, 7, rs1, rs2, 0), regText("and", rd, rs1, rs2)); }

  void ProgramBuilder::fence()  { emit32(0x0ff0000f, "fence"); }
  void ProgramBuilder::ecall()  { emit32(0x00000073, "ecall"); }
  void ProgramBuilder::ebreak() { emit32(0x00100073, "ebreak"); }
  void ProgramBuilder::mret()   { emit32(0x30200073, "mret"); }
  void ProgramBuilder::wfi()    { emit32(0x10500073, "wfi"); }

  namespace
  {
    uint32_t
    csrWord(unsigned f3, unsigned rd, uint16_t csr, unsigned src)
    {
      if (csr > 0xfff)
        throw ConfigError("CSR address out of range");
      return (uint32_t(csr) << 20) | (src << 15) | (f3 << 12) | (checkReg(rd) << 7) | 0x73;
    }

    std::string
    csrText(const char* name, unsigned rd, uint16_t csr, const std::string& src)
    {
      std::ostringstream os;
      os << name << " " << x(rd) << ", 0x" << std::hex << csr << ", " << src;
      return os.str();
    }

    unsigned
    checkUimm(unsigned uimm)
    {
      if (uimm > 31)
        throw ConfigError("CSR immediate out of range");
      return uimm;
    }
  }

  void ProgramBuilder::csrrw(unsigned rd, uint16_t c, unsigned rs1)   { emit32(csrWord(1, rd, c, checkReg(rs1)), csrText("csrrw", rd, c, x(rs1))); }
  void ProgramBuilder::csrrs(unsigned rd, uint16_t c, unsigned rs1)   { emit32(csrWord(2, rd, c, checkReg(rs1)), csrText("csrrs", rd, c, x(rs1))); }
  void ProgramBuilder::csrrc(unsigned rd, uint16_t c, unsigned rs1)   { emit32(csrWord(3, rd, c, checkReg(rs1)), csrText("csrrc", rd, c, x(rs1))); }
  void ProgramBuilder::csrrwi(unsigned rd, uint16_t c, unsigned uimm) { emit32(csrWord(5, rd, c, checkUimm(uimm)), csrText("csrrwi", rd, c, std::to_string(uimm))); }
  void ProgramBuilder::csrrsi(unsigned rd, uint16_t c, unsigned uimm) { emit32(csrWord(6, rd, c, checkUimm(uimm)), csrText("csrrsi", rd, c, std::to_string(uimm))); }
  void ProgramBuilder::csrrci(unsigned rd, uint16_t c, unsigned uimm) { emit32(csrWord(7, rd, c, checkUimm(uimm)), csrText("csrrci", rd, c, std::to_string(uimm))); }


  void
  ProgramBuilder::mmul(unsigned rd, unsigned rs1, unsigned rs2, unsigned rs3,
                       unsigned words)
  {
    MmulFields f{rd, rs1, rs2, rs3, words};
    emit32(encodeR4(f), "mmul " + x(rd) + ", " + x(rs1) + ", " + x(rs2) + ", "
           + x(rs3) + ", " + std::to_string(words) + "    # " + insnDirective(f));
  }


  void
  ProgramBuilder::li(unsigned rd, uint32_t value)
  {
    int32_t s = int32_t(value);
    if (s >= -2048 && s < 2048)
      {
        addi(rd, reg::zero, s);
        return;
      }
    uint32_t hi = (value + 0x800) >> 12;
    int32_t lo = int32_t(value - (hi << 12));
    lui(rd, hi & 0xfffff);
    if (lo != 0)
      addi(rd, rd, lo);
  }


  void
  ProgramBuilder::la(unsigned rd, Label target)
  {
    reference(FixupKind::AbsHiLo, target);
    emit32(typeU(0x37, rd, 0), "lui " + x(rd) + ", %hi(" + labelName(target) + ")");
    emit32(typeI(0x13, rd, 0, rd, 0),
           "addi " + x(rd) + ", " + x(rd) + ", %lo(" + labelName(target) + ")");
  }


  void
  ProgramBuilder::halt()
  {
    li(reg::t0, 0);
    ecall();
  }


  // Compressed forms.

  void ProgramBuilder::c_nop()
  {
    emit16(0x0001, "c.nop");
  }

  void ProgramBuilder::c_addi(unsigned rd, int32_t imm)
  {
    emit16(uint16_t(0x0001 | cImm6(imm) | (checkReg(rd) << 7)),
           "c.addi " + x(rd) + ", " + std::to_string(imm));
  }

  void ProgramBuilder::c_li(unsigned rd, int32_t imm)
  {
    emit16(uint16_t(0x4001 | cImm6(imm) | (checkReg(rd) << 7)),
           "c.li " + x(rd) + ", " + std::to_string(imm));
  }

  void ProgramBuilder::c_lui(unsigned rd, int32_t imm6)
  {
    if (rd == 0 || rd == 2 || imm6 == 0)
      throw ConfigError("c.lui needs rd not in {x0, x2} and non-zero immediate");
    emit16(uint16_t(0x6001 | cImm6(imm6) | (checkReg(rd) << 7)),
           "c.lui " + x(rd) + ", " + std::to_string(imm6));
  }

  void ProgramBuilder::c_addi16sp(int32_t imm)
  {
    if (imm == 0 || imm % 16)
      throw ConfigError("c.addi16sp immediate must be a non-zero multiple of 16");
    checkSigned(imm, 10, "c.addi16sp");
    uint32_t u = uint32_t(imm);
    emit16(uint16_t(0x6101 | (((u >> 9) & 1) << 12) | (((u >> 4) & 1) << 6)
                    | (((u >> 6) & 1) << 5) | (((u >> 7) & 3) << 3)
                    | (((u >> 5) & 1) << 2)),
           "c.addi16sp " + std::to_string(imm));
  }

  void ProgramBuilder::c_addi4spn(unsigned rdp, uint32_t imm)
  {
    if (imm == 0 || imm % 4 || imm > 1020)
      throw ConfigError("c.addi4spn immediate must be a non-zero multiple of 4 below 1024");
    emit16(uint16_t((((imm >> 4) & 3) << 11) | (((imm >> 6) & 0xf) << 7)
                    | (((imm >> 2) & 1) << 6) | (((imm >> 3) & 1) << 5)
                    | (checkCReg(rdp) << 2)),
           "c.addi4spn " + x(rdp) + ", " + std::to_string(imm));
  }

  void ProgramBuilder::c_srli(unsigned rdp, unsigned shamt)
  {
    if (shamt == 0 || shamt > 31)
      throw ConfigError("c.srli shift amount out of range");
    emit16(uint16_t(0x8001 | (checkCReg(rdp) << 7) | (shamt << 2)),
           "c.srli " + x(rdp) + ", " + std::to_string(shamt));
  }

  void ProgramBuilder::c_srai(unsigned rdp, unsigned shamt)
  {
    if (shamt == 0 || shamt > 31)
      throw ConfigError("c.srai shift amount out of range");
    emit16(uint16_t(0x8401 | (checkCReg(rdp) << 7) | (shamt << 2)),
           "c.srai " + x(rdp) + ", " + std::to_string(shamt));
  }

  void ProgramBuilder::c_andi(unsigned rdp, int32_t imm)
  {
    emit16(uint16_t(0x8801 | cImm6(imm) | (checkCReg(rdp) << 7)),
           "c.andi " + x(rdp) + ", " + std::to_string(imm));
  }

  namespace
  {
    uint16_t
    cArith(unsigned f2, unsigned rdp, unsigned rs2p)
    {
      return uint16_t(0x8c01 | (checkCReg(rdp) << 7) | (f2 << 5) | (checkCReg(rs2p) << 2));
    }
  }

  void ProgramBuilder::c_sub(unsigned rdp, unsigned rs2p) { emit16(cArith(0, rdp, rs2p), "c.sub " + x(rdp) + ", " + x(rs2p)); }
  void ProgramBuilder::c_xor(unsigned rdp, unsigned rs2p) { emit16(cArith(1, rdp, rs2p), "c.xor " + x(rdp) + ", " + x(rs2p)); }
  void ProgramBuilder::c_or(unsigned rdp, unsigned rs2p)  { emit16(cArith(2, rdp, rs2p), "c.or " + x(rdp) + ", " + x(rs2p)); }
  void ProgramBuilder::c_and(unsigned rdp, unsigned rs2p) { emit16(cArith(3, rdp, rs2p), "c.and " + x(rdp) + ", " + x(rs2p)); }

  void ProgramBuilder::c_slli(unsigned rd, unsigned shamt)
  {
    if (rd == 0 || shamt == 0 || shamt > 31)
      throw ConfigError("c.slli operands out of range");
    emit16(uint16_t(0x0002 | (checkReg(rd) << 7) | (shamt << 2)),
           "c.slli " + x(rd) + ", " + std::to_string(shamt));
  }

  void ProgramBuilder::c_mv(unsigned rd, unsigned rs2)
  {
    if (rs2 == 0)
      throw ConfigError("c.mv needs rs2 != x0");
    emit16(uint16_t(0x8002 | (checkReg(rd) << 7) | (checkReg(rs2) << 2)),
           "c.mv " + x(rd) + ", " + x(rs2));
  }

  void ProgramBuilder::c_add(unsigned rd, unsigned rs2)
  {
    if (rs2 == 0)
      throw ConfigError("c.add needs rs2 != x0");
    emit16(uint16_t(0x9002 | (checkReg(rd) << 7) | (checkReg(rs2) << 2)),
           "c.add " + x(rd) + ", " + x(rs2));
  }

  void ProgramBuilder::c_jr(unsigned rs1)
  {
    if (rs1 == 0)
      throw ConfigError("c.jr needs rs1 != x0");
    emit16(uint16_t(0x8002 | (checkReg(rs1) << 7)), "c.jr " + x(rs1));
  }

  void ProgramBuilder::c_jalr(unsigned rs1)
  {
    if (rs1 == 0)
      throw ConfigError("c.jalr needs rs1 != x0");
    emit16(uint16_t(0x9002 | (checkReg(rs1) << 7)), "c.jalr " + x(rs1));
  }

  void ProgramBuilder::c_ebreak()
  {
    emit16(0x9002, "c.ebreak");
  }

  namespace
  {
    uint16_t
    cLwImm(uint32_t off)
    {
      if (off % 4 || off > 124)
        throw ConfigError("c.lw/c.sw offset must be a multiple of 4 below 128");
      return uint16_t((((off >> 3) & 7) << 10) | (((off >> 2) & 1) << 6)
                      | (((off >> 6) & 1) << 5));
    }
  }

  void ProgramBuilder::c_lw(unsigned rdp, uint32_t off, unsigned rs1p)
  {
    emit16(uint16_t(0x4000 | cLwImm(off) | (checkCReg(rs1p) << 7) | (checkCReg(rdp) << 2)),
           memText("c.lw", rdp, int32_t(off), rs1p));
  }

  void ProgramBuilder::c_sw(unsigned rs2p, uint32_t off, unsigned rs1p)
  {
    emit16(uint16_t(0xc000 | cLwImm(off) | (checkCReg(rs1p) << 7) | (checkCReg(rs2p) << 2)),
           memText("c.sw", rs2p, int32_t(off), rs1p));
  }

  void ProgramBuilder::c_lwsp(unsigned rd, uint32_t off)
  {
    if (rd == 0 || off % 4 || off > 252)
      throw ConfigError("c.lwsp operands out of range");
    emit16(uint16_t(0x4002 | (((off >> 5) & 1) << 12) | (checkReg(rd) << 7)
                    | (((off >> 2) & 7) << 4) | (((off >> 6) & 3) << 2)),
           memText("c.lwsp", rd, int32_t(off), reg::sp));
  }

  void ProgramBuilder::c_swsp(unsigned rs2, uint32_t off)
  {
    if (off % 4 || off > 252)
      throw ConfigError("c.swsp offset out of range");
    emit16(uint16_t(0xc002 | (((off >> 2) & 0xf) << 9) | (((off >> 6) & 3) << 7)
                    | (checkReg(rs2) << 2)),
           memText("c.swsp", rs2, int32_t(off), reg::sp));
  }

  void
  ProgramBuilder::cjump(unsigned f3, const char* name, Label target)
  {
    reference(FixupKind::CJump, target);
    emit16(uint16_t((f3 << 13) | 1), std::string(name) + " " + labelName(target));
  }

  void
  ProgramBuilder::cbranch(unsigned f3, const char* name, unsigned rs1p,
                          Label target)
  {
    reference(FixupKind::CBranch, target);
    emit16(uint16_t((f3 << 13) | (checkCReg(rs1p) << 7) | 1),
           std::string(name) + " " + x(rs1p) + ", " + labelName(target));
  }

  void ProgramBuilder::c_j(Label t)                  { cjump(5, "c.j", t); }
  void ProgramBuilder::c_jal(Label t)                { cjump(1, "c.jal", t); }
  void ProgramBuilder::c_beqz(unsigned rs1p, Label t) { cbranch(6, "c.beqz", rs1p, t); }
  void ProgramBuilder::c_bnez(unsigned rs1p, Label t) { cbranch(7, "c.bnez", rs1p, t); }


  std::vector<uint8_t>
  ProgramBuilder::finish()
  {
    for (const Fixup& f : fixups_)
      {
        uint32_t target = address(f.label);
        uint32_t pc = origin_ + uint32_t(f.offset);
        int32_t off = int32_t(target - pc);
        switch (f.kind)
          {
          case FixupKind::Branch:
            {
              uint32_t word = read32(f.offset);
              unsigned f3 = (word >> 12) & 7;
              unsigned rs1 = (word >> 15) & 0x1f, rs2 = (word >> 20) & 0x1f;
              patch32(f.offset, typeB(f3, rs1, rs2, off));
              break;
            }
          case FixupKind::Jal:
            patch32(f.offset, typeJ((read32(f.offset) >> 7) & 0x1f, off));
            break;
          case FixupKind::CJump:
            patch16(f.offset, uint16_t((read16(f.offset) & 0xe003) | cJumpBits(off)));
            break;
          case FixupKind::CBranch:
            patch16(f.offset, uint16_t((read16(f.offset) & 0xe383) | cBranchBits(off)));
            break;
          case FixupKind::AbsHiLo:
            {
              uint32_t hi = (target + 0x800) >> 12;
              int32_t lo = int32_t(target - (hi << 12));
              unsigned rd = (read32(f.offset) >> 7) & 0x1f;
              patch32(f.offset, typeU(0x37, rd, hi & 0xfffff));
              patch32(f.offset + 4, typeI(0x13, rd, 0, rd, lo));
              break;
            }
          }
      }
    return bytes_;
  }


  std::string
  ProgramBuilder::listing() const
  {
    std::ostringstream os;
    for (const Line& line : listing_)
      {
        if (line.label)
          {
            os << line.text << "\n";
            continue;
          }
        size_t offset = line.addr - origin_;
        uint32_t bits = line.compressed ? read16(offset) : read32(offset);
        os << "  " << std::hex << std::setw(8) << std::setfill('0') << line.addr
           << ":  " << std::setw(line.compressed ? 4 : 8) << bits
           << (line.compressed ? "      " : "  ") << std::dec << line.text << "\n";
      }
    return os.str();
  }

}
