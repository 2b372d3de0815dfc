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

#include "mmulrv/isa.hpp"
#include "mmulrv/error.hpp"
#include "mmulrv/mmul_encoding.hpp"

#include <sstream>

namespace mmulrv
{

  namespace
  {
    constexpr uint32_t
    bits(uint32_t word, unsigned hi, unsigned lo)
    {
      return (word >> lo) & ((1u << (hi - lo + 1)) - 1);
    }

    constexpr int32_t
    signExtend(uint32_t value, unsigned width)
    {
      uint32_t m = 1u << (width - 1);
      return int32_t((value ^ m) - m);
    }

    [[noreturn]] void
    illegal(uint32_t word, const char* why)
    {
      throw IllegalInstruction(word, why);
    }

    uint8_t
    reg(uint32_t word, unsigned field)
    {
      if (field >= 16)
        illegal(word, "register index beyond x15 under RV32E");
      return uint8_t(field);
    }

    // Registers x8..x15 named by a 3-bit compressed field.
    constexpr uint8_t
    creg(uint32_t field)
    {
      return uint8_t(8 + field);
    }

    DecodedInstruction
    make(Op op, unsigned rd, unsigned rs1, unsigned rs2, int32_t imm)
    {
      DecodedInstruction d;
      d.op = op;
      d.rd = uint8_t(rd);
      d.rs1 = uint8_t(rs1);
      d.rs2 = uint8_t(rs2);
      d.imm = imm;
      return d;
    }
  }


  const char*
  mnemonic(Op op)
  {
    static const char* names[] = {
      "lui", "auipc", "jal", "jalr",
      "beq", "bne", "blt", "bge", "bltu", "bgeu",
      "lb", "lh", "lw", "lbu", "lhu",
      "sb", "sh", "sw",
      "addi", "slti", "sltiu", "xori", "ori", "andi", "slli", "srli", "srai",
      "add", "sub", "sll", "slt", "sltu", "xor", "srl", "sra", "or", "and",
      "fence", "ecall", "ebreak", "mret", "wfi",
      "csrrw", "csrrs", "csrrc", "csrrwi", "csrrsi", "csrrci",
      "mmul"
    };
    return names[unsigned(op)];
  }


  DecodedInstruction
  decode(uint32_t word)
  {
    if (!isFullLength(word))
      return expandCompressed(uint16_t(word));

    const uint32_t opcode = bits(word, 6, 0);
    const uint32_t rdF = bits(word, 11, 7);
    const uint32_t f3 = bits(word, 14, 12);
    const uint32_t rs1F = bits(word, 19, 15);
    const uint32_t rs2F = bits(word, 24, 20);
    const uint32_t f7 = bits(word, 31, 25);

    const int32_t immI = signExtend(bits(word, 31, 20), 12);
    const int32_t immS = signExtend((f7 << 5) | rdF, 12);
    const int32_t immB = signExtend((bits(word, 31, 31) << 12)
                                    | (bits(word, 7, 7) << 11)
                                    | (bits(word, 30, 25) << 5)
                                    | (bits(word, 11, 8) << 1), 13);
    const int32_t immU = int32_t(word & 0xfffff000);
    const int32_t immJ = signExtend((bits(word, 31, 31) << 20)
                                    | (bits(word, 19, 12) << 12)
                                    | (bits(word, 20, 20) << 11)
                                    | (bits(word, 30, 21) << 1), 21);

    switch (opcode)
      {
      case 0x37:
        return make(Op::Lui, reg(word, rdF), 0, 0, immU);

      case 0x17:
        return make(Op::Auipc, reg(word, rdF), 0, 0, immU);

      case 0x6f:
        return make(Op::Jal, reg(word, rdF), 0, 0, immJ);

      case 0x67:
        if (f3 != 0)
          illegal(word, "jalr funct3");
        return make(Op::Jalr, reg(word, rdF), reg(word, rs1F), 0, immI);

      case 0x63:
        {
          static const Op ops[8] = {Op::Beq, Op::Bne, Op::Beq, Op::Beq,
                                    Op::Blt, Op::Bge, Op::Bltu, Op::Bgeu};
          if (f3 == 2 || f3 == 3)
            illegal(word, "branch funct3");
          return make(ops[f3], 0, reg(word, rs1F), reg(word, rs2F), immB);
        }

      case 0x03:
        {
          static const Op ops[8] = {Op::Lb, Op::Lh, Op::Lw, Op::Lb,
                                    Op::Lbu, Op::Lhu, Op::Lb, Op::Lb};
          if (f3 == 3 || f3 > 5)
            illegal(word, "load funct3");
          return make(ops[f3], reg(word, rdF), reg(word, rs1F), 0, immI);
        }

      case 0x23:
        {
          static const Op ops[3] = {Op::Sb, Op::Sh, Op::Sw};
          if (f3 > 2)
            illegal(word, "store funct3");
          return make(ops[f3], 0, reg(word, rs1F), reg(word, rs2F), immS);
        }

      case 0x13:
        {
          unsigned rd = reg(word, rdF), rs1 = reg(word, rs1F);
          switch (f3)
            {
            case 0: return make(Op::Addi, rd, rs1, 0, immI);
            case 2: return make(Op::Slti, rd, rs1, 0, immI);
            case 3: return make(Op::Sltiu, rd, rs1, 0, immI);
            case 4: return make(Op::Xori, rd, rs1, 0, immI);
            case 6: return make(Op::Ori, rd, rs1, 0, immI);
            case 7: return make(Op::Andi, rd, rs1, 0, immI);
            case 1:
              if (f7 != 0)
                illegal(word, "slli funct7");
              return make(Op::Slli, rd, rs1, 0, int32_t(rs2F));
            default:
              if (f7 == 0)
                return make(Op::Srli, rd, rs1, 0, int32_t(rs2F));
              if (f7 == 0x20)
                return make(Op::Srai, rd, rs1, 0, int32_t(rs2F));
              illegal(word, "shift funct7");
            }
        }

      case 0x33:
        {
          unsigned rd = reg(word, rdF), rs1 = reg(word, rs1F), rs2 = reg(word, rs2F);
          if (f7 == 0)
            {
              static const Op ops[8] = {Op::Add, Op::Sll, Op::Slt, Op::Sltu,
                                        Op::Xor, Op::Srl, Op::Or, Op::And};
              return make(ops[f3], rd, rs1, rs2, 0);
            }
          if (f7 == 0x20 && f3 == 0)
            return make(Op::Sub, rd, rs1, rs2, 0);
          if (f7 == 0x20 && f3 == 5)
            return make(Op::Sra, rd, rs1, rs2, 0);
          illegal(word, "OP funct7 (no M extension)");
        }

      case 0x0f:
        if (f3 != 0)
          illegal(word, "misc-mem funct3");
        return make(Op::Fence, 0, 0, 0, 0);

      case 0x73:
        {
          if (f3 == 0)
            {
              switch (word)
                {
                case 0x00000073: return make(Op::Ecall, 0, 0, 0, 0);
                case 0x00100073: return make(Op::Ebreak, 0, 0, 0, 0);
                case 0x30200073: return make(Op::Mret, 0, 0, 0, 0);
                case 0x10500073: return make(Op::Wfi, 0, 0, 0, 0);
                default: illegal(word, "system encoding");
                }
            }
          if (f3 == 4)
            illegal(word, "system funct3");
          static const Op ops[8] = {Op::Csrrw, Op::Csrrw, Op::Csrrs, Op::Csrrc,
                                    Op::Csrrw, Op::Csrrwi, Op::Csrrsi, Op::Csrrci};
          DecodedInstruction d;
          d.op = ops[f3];
          d.rd = reg(word, rdF);
          if (f3 < 4)
            d.rs1 = reg(word, rs1F);
          else
            d.imm = int32_t(rs1F);
          d.csr = uint16_t(bits(word, 31, 20));
          return d;
        }

      case kMmulOpcode:
        {
          DecodedInstruction d;
          d.op = Op::Mmul;
          d.rd = reg(word, rdF);
          d.rs1 = reg(word, rs1F);
          d.rs2 = reg(word, rs2F);
          d.rs3 = reg(word, bits(word, 31, 27));
          d.lenField = uint8_t((bits(word, 26, 25) << 3) | f3);
          return d;
        }

      default:
        illegal(word, "unknown opcode");
      }
  }


  DecodedInstruction
  expandCompressed(uint16_t half)
  {
    const uint32_t w = half;
    const uint32_t quadrant = bits(w, 1, 0);
    const uint32_t f3 = bits(w, 15, 13);
    const uint32_t rdFull = bits(w, 11, 7);
    const uint32_t rs2Full = bits(w, 6, 2);
    const uint8_t rdP = creg(bits(w, 4, 2));   // rd' / rs2'
    const uint8_t rs1P = creg(bits(w, 9, 7));  // rs1' / rd'

    const int32_t imm6 = signExtend((bits(w, 12, 12) << 5) | bits(w, 6, 2), 6);
    const int32_t jOffset = signExtend((bits(w, 12, 12) << 11)
                                       | (bits(w, 11, 11) << 4)
                                       | (bits(w, 10, 9) << 8)
                                       | (bits(w, 8, 8) << 10)
                                       | (bits(w, 7, 7) << 6)
                                       | (bits(w, 6, 6) << 7)
                                       | (bits(w, 5, 3) << 1)
                                       | (bits(w, 2, 2) << 5), 12);
    const int32_t bOffset = signExtend((bits(w, 12, 12) << 8)
                                       | (bits(w, 6, 5) << 6)
                                       | (bits(w, 2, 2) << 5)
                                       | (bits(w, 11, 10) << 3)
                                       | (bits(w, 4, 3) << 1), 9);
    const int32_t lwImm = int32_t((bits(w, 12, 10) << 3) | (bits(w, 6, 6) << 2)
                                  | (bits(w, 5, 5) << 6));

    DecodedInstruction d;
    switch (quadrant)
      {
      case 0:
        switch (f3)
          {
          case 0:
            {
              int32_t nzuimm = int32_t((bits(w, 10, 7) << 6) | (bits(w, 12, 11) << 4)
                                       | (bits(w, 5, 5) << 3) | (bits(w, 6, 6) << 2));
              if (nzuimm == 0)
                illegal(w, "c.addi4spn with zero immediate");
              d = make(Op::Addi, rdP, 2, 0, nzuimm);
              break;
            }
          case 2:
            d = make(Op::Lw, rdP, rs1P, 0, lwImm);
            break;
          case 6:
            d = make(Op::Sw, 0, rs1P, rdP, lwImm);
            break;
          default:
            illegal(w, "reserved or floating-point compressed encoding");
          }
        break;

      case 1:
        switch (f3)
          {
          case 0:
            d = make(Op::Addi, reg(w, rdFull), reg(w, rdFull), 0, imm6);
            break;
          case 1:
            d = make(Op::Jal, 1, 0, 0, jOffset);
            break;
          case 2:
            d = make(Op::Addi, reg(w, rdFull), 0, 0, imm6);
            break;
          case 3:
            if (rdFull == 2)
              {
                int32_t nzimm = signExtend((bits(w, 12, 12) << 9)
                                           | (bits(w, 4, 3) << 7)
                                           | (bits(w, 5, 5) << 6)
                                           | (bits(w, 2, 2) << 5)
                                           | (bits(w, 6, 6) << 4), 10);
                if (nzimm == 0)
                  illegal(w, "c.addi16sp with zero immediate");
                d = make(Op::Addi, 2, 2, 0, nzimm);
              }
            else
              {
                if (imm6 == 0)
                  illegal(w, "c.lui with zero immediate");
                d = make(Op::Lui, reg(w, rdFull), 0, 0, int32_t(uint32_t(imm6) << 12));
              }
            break;
          case 4:
            {
              uint32_t f2 = bits(w, 11, 10);
              if (f2 == 0 || f2 == 1)
                {
                  if (bits(w, 12, 12))
                    illegal(w, "RV32 shift amount with bit 5 set");
                  d = make(f2 == 0 ? Op::Srli : Op::Srai, rs1P, rs1P, 0,
                           int32_t(bits(w, 6, 2)));
                }
              else if (f2 == 2)
                d = make(Op::Andi, rs1P, rs1P, 0, imm6);
              else
                {
                  if (bits(w, 12, 12))
                    illegal(w, "RV64-only compressed arithmetic");
                  static const Op ops[4] = {Op::Sub, Op::Xor, Op::Or, Op::And};
                  d = make(ops[bits(w, 6, 5)], rs1P, rs1P, rdP, 0);
                }
              break;
            }
          case 5:
            d = make(Op::Jal, 0, 0, 0, jOffset);
            break;
          case 6:
            d = make(Op::Beq, 0, rs1P, 0, bOffset);
            break;
          case 7:
            d = make(Op::Bne, 0, rs1P, 0, bOffset);
            break;
          }
        break;

      case 2:
        switch (f3)
          {
          case 0:
            if (bits(w, 12, 12))
              illegal(w, "RV32 shift amount with bit 5 set");
            d = make(Op::Slli, reg(w, rdFull), reg(w, rdFull), 0, int32_t(rs2Full));
            break;
          case 2:
            if (rdFull == 0)
              illegal(w, "c.lwsp with rd=x0");
            d = make(Op::Lw, reg(w, rdFull), 2, 0,
                     int32_t((bits(w, 12, 12) << 5) | (bits(w, 6, 4) << 2)
                             | (bits(w, 3, 2) << 6)));
            break;
          case 4:
            if (!bits(w, 12, 12))
              {
                if (rs2Full == 0)
                  {
                    if (rdFull == 0)
                      illegal(w, "c.jr with rs1=x0");
                    d = make(Op::Jalr, 0, reg(w, rdFull), 0, 0);
                  }
                else
                  d = make(Op::Add, reg(w, rdFull), 0, reg(w, rs2Full), 0);
              }
            else
              {
                if (rs2Full == 0 && rdFull == 0)
                  d = make(Op::Ebreak, 0, 0, 0, 0);
                else if (rs2Full == 0)
                  d = make(Op::Jalr, 1, reg(w, rdFull), 0, 0);
                else
                  d = make(Op::Add, reg(w, rdFull), reg(w, rdFull), reg(w, rs2Full), 0);
              }
            break;
          case 6:
            d = make(Op::Sw, 0, 2, reg(w, rs2Full),
                     int32_t((bits(w, 12, 9) << 2) | (bits(w, 8, 7) << 6)));
            break;
          default:
            illegal(w, "floating-point compressed encoding");
          }
        break;

      default:
        illegal(w, "not a compressed encoding");
      }

    d.compressed = true;
    return d;
  }


  std::string
  disassemble(const DecodedInstruction& d)
  {
    std::ostringstream os;
    auto x = [](unsigned r) { return "x" + std::to_string(r); };
    os << mnemonic(d.op);
    switch (d.op)
      {
      case Op::Lui: case Op::Auipc:
        os << " " << x(d.rd) << ", 0x" << std::hex << (uint32_t(d.imm) >> 12);
        break;
      case Op::Jal:
        os << " " << x(d.rd) << ", " << d.imm;
        break;
      case Op::Jalr:
      case Op::Lb: case Op::Lh: case Op::Lw: case Op::Lbu: case Op::Lhu:
        os << " " << x(d.rd) << ", " << d.imm << "(" << x(d.rs1) << ")";
        break;
      case Op::Sb: case Op::Sh: case Op::Sw:
        os << " " << x(d.rs2) << ", " << d.imm << "(" << x(d.rs1) << ")";
        break;
      case Op::Beq: case Op::Bne: case Op::Blt: case Op::Bge:
      case Op::Bltu: case Op::Bgeu:
        os << " " << x(d.rs1) << ", " << x(d.rs2) << ", " << d.imm;
        break;
      case Op::Addi: case Op::Slti: case Op::Sltiu: case Op::Xori:
      case Op::Ori: case Op::Andi: case Op::Slli: case Op::Srli: case Op::Srai:
        os << " " << x(d.rd) << ", " << x(d.rs1) << ", " << d.imm;
        break;
      case Op::Add: case Op::Sub: case Op::Sll: case Op::Slt: case Op::Sltu:
      case Op::Xor: case Op::Srl: case Op::Sra: case Op::Or: case Op::And:
        os << " " << x(d.rd) << ", " << x(d.rs1) << ", " << x(d.rs2);
        break;
      case Op::Csrrw: case Op::Csrrs: case Op::Csrrc:
        os << " " << x(d.rd) << ", 0x" << std::hex << d.csr << std::dec
           << ", " << x(d.rs1);
        break;
      case Op::Csrrwi: case Op::Csrrsi: case Op::Csrrci:
        os << " " << x(d.rd) << ", 0x" << std::hex << d.csr << std::dec
           << ", " << d.imm;
        break;
      case Op::Mmul:
        os << " " << x(d.rd) << ", " << x(d.rs1) << ", " << x(d.rs2) << ", "
           << x(d.rs3) << ", " << (d.lenField + 1) << "w";
        break;
      default:
        break;
      }
    if (d.compressed)
      os << "  # c";
    return os.str();
  }

}
