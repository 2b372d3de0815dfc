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

#include <cstdint>
#include <string>

namespace mmulrv
{

  enum class Op : uint8_t
  {
    Lui, Auipc, Jal, Jalr,
    Beq, Bne, Blt, Bge, Bltu, Bgeu,
    Lb, Lh, Lw, Lbu, Lhu,
    Sb, Sh, Sw,
    Addi, Slti, Sltiu, Xori, Ori, Andi, Slli, Srli, Srai,
    Add, Sub, Sll, Slt, Sltu, Xor, Srl, Sra, Or, And,
    Fence, Ecall, Ebreak, Mret, Wfi,
    Csrrw, Csrrs, Csrrc, Csrrwi, Csrrsi, Csrrci,
    Mmul
  };

  const char* mnemonic(Op op);


  /// Normalized instruction. Compressed forms are expanded to their
  /// 32-bit equivalents with compressed set.
  struct DecodedInstruction
  {
    Op op = Op::Addi;
    uint8_t rd = 0;
    uint8_t rs1 = 0;
    uint8_t rs2 = 0;
    uint8_t rs3 = 0;
    int32_t imm = 0;       // Sign-extended immediate; zimm for CSR*I forms.
    uint16_t csr = 0;      // CSR ops only.
    uint8_t lenField = 0;  // MMUL only: words - 1.
    bool compressed = false;

    unsigned size() const
    { return compressed ? 2 : 4; }

    friend bool operator==(const DecodedInstruction&, const DecodedInstruction&) = default;
  };


  /// True when the low 16 bits select a 32-bit instruction.
  constexpr bool
  isFullLength(uint32_t bits)
  {
    return (bits & 3) == 3;
  }

  /// Decode one fetch unit. A compressed instruction occupies the low
  /// halfword and the upper half is ignored. Throws IllegalInstruction.
  DecodedInstruction decode(uint32_t bits);

  /// Expand a 16-bit RVC instruction valid under RV32EC. Throws
  /// IllegalInstruction for reserved, RV64-only, floating-point or
  /// out-of-range-register encodings.
  DecodedInstruction expandCompressed(uint16_t half);

  /// Assembler-syntax rendering, e.g. "addi x1, x0, 5".
  std::string disassemble(const DecodedInstruction& inst);

}
