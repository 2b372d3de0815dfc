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

#include "mmulrv/mmul_encoding.hpp"
#include "mmulrv/error.hpp"

#include <sstream>

namespace mmulrv
{

  const char*
  formatName(MmulFormat format)
  {
    switch (format)
      {
      case MmulFormat::IType:  return "I-type";
      case MmulFormat::RType:  return "R-type";
      case MmulFormat::R4Type: return "R4-type";
      }
    return "?";
  }


  uint32_t
  encodeR4(const MmulFields& f)
  {
    for (unsigned reg : {f.rd, f.rs1, f.rs2, f.rs3})
      if (reg >= 16)
        throw EncodingError(EncodingError::RegisterOutOfRange,
                            "register x" + std::to_string(reg)
                            + " is not available under RV32E");
    if (f.words < 1 || f.words > 32)
      throw EncodingError(EncodingError::WordsOutOfRange,
                          "MMUL length must be 1..32 words, got "
                          + std::to_string(f.words));

    uint32_t len = f.words - 1;
    return (uint32_t(f.rs3) << 27) | ((len >> 3) << 25)
      | (uint32_t(f.rs2) << 20) | (uint32_t(f.rs1) << 15)
      | ((len & 7) << 12) | (uint32_t(f.rd) << 7) | kMmulOpcode;
  }


  uint32_t
  encodeR4(unsigned rd, unsigned rs1, unsigned rs2, unsigned rs3,
           unsigned words)
  {
    return encodeR4(MmulFields{rd, rs1, rs2, rs3, words});
  }


  MmulFields
  decodeR4(uint32_t word)
  {
    if ((word & 0x7f) != kMmulOpcode)
      throw EncodingError(EncodingError::NotMmul, "opcode is not custom-0");

    MmulFields f;
    f.rd = (word >> 7) & 0x1f;
    f.rs1 = (word >> 15) & 0x1f;
    f.rs2 = (word >> 20) & 0x1f;
    f.rs3 = (word >> 27) & 0x1f;
    f.words = ((((word >> 25) & 3) << 3) | ((word >> 12) & 7)) + 1;
    for (unsigned reg : {f.rd, f.rs1, f.rs2, f.rs3})
      if (reg >= 16)
        throw EncodingError(EncodingError::RegisterOutOfRange,
                            "register field x" + std::to_string(reg)
                            + " out of RV32E range");
    return f;
  }


  std::string
  insnDirective(const MmulFields& f)
  {
    unsigned len = f.words - 1;
    std::ostringstream os;
    os << ".insn r4 0x0b, " << (len & 7) << ", " << (len >> 3)
       << ", x" << f.rd << ", x" << f.rs1 << ", x" << f.rs2 << ", x" << f.rs3;
    return os.str();
  }


  FormatCapacity
  capacity(MmulFormat format, unsigned xlen)
  {
    if (xlen != 32 && xlen != 64)
      throw ConfigError("xlen must be 32 or 64");

    switch (format)
      {
      case MmulFormat::IType:
        // fnc3 + imm[11:0], length in bits.
        return {format, 15, LengthUnit::Bits, uint64_t(1) << 15};
      case MmulFormat::RType:
        // fnc3 + fnc7, length in bits.
        return {format, 10, LengthUnit::Bits, uint64_t(1) << 10};
      case MmulFormat::R4Type:
        // fnc3 + fnc2, length in xlen-bit words.
        return {format, 5, LengthUnit::Words, (uint64_t(1) << 5) * xlen};
      }
    throw ConfigError("unknown format");
  }


  OperandAddresses
  layoutAddresses(MmulFormat format, std::span<const uint32_t> baseRegs,
                  unsigned words)
  {
    const uint32_t stride = 4 * words;
    auto need = [&](size_t count) {
      if (baseRegs.size() != count)
        throw ConfigError(std::string(formatName(format)) + " layout needs "
                          + std::to_string(count) + " base addresses");
    };

    switch (format)
      {
      case MmulFormat::IType:
        need(1);
        return {baseRegs[0], baseRegs[0] + stride, baseRegs[0] + 2 * stride,
                baseRegs[0] + 3 * stride};
      case MmulFormat::RType:
        need(2);
        return {baseRegs[0], baseRegs[0] + stride, baseRegs[1],
                baseRegs[0] + 2 * stride};
      case MmulFormat::R4Type:
        // rs1, rs2, rs3, rd.
        need(4);
        return {baseRegs[0], baseRegs[1], baseRegs[2], baseRegs[3]};
      }
    throw ConfigError("unknown format");
  }

}
