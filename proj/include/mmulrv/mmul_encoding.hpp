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

#include "mmulrv/error.hpp"

#include <cstdint>
#include <span>
#include <string>

namespace mmulrv
{

  /// Candidate instruction formats for a memory-operand Montgomery
  /// multiply. Only R4Type is executable; the others exist for capacity
  /// analysis and layout documentation.
  enum class MmulFormat { IType, RType, R4Type };

  const char* formatName(MmulFormat format);

  /// custom-0 major opcode.
  constexpr uint32_t kMmulOpcode = 0b0001011;

  /// Register fields of an R4-type MMUL. rd carries the address of the
  /// result and is read as a source; MMUL never writes a register.
  struct MmulFields
  {
    unsigned rd = 0;   // P (result) address register.
    unsigned rs1 = 0;  // A (multiplicand) address register.
    unsigned rs2 = 0;  // B (multiplier) address register.
    unsigned rs3 = 0;  // N (modulus) address register.
    unsigned words = 1;

    friend bool operator==(const MmulFields&, const MmulFields&) = default;
  };


  class EncodingError : public SimError
  {
  public:
    enum Kind { RegisterOutOfRange, WordsOutOfRange, NotMmul };

    EncodingError(Kind kind, const std::string& what)
      : SimError(what), kind_(kind)
    { }

    Kind kind() const
    { return kind_; }

  private:
    Kind kind_;
  };


  /// Pack rs3[31:27] fnc2[26:25] rs2[24:20] rs1[19:15] fnc3[14:12]
  /// rd[11:7] opcode[6:0], with len = words-1 split as fnc2 = len[4:3],
  /// fnc3 = len[2:0].
  uint32_t encodeR4(const MmulFields& fields);

  uint32_t encodeR4(unsigned rd, unsigned rs1, unsigned rs2, unsigned rs3,
                    unsigned words);

  /// Inverse of encodeR4.
  MmulFields decodeR4(uint32_t word);

  /// Assembler directive that produces the same word, e.g.
  /// ".insn r4 0x0b, 3, 0, x10, x11, x12, x13".
  std::string insnDirective(const MmulFields& fields);


  enum class LengthUnit { Bits, Words };

  struct FormatCapacity
  {
    MmulFormat format;
    unsigned lengthBitsAvailable;
    LengthUnit unit;
    uint64_t maxOperandBits;
  };

  /// Operand-length capacity of a format on an xlen-bit base ISA.
  FormatCapacity capacity(MmulFormat format, unsigned xlen);


  struct OperandAddresses
  {
    uint32_t a = 0;
    uint32_t b = 0;
    uint32_t n = 0;
    uint32_t p = 0;

    friend bool operator==(const OperandAddresses&, const OperandAddresses&) = default;
  };

  /// Operand addresses implied by each format's memory layout.
  ///   IType : one base; A, B, N, P are consecutive blocks of words words.
  ///   RType : A, B, P consecutive from the first base; N at the second.
  ///   R4Type: four independent addresses (rs1, rs2, rs3, rd).
  OperandAddresses layoutAddresses(MmulFormat format,
                                   std::span<const uint32_t> baseRegs,
                                   unsigned words);

}
