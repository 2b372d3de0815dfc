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

#include "mmulrv/bigint.hpp"
#include "mmulrv/error.hpp"
#include "mmulrv/memory.hpp"

#include <cstdint>
#include <vector>

namespace mmulrv
{

  /// Addresses and length of one Montgomery multiplication P = A*B*2^-n
  /// mod N, as read from the register file by the MMUL instruction.
  struct MmulOperands
  {
    uint32_t addrA = 0;
    uint32_t addrB = 0;
    uint32_t addrN = 0;
    uint32_t addrP = 0;
    unsigned words = 1;

    unsigned nBits() const
    { return 32 * words; }

    friend bool operator==(const MmulOperands&, const MmulOperands&) = default;
  };


  /// Operand or sequencing error detected by the engine. The engine is
  /// back in Idle when this is thrown.
  class MmulFault : public SimError
  {
  public:
    enum Kind { EvenModulus, OperandTooLarge, LengthExceedsHardwareMax,
                SequenceBroken };

    MmulFault(Kind kind, const std::string& what)
      : SimError(what), kind_(kind)
    { }

    Kind kind() const
    { return kind_; }

  private:
    Kind kind_;
  };


  enum class MmulPhase { Idle, Loading, Iterating, FinalSubtract, Storing };

  /// Which slice of a multiplication one MMUL instruction performed.
  enum class MmulCallKind { Atomic, First, Middle, Last };


  /// Cost of one MMUL instruction inside the engine.
  struct MmulCallReport
  {
    MmulCallKind kind = MmulCallKind::Atomic;
    bool completed = false;      // Result written back to memory.
    uint64_t computeCycles = 0;  // 2 per processed bit, 1 for the final subtraction.
    uint64_t memoryCycles = 0;   // Sum of LSU latencies.
    unsigned loads = 0;
    unsigned stores = 0;

    uint64_t cycles() const
    { return computeCycles + memoryCycles; }
  };


  /// base + 4*wordOffset with 32-bit wrap-around.
  constexpr uint32_t
  addressGenerate(uint32_t base, uint32_t wordOffset)
  {
    return base + 4 * wordOffset;
  }


  /// Bit-serial radix-2 Montgomery recurrence over BigUint:
  ///   S = 0; for i in 0..nBits-1: S += a_i*B; if S odd, S += N; S >>= 1
  ///   if S >= N: S -= N
  /// The engine must agree with this bit for bit. Throws MmulFault for an
  /// even modulus or when a, b or n do not fit in nBits.
  BigUint r2mmReference(const BigUint& a, const BigUint& b,
                        const BigUint& modulus, unsigned nBits);


  /// Radix-2 Montgomery multiplication functional unit. Operands are
  /// fetched through the LSU into internal buffers, the recurrence runs
  /// at two cycles per bit plus one cycle of final subtraction, and the
  /// result is written back. In partial mode each call processes one bit
  /// and the state persists between calls.
  class MmulEngine
  {
  public:
    static constexpr unsigned kDefaultMaxWords = 8;
    static constexpr unsigned kEncodableWords = 32;

    explicit MmulEngine(unsigned maxWords = kDefaultMaxWords);

    unsigned maxWords() const
    { return maxWords_; }

    /// Whole multiplication in one call. Engine must be Idle.
    MmulCallReport executeAtomic(Memory& memory, const MmulOperands& ops);

    /// One bit of a partial-mode multiplication. When Idle the operands
    /// are latched and loaded; otherwise ops is ignored and the latched
    /// operation continues.
    MmulCallReport executePartialCall(Memory& memory, const MmulOperands& ops);

    /// Dispatch for an issued MMUL instruction: continues an in-flight
    /// partial sequence, or starts a new one in the requested mode.
    MmulCallReport execute(Memory& memory, const MmulOperands& ops,
                           bool partialRequested);

    /// Drop any in-flight sequence and return to Idle.
    void abort();

    MmulPhase phase() const
    { return phase_; }

    bool busy() const
    { return phase_ != MmulPhase::Idle; }

    /// Number of bits processed so far in the current multiplication.
    unsigned bitIndex() const
    { return bitIndex_; }

    bool partialMode() const
    { return partialMode_; }

    const MmulOperands& latched() const
    { return latched_; }

    /// MMUL_STATUS image: busy in bit 0, bitIndex in bits 8..23.
    uint32_t statusWord() const;

    /// Current accumulator S; meaningful while busy.
    BigUint accumulator() const;

  private:
    void latch(Memory& memory, const MmulOperands& ops, MmulCallReport& report);
    void processBit(MmulCallReport& report);
    void finalSubtract(MmulCallReport& report);
    void writeBack(Memory& memory, MmulCallReport& report);

    unsigned maxWords_;
    MmulPhase phase_ = MmulPhase::Idle;
    bool partialMode_ = false;
    unsigned bitIndex_ = 0;
    MmulOperands latched_;
    std::vector<uint32_t> bufA_, bufB_, bufN_;
    std::vector<uint32_t> accum_;  // words+1 limbs.
  };

}
