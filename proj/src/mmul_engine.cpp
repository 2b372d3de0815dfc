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

#include "mmulrv/mmul_engine.hpp"

#include <string>

namespace mmulrv
{

  BigUint
  r2mmReference(const BigUint& a, const BigUint& b, const BigUint& modulus,
                unsigned nBits)
  {
    if (!modulus.isOdd())
      throw MmulFault(MmulFault::EvenModulus, "r2mm: modulus must be odd");
    if (a.bitLength() > nBits || b.bitLength() > nBits
        || modulus.bitLength() > nBits)
      throw MmulFault(MmulFault::OperandTooLarge,
                      "r2mm: operand exceeds " + std::to_string(nBits) + " bits");

    BigUint s;
    for (unsigned i = 0; i < nBits; ++i)
      {
        if (a.bit(i))
          s += b;
        if (s.isOdd())
          s += modulus;
        s >>= 1;
      }
    if (s >= modulus)
      s -= modulus;
    return s;
  }


  MmulEngine::MmulEngine(unsigned maxWords)
    : maxWords_(maxWords)
  {
    if (maxWords == 0 || maxWords > kEncodableWords)
      throw ConfigError("MMUL max words must be in 1.."
                        + std::to_string(kEncodableWords));
  }


  void
  MmulEngine::abort()
  {
    phase_ = MmulPhase::Idle;
    bitIndex_ = 0;
    partialMode_ = false;
  }


  uint32_t
  MmulEngine::statusWord() const
  {
    return (busy() ? 1u : 0u) | ((bitIndex_ & 0xffff) << 8);
  }


  BigUint
  MmulEngine::accumulator() const
  {
    return BigUint::fromWords(accum_);
  }


  void
  MmulEngine::latch(Memory& memory, const MmulOperands& ops,
                    MmulCallReport& report)
  {
    if (ops.words == 0 || ops.words > maxWords_)
      throw MmulFault(MmulFault::LengthExceedsHardwareMax,
                      "MMUL length of " + std::to_string(ops.words)
                      + " words exceeds hardware maximum of "
                      + std::to_string(maxWords_));

    uint32_t bytes = 4 * ops.words;
    memory.checkAccess(ops.addrA, bytes, 4, false);
    memory.checkAccess(ops.addrB, bytes, 4, false);
    memory.checkAccess(ops.addrN, bytes, 4, false);
    memory.checkAccess(ops.addrP, bytes, 4, true);

    phase_ = MmulPhase::Loading;
    latched_ = ops;
    bufA_.assign(ops.words, 0);
    bufB_.assign(ops.words, 0);
    bufN_.assign(ops.words, 0);
    accum_.assign(ops.words + 1, 0);
    bitIndex_ = 0;

    auto fill = [&](std::vector<uint32_t>& buf, uint32_t base) {
      for (unsigned k = 0; k < ops.words; ++k)
        {
          LoadResult r = memory.loadWord(addressGenerate(base, k));
          buf[k] = r.value;
          report.memoryCycles += r.latency;
          ++report.loads;
        }
    };
    fill(bufA_, ops.addrA);
    fill(bufB_, ops.addrB);
    fill(bufN_, ops.addrN);

    if ((bufN_[0] & 1) == 0)
      {
        abort();
        throw MmulFault(MmulFault::EvenModulus, "MMUL modulus is even");
      }
    phase_ = MmulPhase::Iterating;
  }


  void
  MmulEngine::processBit(MmulCallReport& report)
  {
    const unsigned words = latched_.words;
    const bool aBit = (bufA_[bitIndex_ / 32] >> (bitIndex_ % 32)) & 1;

    // Cycle 1: S += a_i * B.
    if (aBit)
      {
        uint64_t carry = 0;
        for (unsigned k = 0; k < words; ++k)
          {
            uint64_t t = uint64_t(accum_[k]) + bufB_[k] + carry;
            accum_[k] = uint32_t(t);
            carry = t >> 32;
          }
        accum_[words] += uint32_t(carry);
      }

    // Cycle 2: S = (S + q*N) / 2 with q = S mod 2.
    if (accum_[0] & 1)
      {
        uint64_t carry = 0;
        for (unsigned k = 0; k < words; ++k)
          {
            uint64_t t = uint64_t(accum_[k]) + bufN_[k] + carry;
            accum_[k] = uint32_t(t);
            carry = t >> 32;
          }
        accum_[words] += uint32_t(carry);
      }
    for (unsigned k = 0; k < words; ++k)
      accum_[k] = (accum_[k] >> 1) | (accum_[k + 1] << 31);
    accum_[words] >>= 1;

    ++bitIndex_;
    report.computeCycles += 2;
  }


  void
  MmulEngine::finalSubtract(MmulCallReport& report)
  {
    phase_ = MmulPhase::FinalSubtract;
    const unsigned words = latched_.words;

    std::vector<uint32_t> diff(words + 1);
    int64_t borrow = 0;
    for (unsigned k = 0; k <= words; ++k)
      {
        int64_t t = int64_t(accum_[k]) - (k < words ? bufN_[k] : 0) - borrow;
        borrow = t < 0;
        diff[k] = uint32_t(t + (borrow << 32));
      }
    // Subtraction is always evaluated; the result is kept only when S >= N.
    if (!borrow)
      accum_ = std::move(diff);
    report.computeCycles += 1;
  }


  void
  MmulEngine::writeBack(Memory& memory, MmulCallReport& report)
  {
    phase_ = MmulPhase::Storing;
    for (unsigned k = 0; k < latched_.words; ++k)
      {
        report.memoryCycles
          += memory.storeWord(addressGenerate(latched_.addrP, k), accum_[k]);
        ++report.stores;
      }
    report.completed = true;
    abort();
  }


  MmulCallReport
  MmulEngine::executeAtomic(Memory& memory, const MmulOperands& ops)
  {
    if (busy())
      {
        abort();
        throw MmulFault(MmulFault::SequenceBroken,
                        "atomic MMUL issued while a partial sequence is in flight");
      }

    MmulCallReport report;
    report.kind = MmulCallKind::Atomic;
    partialMode_ = false;
    try
      {
        latch(memory, ops, report);
        while (bitIndex_ < latched_.nBits())
          processBit(report);
        finalSubtract(report);
        writeBack(memory, report);
      }
    catch (...)
      {
        abort();
        throw;
      }
    return report;
  }


  MmulCallReport
  MmulEngine::executePartialCall(Memory& memory, const MmulOperands& ops)
  {
    MmulCallReport report;
    try
      {
        if (!busy())
          {
            report.kind = MmulCallKind::First;
            latch(memory, ops, report);
            partialMode_ = true;
          }
        else
          report.kind = MmulCallKind::Middle;

        processBit(report);

        if (bitIndex_ == latched_.nBits())
          {
            report.kind = MmulCallKind::Last;
            finalSubtract(report);
            writeBack(memory, report);
          }
      }
    catch (...)
      {
        abort();
        throw;
      }
    return report;
  }


  MmulCallReport
  MmulEngine::execute(Memory& memory, const MmulOperands& ops,
                      bool partialRequested)
  {
    if (busy() || partialRequested)
      return executePartialCall(memory, ops);
    return executeAtomic(memory, ops);
  }

}
