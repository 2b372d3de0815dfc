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

#include "oracle.hpp"

#include "mmulrv/memory.hpp"
#include "mmulrv/mmul_engine.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mmulrv;

namespace
{
  constexpr uint32_t kA = 0x10000, kB = 0x10100, kN = 0x10200, kP = 0x10300;

  void
  put(Memory& m, uint32_t addr, const BigUint& v, unsigned words)
  {
    std::vector<uint32_t> w = v.toWords(words);
    for (unsigned i = 0; i < words; ++i)
      m.pokeWord(addr + 4 * i, w[i]);
  }

  BigUint
  get(const Memory& m, uint32_t addr, unsigned words)
  {
    std::vector<uint32_t> w(words);
    for (unsigned i = 0; i < words; ++i)
      w[i] = m.peekWord(addr + 4 * i);
    return BigUint::fromWords(w);
  }

  MmulOperands
  ops(unsigned words)
  {
    return {kA, kB, kN, kP, words};
  }

  struct Vector
  {
    BigUint a, b, n;
  };

  Vector
  randomVector(std::mt19937_64& rng, unsigned words)
  {
    Vector v;
    v.n = BigUint::randomBits(rng, 32 * words);
    if (!v.n.isOdd())
      v.n += BigUint(1);
    if (v.n == BigUint(1))
      v.n = BigUint(3);
    v.a = BigUint::randomBelow(rng, v.n);
    v.b = BigUint::randomBelow(rng, v.n);
    return v;
  }

  BigUint
  expected(const Vector& v, unsigned words)
  {
    using namespace oracle;
    return fromMpz(montProduct(toMpz(v.a), toMpz(v.b), toMpz(v.n), 32 * words));
  }

  Memory
  loaded(const Vector& v, unsigned words, unsigned rl = 1, unsigned wl = 1)
  {
    Memory m = Memory::withDefaultLayout(rl, wl);
    put(m, kA, v.a, words);
    put(m, kB, v.b, words);
    put(m, kN, v.n, words);
    return m;
  }
}

TEST(Reference, Examples)
{
  EXPECT_EQ(r2mmReference(100, 55, 239, 8), BigUint(197));
  EXPECT_EQ(r2mmReference(17, 23, 239, 8), BigUint(23));
  EXPECT_EQ(r2mmReference(0, 123, 239, 8), BigUint(0));
  EXPECT_EQ(r2mmReference(0, BigUint::fromHex("ffffffff"), BigUint::fromHex("fffffffb"), 32),
            BigUint(0));
}

TEST(Reference, ExamplesAgreeWithOracle)
{
  EXPECT_EQ(oracle::montProduct(100, 55, 239, 8), 197);
  EXPECT_EQ(oracle::montProduct(17, 23, 239, 8), 23);
}

TEST(Reference, RejectsBadOperands)
{
  try
    {
      r2mmReference(1, 2, 240, 8);
      FAIL();
    }
  catch (const MmulFault& e)
    {
      EXPECT_EQ(e.kind(), MmulFault::EvenModulus);
    }
  try
    {
      r2mmReference(256, 2, 239, 8);
      FAIL();
    }
  catch (const MmulFault& e)
    {
      EXPECT_EQ(e.kind(), MmulFault::OperandTooLarge);
    }
}

TEST(Atomic, MatchesOracleOnRandomVectors)
{
  std::mt19937_64 rng(2026);
  MmulEngine engine;
  int count = 0;
  for (unsigned words : {1u, 2u, 4u, 8u})
    for (int i = 0; i < 300; ++i)
      {
        Vector v = randomVector(rng, words);
        Memory m = loaded(v, words);
        MmulCallReport r = engine.executeAtomic(m, ops(words));
        BigUint want = expected(v, words);
        ASSERT_EQ(get(m, kP, words), want);
        ASSERT_EQ(r2mmReference(v.a, v.b, v.n, 32 * words), want);
        ASSERT_TRUE(r.completed);
        ASSERT_FALSE(engine.busy());
        ++count;
      }
  EXPECT_GE(count, 1000);
}

TEST(Atomic, CycleAndMemoryExactness)
{
  std::mt19937_64 rng(5);
  MmulEngine engine;
  for (unsigned words = 1; words <= 8; ++words)
    {
      std::vector<Vector> cases;
      cases.push_back(randomVector(rng, words));
      Vector z = cases[0];
      z.a = BigUint(0);
      z.b = BigUint(0);
      cases.push_back(z);
      Vector full = cases[0];
      full.a = full.n - BigUint(1);
      full.b = full.n - BigUint(1);
      cases.push_back(full);
      for (const Vector& v : cases)
        for (auto [rl, wl] : {std::pair{1u, 1u}, {2u, 3u}, {5u, 1u}})
          {
            Memory m = loaded(v, words, rl, wl);
            MmulCallReport r = engine.executeAtomic(m, ops(words));
            EXPECT_EQ(r.computeCycles, 2u * 32 * words + 1);
            EXPECT_EQ(r.loads, 3 * words);
            EXPECT_EQ(r.stores, words);
            EXPECT_EQ(r.memoryCycles, 3u * words * rl + words * wl);
            EXPECT_EQ(m.reads(), 3u * words);
            EXPECT_EQ(m.writes(), words);
          }
    }
}

TEST(Atomic, Words4Example)
{
  std::mt19937_64 rng(1);
  Vector v = randomVector(rng, 4);
  MmulEngine engine;
  Memory m = loaded(v, 4);
  MmulCallReport r = engine.executeAtomic(m, ops(4));
  EXPECT_EQ(r.computeCycles, 257u);
  EXPECT_EQ(r.loads, 12u);
  EXPECT_EQ(r.stores, 4u);
}

TEST(Atomic, ZeroMultiplicandWord)
{
  Vector v{0, 12345, 0xfffffffb};
  MmulEngine engine;
  Memory m = loaded(v, 1);
  m.pokeWord(kP, 0xdeadbeef);
  MmulCallReport r = engine.executeAtomic(m, ops(1));
  EXPECT_EQ(m.peekWord(kP), 0u);
  EXPECT_EQ(r.cycles(), 65u + 3 + 1);
}

TEST(Atomic, MontgomeryIdentity)
{
  std::mt19937_64 rng(8);
  MmulEngine engine;
  for (unsigned words : {1u, 2u, 4u, 8u})
    for (int i = 0; i < 50; ++i)
      {
        Vector v = randomVector(rng, words);
        v.a = BigUint::powerOfTwo(32 * words) % v.n;
        Memory m = loaded(v, words);
        engine.executeAtomic(m, ops(words));
        ASSERT_EQ(get(m, kP, words), v.b % v.n);
      }
}

TEST(Atomic, ResultMayAliasOperands)
{
  std::mt19937_64 rng(3);
  MmulEngine engine;
  for (int i = 0; i < 20; ++i)
    {
      Vector v = randomVector(rng, 8);
      BigUint want = expected(v, 8);
      for (uint32_t p : {kA, kB, kN})
        {
          Memory m = loaded(v, 8);
          engine.executeAtomic(m, {kA, kB, kN, p, 8});
          ASSERT_EQ(get(m, p, 8), want);
        }
      Vector sq = v;
      sq.b = v.a;
      Memory m = loaded(sq, 8);
      engine.executeAtomic(m, {kA, kA, kN, kA, 8});
      ASSERT_EQ(get(m, kA, 8), expected(sq, 8));
    }
}

TEST(Faults, EvenModulus)
{
  Vector v{3, 5, 240};
  MmulEngine engine;
  Memory m = loaded(v, 1);
  m.pokeWord(kP, 77);
  try
    {
      engine.executeAtomic(m, ops(1));
      FAIL();
    }
  catch (const MmulFault& e)
    {
      EXPECT_EQ(e.kind(), MmulFault::EvenModulus);
    }
  EXPECT_FALSE(engine.busy());
  EXPECT_EQ(m.peekWord(kP), 77u);
  EXPECT_THROW(engine.executePartialCall(m, ops(1)), MmulFault);
  EXPECT_FALSE(engine.busy());
}

TEST(Faults, LengthExceedsHardwareMax)
{
  MmulEngine engine(8);
  Memory m = Memory::withDefaultLayout();
  try
    {
      engine.executeAtomic(m, ops(9));
      FAIL();
    }
  catch (const MmulFault& e)
    {
      EXPECT_EQ(e.kind(), MmulFault::LengthExceedsHardwareMax);
    }
  MmulEngine wide(32);
  std::mt19937_64 rng(4);
  Vector v = randomVector(rng, 32);
  Memory big = Memory::withDefaultLayout();
  put(big, 0x10000, v.a, 32);
  put(big, 0x10400, v.b, 32);
  put(big, 0x10800, v.n, 32);
  wide.executeAtomic(big, {0x10000, 0x10400, 0x10800, 0x10c00, 32});
  EXPECT_EQ(get(big, 0x10c00, 32), expected(v, 32));
  EXPECT_THROW(MmulEngine(0), ConfigError);
  EXPECT_THROW(MmulEngine(33), ConfigError);
}

TEST(Faults, UnmappedAndMisalignedOperands)
{
  MmulEngine engine;
  Memory m = Memory::withDefaultLayout();
  m.pokeWord(kN, 0xfffffffb);
  uint64_t reads = m.reads();
  try
    {
      engine.executeAtomic(m, {kA, kB, kN, 0x80000000, 1});
      FAIL();
    }
  catch (const MemoryFault& e)
    {
      EXPECT_EQ(e.kind(), MemoryFault::UnmappedAddress);
    }
  try
    {
      engine.executeAtomic(m, {kA + 2, kB, kN, kP, 1});
      FAIL();
    }
  catch (const MemoryFault& e)
    {
      EXPECT_EQ(e.kind(), MemoryFault::MisalignedAccess);
    }
  // Operand block running off the end of the data region.
  EXPECT_THROW(engine.executeAtomic(m, {0x1fffc, kB, kN, kP, 2}), MemoryFault);
  EXPECT_EQ(m.reads(), reads);
  EXPECT_FALSE(engine.busy());
}

TEST(Partial, CallLatencies)
{
  std::mt19937_64 rng(11);
  for (auto [rl, wl] : {std::pair{1u, 1u}, {2u, 1u}, {1u, 3u}, {3u, 2u}})
    {
      const unsigned words = 4;
      Vector v = randomVector(rng, words);
      Memory m = loaded(v, words, rl, wl);
      MmulEngine engine;
      MmulCallReport first = engine.executePartialCall(m, ops(words));
      EXPECT_EQ(first.kind, MmulCallKind::First);
      EXPECT_EQ(first.cycles(), 3u * words * rl + 2);
      EXPECT_FALSE(first.completed);
      for (unsigned i = 2; i < 128; ++i)
        {
          MmulCallReport mid = engine.executePartialCall(m, ops(words));
          ASSERT_EQ(mid.kind, MmulCallKind::Middle);
          ASSERT_EQ(mid.cycles(), 2u);
          ASSERT_EQ(mid.loads + mid.stores, 0u);
        }
      MmulCallReport last = engine.executePartialCall(m, ops(words));
      EXPECT_EQ(last.kind, MmulCallKind::Last);
      EXPECT_EQ(last.cycles(), 1u * words * wl + 3);
      EXPECT_TRUE(last.completed);
      EXPECT_FALSE(engine.busy());
      EXPECT_EQ(get(m, kP, words), expected(v, words));
    }
}

TEST(Partial, EquivalentToAtomic)
{
  std::mt19937_64 rng(12);
  for (unsigned words : {1u, 2u, 4u, 8u})
    for (int i = 0; i < 40; ++i)
      {
        Vector v = randomVector(rng, words);
        Memory ma = loaded(v, words, 2, 3), mp = loaded(v, words, 2, 3);
        MmulEngine ea, ep;
        MmulCallReport atomic = ea.executeAtomic(ma, ops(words));
        uint64_t cycles = 0, compute = 0;
        unsigned calls = 0;
        // Later calls carry junk operands; the latched ones are used.
        MmulOperands junk{0, 0, 0, 0, 1};
        do
          {
            MmulCallReport r = ep.executePartialCall(mp, calls ? junk : ops(words));
            cycles += r.cycles();
            compute += r.computeCycles;
            ++calls;
          }
        while (ep.busy());
        ASSERT_EQ(calls, 32 * words);
        ASSERT_EQ(cycles, atomic.cycles());
        ASSERT_EQ(compute, atomic.computeCycles);
        ASSERT_EQ(get(mp, kP, words), get(ma, kP, words));
      }
}

TEST(Partial, AccumulatorStaysBelowTwiceModulus)
{
  std::mt19937_64 rng(13);
  for (unsigned words : {1u, 3u, 8u})
    for (int i = 0; i < 30; ++i)
      {
        Vector v = randomVector(rng, words);
        if (i % 3 == 0)
          v.a = v.b = v.n - BigUint(1);
        Memory m = loaded(v, words);
        MmulEngine engine;
        unsigned last = 0;
        engine.executePartialCall(m, ops(words));
        while (engine.busy())
          {
            ASSERT_LT(engine.accumulator(), v.n + v.n);
            ASSERT_EQ(engine.bitIndex(), last + 1);
            ASSERT_LE(engine.bitIndex(), 32 * words);
            last = engine.bitIndex();
            engine.executePartialCall(m, ops(words));
          }
        ASSERT_EQ(get(m, kP, words), expected(v, words));
      }
}

TEST(Partial, InterleavedWorkDoesNotChangeResult)
{
  std::mt19937_64 rng(14);
  Vector v = randomVector(rng, 8);
  Memory m = loaded(v, 8);
  MmulEngine engine;
  std::mt19937 noise(1);
  do
    {
      engine.executePartialCall(m, ops(8));
      // Handler-like traffic to unrelated memory.
      for (int k = 0; k < 3; ++k)
        m.storeWord(0x11000 + 4 * (noise() % 64), noise());
    }
  while (engine.busy());
  EXPECT_EQ(get(m, kP, 8), expected(v, 8));
}

TEST(Partial, AtomicWhileBusyIsSequenceBroken)
{
  std::mt19937_64 rng(15);
  Vector v = randomVector(rng, 2);
  Memory m = loaded(v, 2);
  MmulEngine engine;
  engine.executePartialCall(m, ops(2));
  try
    {
      engine.executeAtomic(m, ops(2));
      FAIL();
    }
  catch (const MmulFault& e)
    {
      EXPECT_EQ(e.kind(), MmulFault::SequenceBroken);
    }
  EXPECT_FALSE(engine.busy());
}

TEST(Partial, DispatchContinuesInFlightSequence)
{
  std::mt19937_64 rng(16);
  Vector v = randomVector(rng, 1);
  Memory m = loaded(v, 1);
  MmulEngine engine;
  EXPECT_EQ(engine.execute(m, ops(1), true).kind, MmulCallKind::First);
  // Mode switched off mid-sequence: still continues one bit at a time.
  EXPECT_EQ(engine.execute(m, ops(1), false).kind, MmulCallKind::Middle);
  EXPECT_TRUE(engine.partialMode());
  while (engine.busy())
    engine.execute(m, ops(1), false);
  EXPECT_EQ(get(m, kP, 1), expected(v, 1));
  EXPECT_EQ(engine.execute(m, ops(1), false).kind, MmulCallKind::Atomic);
}

TEST(Status, WordReflectsProgress)
{
  std::mt19937_64 rng(17);
  Vector v = randomVector(rng, 2);
  Memory m = loaded(v, 2);
  MmulEngine engine;
  EXPECT_EQ(engine.statusWord(), 0u);
  engine.executePartialCall(m, ops(2));
  EXPECT_EQ(engine.statusWord(), 1u | (1u << 8));
  for (int i = 0; i < 9; ++i)
    engine.executePartialCall(m, ops(2));
  EXPECT_EQ(engine.statusWord(), 1u | (10u << 8));
  EXPECT_EQ(engine.phase(), MmulPhase::Iterating);
  EXPECT_EQ(engine.latched(), ops(2));
  engine.abort();
  EXPECT_EQ(engine.statusWord(), 0u);
  EXPECT_EQ(engine.phase(), MmulPhase::Idle);
}

TEST(AddressGenerate, Examples)
{
  EXPECT_EQ(addressGenerate(0x10000, 0), 0x10000u);
  EXPECT_EQ(addressGenerate(0x10000, 3), 0x1000Cu);
  EXPECT_EQ(addressGenerate(0xFFFFFFFC, 1), 0x0u);
}
