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

#include "mmulrv/assembler.hpp"
#include "mmulrv/bigint.hpp"
#include "mmulrv/error.hpp"
#include "mmulrv/perf_energy.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mmulrv
{

  class Machine;

  constexpr uint32_t kCodeBase = 0x00000;
  constexpr uint32_t kDataBase = 0x10000;
  constexpr uint32_t kStackTop = 0x20000;
  /// gp points into the middle of the data window so every symbol is
  /// reachable with a single addi.
  constexpr uint32_t kGlobalPointer = kDataBase + 2048;
  constexpr uint32_t kDataWindowBytes = 4096;
  /// Mailbox value meaning "no interrupt serviced".
  constexpr uint32_t kMailboxEmpty = 0xffffffffu;


  struct Symbol
  {
    uint32_t address = 0;
    uint32_t words = 0;

    uint32_t end() const
    { return address + 4 * words; }
  };


  /// Odd modulus with its Montgomery constants for R = 2^(32 words).
  struct FieldContext
  {
    BigUint modulus;
    unsigned words = 0;
    BigUint rModN;    // 2^n mod N
    BigUint r2ModN;   // 2^(2n) mod N, the domain conversion constant

    /// words == 0 picks the smallest word count that holds the modulus.
    static FieldContext make(const BigUint& modulus, unsigned words = 0);

    unsigned nBits() const
    { return 32 * words; }

    /// Host-side R2MM with the same semantics as the engine.
    BigUint montMul(const BigUint& a, const BigUint& b) const;
    BigUint toMont(const BigUint& x) const;
    BigUint fromMont(const BigUint& x) const;
  };


  /// 2^255 - 19.
  const BigUint& curve25519Prime();
  /// The NIST P-256 prime.
  const BigUint& p256Prime();


  /// A complete guest: code image, initial data, symbol table, and the
  /// results the host expects the guest to leave in memory.
  struct GuestProgram
  {
    std::string name;
    Configuration config = Configuration::BA;
    uint32_t entry = kCodeBase;
    uint32_t codeBase = kCodeBase;
    std::vector<uint8_t> code;
    uint32_t dataBase = kDataBase;
    std::vector<uint32_t> data;
    std::map<std::string, Symbol> symbols;
    /// Symbol holding the final result, and its expected value.
    std::string resultSymbol;
    std::optional<BigUint> expected;
    size_t instructionCount = 0;
    std::string listing;

    const Symbol& symbol(std::string_view name) const;

    /// Copy code and data into memory, set pc and the stack.
    void loadInto(Machine& machine) const;

    BigUint readSymbol(const Machine& machine, std::string_view name) const;

    /// Result memory equals the expected value.
    bool resultMatches(const Machine& machine) const;
  };


  /// Code plus data under construction. Registers by convention:
  /// sp stack, gp data window, tp reserved for the interrupt handler,
  /// a2 holds the modulus address while field routines run.
  class GuestBuilder
  {
  public:
    GuestBuilder(std::string name, Configuration config);

    ProgramBuilder& code()
    { return code_; }

    Configuration config() const
    { return config_; }

    /// Reserve words of data, optionally initialised with a value.
    Symbol allocate(const std::string& name, unsigned words,
                    const std::optional<BigUint>& init = std::nullopt);
    Symbol allocateWord(const std::string& name, uint32_t init);

    const Symbol& symbol(const std::string& name) const;

    /// addi rd, gp, (symbol - gp)
    void addressOf(unsigned rd, const std::string& name, uint32_t byteOffset = 0);

    /// Set up sp and gp; the first code emitted by every guest.
    void prologue();

    GuestProgram finish(std::string resultSymbol, std::optional<BigUint> expected);

  private:
    std::string name_;
    Configuration config_;
    ProgramBuilder code_;
    std::vector<uint32_t> data_;
    std::map<std::string, Symbol> symbols_;
  };


  /// Software R2MM subroutine using only RV32E instructions. Arguments
  /// a0 = &A, a1 = &B, a2 = &N, a3 = &P (P may alias A or B); all
  /// registers are preserved. Needs a "montmul_s" scratch of words + 1.
  Label emitSoftwareMontmul(GuestBuilder& guest, const FieldContext& ctx);

  /// Address setup plus one atomic MMUL: P <- A*B*R^-1 mod N.
  void emitMmulAtomic(GuestBuilder& guest, const FieldContext& ctx,
                      const std::string& symA, const std::string& symB,
                      const std::string& symN, const std::string& symP);

  /// Address setup, MMUL_MODE <- 1, n identical MMUL words, MMUL_MODE <- 0.
  void emitMmulPartialUnrolled(GuestBuilder& guest, const FieldContext& ctx,
                               const std::string& symA, const std::string& symB,
                               const std::string& symN, const std::string& symP);

  /// Field multiply subroutine for the builder's configuration, with
  /// the calling convention of emitSoftwareMontmul.
  Label emitFieldMul(GuestBuilder& guest, const FieldContext& ctx);

  /// P <- A + B mod N and P <- A - B mod N for reduced inputs, same
  /// argument registers as the multiply (a1 = &B). Need "fadd_t".
  Label emitFieldAdd(GuestBuilder& guest, const FieldContext& ctx);
  Label emitFieldSub(GuestBuilder& guest, const FieldContext& ctx);


  struct ModexpInputs
  {
    BigUint base;
    BigUint exponent;
  };

  /// Left-to-right square-and-multiply in the Montgomery domain. The
  /// exponent is scanned over exponentBits rounded up to whole words.
  GuestProgram emitModexp(const FieldContext& ctx, Configuration config,
                          const ModexpInputs& inputs, unsigned exponentBits,
                          std::string name = "modexp");

  /// P <- A*B*R^-1 mod N with a single multiplication.
  GuestProgram emitMontmul(const FieldContext& ctx, Configuration config,
                           const BigUint& a, const BigUint& b,
                           std::string name = "montmul");

  /// x-only Montgomery ladder on Curve25519 (RFC 7748 step formulas,
  /// scalar used as given), followed by an inversion via z^(p-2).
  GuestProgram emitLadderX25519(Configuration config, const BigUint& scalar,
                                const BigUint& u, unsigned scalarBits = 255,
                                std::string name = "x25519_ladder");

  /// Host ladder with the same step formulas, on plain residues.
  BigUint x25519Ladder(const BigUint& scalar, const BigUint& u,
                       unsigned scalarBits = 255);

  /// Wrap a fragment with an interrupt handler that writes mcycle to
  /// "irq_mbox", counts services in "irq_count", acknowledges, and
  /// returns. The fragment runs with interrupts enabled, then halts.
  GuestProgram emitInterruptHarness(GuestBuilder& guest,
                                    const std::function<void(GuestBuilder&)>& inner,
                                    std::string resultSymbol,
                                    std::optional<BigUint> expected);

  /// One 256-bit P-256 multiplication, atomic (CI-AE) or partial (CI-PE).
  GuestProgram emitIrqSweep(Configuration config, const BigUint& a,
                            const BigUint& b, std::string name);


  class GuestNotFound : public SimError
  {
  public:
    explicit GuestNotFound(const std::string& name)
      : SimError("unknown guest '" + name + "'")
    { }
  };


  /// Named big-integer inputs, e.g. base, exp, scalar, u, a, b.
  using GuestInputs = std::map<std::string, BigUint>;

  struct GuestInfo
  {
    std::string name;
    std::string description;
    /// Configuration the guest is tied to, if any.
    std::optional<Configuration> requiredConfig;
    std::vector<std::string> inputNames;
    std::function<GuestProgram(Configuration, const GuestInputs&)> build;
  };

  const std::vector<GuestInfo>& guestCatalog();

  /// Throws GuestNotFound for an unknown name and ConfigError for an
  /// unknown input or a configuration the guest does not support.
  GuestProgram buildGuest(std::string_view name, Configuration config,
                          const GuestInputs& inputs = {});

}
