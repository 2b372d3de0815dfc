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

#include "mmulrv/guest_kit.hpp"
#include "mmulrv/machine.hpp"
#include "mmulrv/mmul_engine.hpp"

#include <algorithm>

namespace mmulrv
{

  using namespace reg;

  FieldContext
  FieldContext::make(const BigUint& modulus, unsigned words)
  {
    if (!modulus.isOdd())
      throw ConfigError("field modulus must be odd");
    unsigned need = unsigned((modulus.bitLength() + 31) / 32);
    if (words == 0)
      words = need;
    if (words < need)
      throw ConfigError("modulus does not fit in " + std::to_string(words) + " words");
    FieldContext ctx;
    ctx.modulus = modulus;
    ctx.words = words;
    ctx.rModN = BigUint::powerOfTwo(32 * words) % modulus;
    ctx.r2ModN = BigUint::powerOfTwo(64 * words) % modulus;
    return ctx;
  }


  BigUint
  FieldContext::montMul(const BigUint& a, const BigUint& b) const
  {
    return r2mmReference(a, b, modulus, nBits());
  }


  BigUint
  FieldContext::toMont(const BigUint& x) const
  {
    return montMul(x, r2ModN);
  }


  BigUint
  FieldContext::fromMont(const BigUint& x) const
  {
    return montMul(x, BigUint(1));
  }


  const BigUint&
  curve25519Prime()
  {
    static const BigUint p = BigUint::powerOfTwo(255) - BigUint(19);
    return p;
  }


  const BigUint&
  p256Prime()
  {
    static const BigUint p = BigUint::fromHex(
      "ffffffff00000001000000000000000000000000ffffffffffffffffffffffff");
    return p;
  }


  // GuestProgram

  const Symbol&
  GuestProgram::symbol(std::string_view name) const
  {
    auto it = symbols.find(std::string(name));
    if (it == symbols.end())
      throw ConfigError("guest " + this->name + " has no symbol " + std::string(name));
    return it->second;
  }


  void
  GuestProgram::loadInto(Machine& machine) const
  {
    machine.memory().loadImage(codeBase, code);
    for (size_t i = 0; i < data.size(); ++i)
      machine.memory().pokeWord(dataBase + uint32_t(4 * i), data[i]);
    machine.setPc(entry);
  }


  BigUint
  GuestProgram::readSymbol(const Machine& machine, std::string_view name) const
  {
    const Symbol& sym = symbol(name);
    std::vector<uint32_t> words(sym.words);
    for (uint32_t i = 0; i < sym.words; ++i)
      words[i] = machine.memory().peekWord(sym.address + 4 * i);
    return BigUint::fromWords(words);
  }


  bool
  GuestProgram::resultMatches(const Machine& machine) const
  {
    return expected && readSymbol(machine, resultSymbol) == *expected;
  }


  // GuestBuilder

  GuestBuilder::GuestBuilder(std::string name, Configuration config)
    : name_(std::move(name)), config_(config), code_(kCodeBase)
  { }


  Symbol
  GuestBuilder::allocate(const std::string& name, unsigned words,
                         const std::optional<BigUint>& init)
  {
    if (symbols_.count(name))
      throw ConfigError("symbol " + name + " allocated twice");
    if (words == 0)
      throw ConfigError("symbol " + name + " has no words");
    Symbol sym{kDataBase + uint32_t(4 * data_.size()), words};
    if (sym.end() > kDataBase + kDataWindowBytes)
      throw ConfigError("guest data exceeds the " + std::to_string(kDataWindowBytes)
                        + "-byte gp window");
    std::vector<uint32_t> image(words, 0);
    if (init)
      image = init->toWords(words);
    data_.insert(data_.end(), image.begin(), image.end());
    symbols_[name] = sym;
    return sym;
  }


  Symbol
  GuestBuilder::allocateWord(const std::string& name, uint32_t init)
  {
    return allocate(name, 1, BigUint(init));
  }


  const Symbol&
  GuestBuilder::symbol(const std::string& name) const
  {
    auto it = symbols_.find(name);
    if (it == symbols_.end())
      throw ConfigError("unknown guest symbol " + name);
    return it->second;
  }


  void
  GuestBuilder::addressOf(unsigned rd, const std::string& name, uint32_t byteOffset)
  {
    code_.addi(rd, gp, int32_t(symbol(name).address + byteOffset - kGlobalPointer));
  }


  void
  GuestBuilder::prologue()
  {
    code_.li(sp, kStackTop);
    code_.li(gp, kGlobalPointer);
  }


  GuestProgram
  GuestBuilder::finish(std::string resultSymbol, std::optional<BigUint> expected)
  {
    GuestProgram g;
    g.name = name_;
    g.config = config_;
    g.code = code_.finish();
    g.data = data_;
    g.symbols = symbols_;
    g.resultSymbol = std::move(resultSymbol);
    g.expected = std::move(expected);
    g.instructionCount = code_.instructionCount();
    g.listing = code_.listing();
    if (!g.resultSymbol.empty())
      (void) g.symbol(g.resultSymbol);
    return g;
  }


  namespace
  {
    int32_t
    w(unsigned j)
    {
      return int32_t(4 * j);
    }

    void
    save(ProgramBuilder& c, std::initializer_list<unsigned> regs)
    {
      int32_t frame = int32_t((regs.size() * 4 + 15) / 16 * 16);
      c.addi(sp, sp, -frame);
      unsigned slot = 0;
      for (unsigned r : regs)
        c.sw(r, w(slot++), sp);
    }

    void
    restoreAndReturn(ProgramBuilder& c, std::initializer_list<unsigned> regs)
    {
      int32_t frame = int32_t((regs.size() * 4 + 15) / 16 * 16);
      unsigned slot = 0;
      for (unsigned r : regs)
        c.lw(r, w(slot++), sp);
      c.addi(sp, sp, frame);
      c.ret();
    }

    /// dst[0..W) <- x[0..W) + y[0..W); carry out in `carry`.
    /// Temporaries: t2, a5, and `spare`.
    void
    addWords(ProgramBuilder& c, unsigned words, unsigned dst, unsigned xs,
             unsigned ys, unsigned carry, unsigned spare)
    {
      for (unsigned j = 0; j < words; ++j)
        {
          c.lw(t2, w(j), xs);
          c.lw(a5, w(j), ys);
          c.add(t2, t2, a5);
          c.sltu(a5, t2, a5);
          if (j == 0)
            c.mv(carry, a5);
          else
            {
              c.add(t2, t2, carry);
              c.sltu(spare, t2, carry);
              c.or_(carry, a5, spare);
            }
          c.sw(t2, w(j), dst);
        }
    }

    /// dst[0..W) <- x[0..W) - y[0..W); borrow out in `borrow`.
    void
    subWords(ProgramBuilder& c, unsigned words, unsigned dst, unsigned xs,
             unsigned ys, unsigned borrow, unsigned spare)
    {
      for (unsigned j = 0; j < words; ++j)
        {
          c.lw(t2, w(j), xs);
          c.lw(a5, w(j), ys);
          c.sltu(spare, t2, a5);
          c.sub(t2, t2, a5);
          if (j == 0)
            c.mv(borrow, spare);
          else
            {
              c.sltu(a5, t2, borrow);
              c.sub(t2, t2, borrow);
              c.or_(borrow, spare, a5);
            }
          c.sw(t2, w(j), dst);
        }
    }
  }


  Label
  emitSoftwareMontmul(GuestBuilder& guest, const FieldContext& ctx)
  {
    ProgramBuilder& c = guest.code();
    const unsigned W = ctx.words;
    guest.allocate("montmul_s", W + 1);

    Label entry = c.newLabel("montmul_sw");
    Label wordLoop = c.newLabel("montmul_sw.word");
    Label bitLoop = c.newLabel("montmul_sw.bit");
    Label skipB = c.newLabel("montmul_sw.skip_b");
    Label skipN = c.newLabel("montmul_sw.skip_n");
    Label done = c.newLabel("montmul_sw.done");
    const auto saved = {ra, t0, t1, t2, s0, s1, a0, a4, a5};

    c.bind(entry);
    save(c, saved);
    guest.addressOf(s0, "montmul_s");
    for (unsigned j = 0; j <= W; ++j)
      c.sw(zero, w(j), s0);
    c.mv(t0, a0);
    c.addi(a4, a0, w(W));

    c.bind(wordLoop);
    c.lw(s1, 0, t0);
    c.li(t1, 32);

    c.bind(bitLoop);
    // S += a_i * B
    c.andi(t2, s1, 1);
    c.beqz(t2, skipB);
    addWords(c, W, s0, s0, a1, a0, ra);
    c.lw(t2, w(W), s0);
    c.add(t2, t2, a0);
    c.sw(t2, w(W), s0);
    c.bind(skipB);
    // S += N when odd
    c.lw(t2, 0, s0);
    c.andi(t2, t2, 1);
    c.beqz(t2, skipN);
    addWords(c, W, s0, s0, a2, a0, ra);
    c.lw(t2, w(W), s0);
    c.add(t2, t2, a0);
    c.sw(t2, w(W), s0);
    c.bind(skipN);
    // S >>= 1 over W+1 words
    {
      unsigned cur = t2, nxt = a5;
      c.lw(cur, 0, s0);
      for (unsigned j = 0; j < W; ++j)
        {
          c.lw(nxt, w(j + 1), s0);
          c.srli(cur, cur, 1);
          c.slli(a0, nxt, 31);
          c.or_(cur, cur, a0);
          c.sw(cur, w(j), s0);
          std::swap(cur, nxt);
        }
      c.srli(cur, cur, 1);
      c.sw(cur, w(W), s0);
    }
    c.srli(s1, s1, 1);
    c.addi(t1, t1, -1);
    c.bnez(t1, bitLoop);
    c.addi(t0, t0, 4);
    c.bne(t0, a4, wordLoop);

    // P <- S - N; keep S instead when that borrows.
    subWords(c, W, a3, s0, a2, a0, ra);
    c.lw(t2, w(W), s0);
    c.sltu(a0, t2, a0);
    c.beqz(a0, done);
    for (unsigned j = 0; j < W; ++j)
      {
        c.lw(t2, w(j), s0);
        c.sw(t2, w(j), a3);
      }
    c.bind(done);
    restoreAndReturn(c, saved);
    return entry;
  }


  void
  emitMmulAtomic(GuestBuilder& guest, const FieldContext& ctx,
                 const std::string& symA, const std::string& symB,
                 const std::string& symN, const std::string& symP)
  {
    guest.addressOf(a0, symA);
    guest.addressOf(a1, symB);
    guest.addressOf(a2, symN);
    guest.addressOf(a3, symP);
    guest.code().mmul(a3, a0, a1, a2, ctx.words);
  }


  void
  emitMmulPartialUnrolled(GuestBuilder& guest, const FieldContext& ctx,
                          const std::string& symA, const std::string& symB,
                          const std::string& symN, const std::string& symP)
  {
    ProgramBuilder& c = guest.code();
    guest.addressOf(a0, symA);
    guest.addressOf(a1, symB);
    guest.addressOf(a2, symN);
    guest.addressOf(a3, symP);
    c.csrwi(csr::kMmulMode, 1);
    for (unsigned i = 0; i < ctx.nBits(); ++i)
      c.mmul(a3, a0, a1, a2, ctx.words);
    c.csrwi(csr::kMmulMode, 0);
  }


  Label
  emitFieldMul(GuestBuilder& guest, const FieldContext& ctx)
  {
    ProgramBuilder& c = guest.code();
    switch (guest.config())
      {
      case Configuration::BA:
        return emitSoftwareMontmul(guest, ctx);
      case Configuration::CIAE:
        {
          Label entry = c.newLabel("field_mul");
          c.bind(entry);
          c.mmul(a3, a0, a1, a2, ctx.words);
          c.ret();
          return entry;
        }
      case Configuration::CIPE:
        {
          Label entry = c.newLabel("field_mul");
          c.bind(entry);
          c.csrwi(csr::kMmulMode, 1);
          for (unsigned i = 0; i < ctx.nBits(); ++i)
            c.mmul(a3, a0, a1, a2, ctx.words);
          c.csrwi(csr::kMmulMode, 0);
          c.ret();
          return entry;
        }
      }
    throw ConfigError("unknown configuration");
  }


  Label
  emitFieldAdd(GuestBuilder& guest, const FieldContext& ctx)
  {
    ProgramBuilder& c = guest.code();
    const unsigned W = ctx.words;
    guest.allocate("fadd_t", W);
    Label entry = c.newLabel("field_add");
    Label use = c.newLabel("field_add.reduce");
    Label done = c.newLabel("field_add.done");
    const auto saved = {ra, t1, t2, s0, a4, a5};

    c.bind(entry);
    save(c, saved);
    addWords(c, W, a3, a0, a1, a4, ra);
    c.mv(t1, a4);
    guest.addressOf(s0, "fadd_t");
    subWords(c, W, s0, a3, a2, a4, ra);
    c.bnez(t1, use);
    c.bnez(a4, done);
    c.bind(use);
    for (unsigned j = 0; j < W; ++j)
      {
        c.lw(t2, w(j), s0);
        c.sw(t2, w(j), a3);
      }
    c.bind(done);
    restoreAndReturn(c, saved);
    return entry;
  }


  Label
  emitFieldSub(GuestBuilder& guest, const FieldContext& ctx)
  {
    ProgramBuilder& c = guest.code();
    const unsigned W = ctx.words;
    Label entry = c.newLabel("field_sub");
    Label done = c.newLabel("field_sub.done");
    const auto saved = {ra, t2, a4, a5};

    c.bind(entry);
    save(c, saved);
    subWords(c, W, a3, a0, a1, a4, ra);
    c.beqz(a4, done);
    addWords(c, W, a3, a3, a2, a4, ra);
    c.bind(done);
    restoreAndReturn(c, saved);
    return entry;
  }


  namespace
  {
    void
    checkConfigForMmul(const FieldContext& ctx)
    {
      if (ctx.words == 0 || ctx.words > 32)
        throw ConfigError("field words must be in 1..32");
    }

    /// P <- A op B through a field subroutine; a2 must already hold &N.
    void
    callField(GuestBuilder& guest, Label routine, const std::string& a,
              const std::string& b, const std::string& p)
    {
      guest.addressOf(a0, a);
      guest.addressOf(a1, b);
      guest.addressOf(a3, p);
      guest.code().call(routine);
    }

    /// acc <- acc^exp * base^... : left-to-right square-and-multiply over
    /// every bit of the exponent words, all in the Montgomery domain.
    void
    emitPowLoop(GuestBuilder& guest, Label fmul, const std::string& expSym,
                const std::string& baseSym, const std::string& accSym)
    {
      ProgramBuilder& c = guest.code();
      const Symbol& exp = guest.symbol(expSym);
      Label wordLoop = c.newLabel("pow.word");
      Label bitLoop = c.newLabel("pow.bit");
      Label skip = c.newLabel("pow.skip");

      guest.addressOf(s0, expSym, 4 * (exp.words - 1));
      c.li(s1, exp.words);
      c.bind(wordLoop);
      c.lw(t0, 0, s0);
      c.li(t1, 32);
      c.bind(bitLoop);
      guest.addressOf(a0, accSym);
      c.mv(a1, a0);
      c.mv(a3, a0);
      c.call(fmul);
      c.bge(t0, zero, skip);
      guest.addressOf(a1, baseSym);
      c.call(fmul);
      c.bind(skip);
      c.slli(t0, t0, 1);
      c.addi(t1, t1, -1);
      c.bnez(t1, bitLoop);
      c.addi(s0, s0, -4);
      c.addi(s1, s1, -1);
      c.bnez(s1, wordLoop);
    }
  }


  GuestProgram
  emitModexp(const FieldContext& ctx, Configuration config,
             const ModexpInputs& inputs, unsigned exponentBits, std::string name)
  {
    checkConfigForMmul(ctx);
    if (exponentBits == 0)
      throw ConfigError("modexp needs at least one exponent bit");
    unsigned expWords = (exponentBits + 31) / 32;
    if (inputs.exponent.bitLength() > 32 * expWords)
      throw ConfigError("exponent exceeds " + std::to_string(exponentBits) + " bits");
    if (inputs.base.bitLength() > ctx.nBits())
      throw ConfigError("base exceeds the field width");

    GuestBuilder guest(std::move(name), config);
    const unsigned W = ctx.words;
    guest.allocate("n", W, ctx.modulus);
    guest.allocate("r2", W, ctx.r2ModN);
    guest.allocate("one", W, BigUint(1));
    guest.allocate("base", W, inputs.base);
    guest.allocate("exp", expWords, inputs.exponent);
    guest.allocate("base_m", W);
    guest.allocate("acc", W);
    guest.allocate("result", W);

    ProgramBuilder& c = guest.code();
    Label start = c.newLabel("_start");
    c.j(start);
    Label fmul = emitFieldMul(guest, ctx);
    c.bind(start);
    guest.prologue();
    guest.addressOf(a2, "n");
    callField(guest, fmul, "base", "r2", "base_m");
    callField(guest, fmul, "one", "r2", "acc");
    emitPowLoop(guest, fmul, "exp", "base_m", "acc");
    callField(guest, fmul, "acc", "one", "result");
    c.halt();

    BigUint expected = powMod(inputs.base, inputs.exponent, ctx.modulus);
    return guest.finish("result", expected);
  }


  GuestProgram
  emitMontmul(const FieldContext& ctx, Configuration config, const BigUint& a,
              const BigUint& b, std::string name)
  {
    checkConfigForMmul(ctx);
    GuestBuilder guest(std::move(name), config);
    const unsigned W = ctx.words;
    guest.allocate("a", W, a);
    guest.allocate("b", W, b);
    guest.allocate("n", W, ctx.modulus);
    guest.allocate("p", W);

    ProgramBuilder& c = guest.code();
    switch (config)
      {
      case Configuration::BA:
        {
          Label start = c.newLabel("_start");
          c.j(start);
          Label fmul = emitSoftwareMontmul(guest, ctx);
          c.bind(start);
          guest.prologue();
          guest.addressOf(a2, "n");
          callField(guest, fmul, "a", "b", "p");
          break;
        }
      case Configuration::CIAE:
        guest.prologue();
        emitMmulAtomic(guest, ctx, "a", "b", "n", "p");
        break;
      case Configuration::CIPE:
        guest.prologue();
        emitMmulPartialUnrolled(guest, ctx, "a", "b", "n", "p");
        break;
      }
    c.halt();
    return guest.finish("p", ctx.montMul(a, b));
  }


  BigUint
  x25519Ladder(const BigUint& scalar, const BigUint& u, unsigned scalarBits)
  {
    const BigUint& p = curve25519Prime();
    const BigUint a24(121665);
    auto add = [&](const BigUint& x, const BigUint& y) { return (x + y) % p; };
    auto sub = [&](const BigUint& x, const BigUint& y) { return (x + p - y) % p; };
    auto mul = [&](const BigUint& x, const BigUint& y) { return mulMod(x, y, p); };

    BigUint x1 = u % p, x2(1), z2(0), x3 = x1, z3(1);
    bool swap = false;
    for (unsigned i = scalarBits; i-- > 0;)
      {
        bool k = scalar.bit(i);
        if (swap != k)
          {
            std::swap(x2, x3);
            std::swap(z2, z3);
          }
        swap = k;
        BigUint A = add(x2, z2), AA = mul(A, A);
        BigUint B = sub(x2, z2), BB = mul(B, B);
        BigUint E = sub(AA, BB);
        BigUint C = add(x3, z3), D = sub(x3, z3);
        BigUint DA = mul(D, A), CB = mul(C, B);
        BigUint s = add(DA, CB);
        x3 = mul(s, s);
        BigUint d = sub(DA, CB);
        z3 = mul(x1, mul(d, d));
        x2 = mul(AA, BB);
        z2 = mul(E, add(AA, mul(a24, E)));
      }
    if (swap)
      {
        std::swap(x2, x3);
        std::swap(z2, z3);
      }
    return mul(x2, powMod(z2, p - BigUint(2), p));
  }


  GuestProgram
  emitLadderX25519(Configuration config, const BigUint& scalar, const BigUint& u,
                   unsigned scalarBits, std::string name)
  {
    if (scalarBits == 0 || scalarBits > 256)
      throw ConfigError("ladder scalar bits must be in 1..256");
    if (scalar.bitLength() > scalarBits)
      throw ConfigError("scalar exceeds " + std::to_string(scalarBits) + " bits");
    if (u.bitLength() > 256)
      throw ConfigError("u-coordinate exceeds 256 bits");

    const FieldContext ctx = FieldContext::make(curve25519Prime(), 8);
    const unsigned W = ctx.words;
    GuestBuilder guest(std::move(name), config);
    guest.allocate("n", W, ctx.modulus);
    guest.allocate("r2", W, ctx.r2ModN);
    guest.allocate("one", W, BigUint(1));
    guest.allocate("a24", W, BigUint(121665));
    guest.allocate("u", W, u);
    guest.allocate("scalar", W, scalar);
    guest.allocate("inv_exp", W, ctx.modulus - BigUint(2));
    for (const char* s : {"x1", "x2", "z2", "x3", "z3", "a24_m", "ta", "taa", "tb",
                          "tbb", "te", "tc", "td", "tda", "tcb", "acc", "result"})
      guest.allocate(s, W);

    ProgramBuilder& c = guest.code();
    Label start = c.newLabel("_start");
    c.j(start);
    Label fmul = emitFieldMul(guest, ctx);
    Label fadd = emitFieldAdd(guest, ctx);
    Label fsub = emitFieldSub(guest, ctx);

    // cswap: t0 = swap bit, a0 = &X, a1 = &Y.
    Label cswap = c.newLabel("cswap");
    {
      const auto saved = {t1, t2, a4, a5};
      c.bind(cswap);
      save(c, saved);
      c.sub(t1, zero, t0);
      for (unsigned j = 0; j < W; ++j)
        {
          c.lw(t2, w(j), a0);
          c.lw(a5, w(j), a1);
          c.xor_(a4, t2, a5);
          c.and_(a4, a4, t1);
          c.xor_(t2, t2, a4);
          c.xor_(a5, a5, a4);
          c.sw(t2, w(j), a0);
          c.sw(a5, w(j), a1);
        }
      restoreAndReturn(c, saved);
    }
    auto swapPair = [&](const char* x, const char* y) {
      guest.addressOf(a0, x);
      guest.addressOf(a1, y);
      c.call(cswap);
    };

    c.bind(start);
    guest.prologue();
    guest.addressOf(a2, "n");
    callField(guest, fmul, "u", "r2", "x1");
    callField(guest, fmul, "u", "r2", "x3");
    callField(guest, fmul, "one", "r2", "x2");
    callField(guest, fmul, "one", "r2", "z3");
    callField(guest, fmul, "a24", "r2", "a24_m");

    Label loop = c.newLabel("ladder.step");
    c.li(s0, 0);
    c.li(s1, scalarBits - 1);
    c.bind(loop);
    c.srli(t0, s1, 5);
    c.slli(t0, t0, 2);
    guest.addressOf(t1, "scalar");
    c.add(t0, t0, t1);
    c.lw(t0, 0, t0);
    c.srl(t0, t0, s1);
    c.andi(t2, t0, 1);
    c.xor_(t0, s0, t2);
    swapPair("x2", "x3");
    swapPair("z2", "z3");
    c.mv(s0, t2);
    callField(guest, fadd, "x2", "z2", "ta");
    callField(guest, fmul, "ta", "ta", "taa");
    callField(guest, fsub, "x2", "z2", "tb");
    callField(guest, fmul, "tb", "tb", "tbb");
    callField(guest, fsub, "taa", "tbb", "te");
    callField(guest, fadd, "x3", "z3", "tc");
    callField(guest, fsub, "x3", "z3", "td");
    callField(guest, fmul, "td", "ta", "tda");
    callField(guest, fmul, "tc", "tb", "tcb");
    callField(guest, fadd, "tda", "tcb", "x3");
    callField(guest, fmul, "x3", "x3", "x3");
    callField(guest, fsub, "tda", "tcb", "z3");
    callField(guest, fmul, "z3", "z3", "z3");
    callField(guest, fmul, "x1", "z3", "z3");
    callField(guest, fmul, "taa", "tbb", "x2");
    callField(guest, fmul, "a24_m", "te", "z2");
    callField(guest, fadd, "taa", "z2", "z2");
    callField(guest, fmul, "te", "z2", "z2");
    c.addi(s1, s1, -1);
    c.bge(s1, zero, loop);
    c.mv(t0, s0);
    swapPair("x2", "x3");
    swapPair("z2", "z3");

    // x2 * z2^(p-2), then leave the Montgomery domain.
    callField(guest, fmul, "one", "r2", "acc");
    emitPowLoop(guest, fmul, "inv_exp", "z2", "acc");
    callField(guest, fmul, "x2", "acc", "result");
    callField(guest, fmul, "result", "one", "result");
    c.halt();

    return guest.finish("result", x25519Ladder(scalar, u, scalarBits));
  }


  GuestProgram
  emitInterruptHarness(GuestBuilder& guest,
                       const std::function<void(GuestBuilder&)>& inner,
                       std::string resultSymbol, std::optional<BigUint> expected)
  {
    ProgramBuilder& c = guest.code();
    guest.allocateWord("irq_mbox", kMailboxEmpty);
    guest.allocateWord("irq_count", 0);
    Label handler = c.newLabel("irq_handler");

    guest.prologue();
    c.la(t0, handler);
    c.csrw(csr::kMtvec, t0);
    c.li(t0, csr::kMeip);
    c.csrw(csr::kMie, t0);
    c.csrsi(csr::kMstatus, csr::kMstatusMie);
    inner(guest);
    c.halt();

    if (c.here() % 4)
      c.c_nop();
    c.bind(handler);
    c.csrr(tp, csr::kMcycle);
    c.sw(tp, int32_t(guest.symbol("irq_mbox").address - kGlobalPointer), gp);
    c.lw(tp, int32_t(guest.symbol("irq_count").address - kGlobalPointer), gp);
    c.addi(tp, tp, 1);
    c.sw(tp, int32_t(guest.symbol("irq_count").address - kGlobalPointer), gp);
    c.csrw(csr::kMip, zero);
    c.mret();

    return guest.finish(std::move(resultSymbol), std::move(expected));
  }


  GuestProgram
  emitIrqSweep(Configuration config, const BigUint& a, const BigUint& b,
               std::string name)
  {
    if (config == Configuration::BA)
      throw ConfigError("interrupt sweeps measure MMUL and need CI-AE or CI-PE");
    const FieldContext ctx = FieldContext::make(p256Prime(), 8);
    GuestBuilder guest(std::move(name), config);
    guest.allocate("a", ctx.words, a);
    guest.allocate("b", ctx.words, b);
    guest.allocate("n", ctx.words, ctx.modulus);
    guest.allocate("p", ctx.words);
    return emitInterruptHarness(
      guest,
      [&](GuestBuilder& g) {
        if (config == Configuration::CIAE)
          emitMmulAtomic(g, ctx, "a", "b", "n", "p");
        else
          emitMmulPartialUnrolled(g, ctx, "a", "b", "n", "p");
      },
      "p", ctx.montMul(a, b));
  }


  namespace
  {
    BigUint
    input(const GuestInputs& inputs, const std::string& key, const char* fallbackHex)
    {
      auto it = inputs.find(key);
      return it != inputs.end() ? it->second : BigUint::fromHex(fallbackHex);
    }

    constexpr const char* kDefaultA =
      "6b17d1f2e12c4247f8bce6e563a440f277037d812deb33a0f4a13945d898c296";
    constexpr const char* kDefaultB =
      "4fe342e2fe1a7f9b8ee7eb4a7c0f9e162bce33576b315ececbb6406837bf51f5";
    constexpr const char* kDefaultScalar =
      "5ac99f33632e5a768de7e81bf854c27c46e3fbf2abbacd29ec4aff517369c660";

    GuestProgram
    modexpGuest(const char* name, const BigUint& modulus, unsigned words,
                Configuration config, const GuestInputs& in)
    {
      FieldContext ctx = FieldContext::make(modulus, words);
      ModexpInputs mi{input(in, "base", kDefaultA) % modulus,
                      input(in, "exp", kDefaultB)};
      if (mi.exponent.bitLength() > ctx.nBits())
        mi.exponent = mi.exponent % BigUint::powerOfTwo(ctx.nBits());
      return emitModexp(ctx, config, mi, ctx.nBits(), name);
    }
  }


  const std::vector<GuestInfo>&
  guestCatalog()
  {
    static const std::vector<GuestInfo> catalog = {
      {"montmul", "one Montgomery multiplication mod 2^255-19", std::nullopt,
       {"a", "b", "n"},
       [](Configuration config, const GuestInputs& in) {
         BigUint n = input(in, "n", "7fffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffed");
         FieldContext ctx = FieldContext::make(n);
         BigUint bound = BigUint::powerOfTwo(ctx.nBits());
         return emitMontmul(ctx, config, input(in, "a", kDefaultA) % bound,
                            input(in, "b", kDefaultB) % n);
       }},
      {"modexp128", "base^exp mod 2^127-1, 128-bit exponent", std::nullopt,
       {"base", "exp"},
       [](Configuration config, const GuestInputs& in) {
         return modexpGuest("modexp128", BigUint::powerOfTwo(127) - BigUint(1), 4,
                            config, in);
       }},
      {"modexp256", "base^exp mod the P-256 prime, 256-bit exponent", std::nullopt,
       {"base", "exp"},
       [](Configuration config, const GuestInputs& in) {
         return modexpGuest("modexp256", p256Prime(), 8, config, in);
       }},
      {"x25519_ladder", "255-step x-only ladder on Curve25519", std::nullopt,
       {"scalar", "u"},
       [](Configuration config, const GuestInputs& in) {
         BigUint scalar = input(in, "scalar", kDefaultScalar);
         scalar = scalar % BigUint::powerOfTwo(255);
         return emitLadderX25519(config, scalar, input(in, "u", "9") % curve25519Prime());
       }},
      {"irq_sweep_atomic", "one atomic 256-bit MMUL under the interrupt harness",
       Configuration::CIAE, {"a", "b"},
       [](Configuration config, const GuestInputs& in) {
         return emitIrqSweep(config, input(in, "a", kDefaultA) % p256Prime(),
                             input(in, "b", kDefaultB) % p256Prime(), "irq_sweep_atomic");
       }},
      {"irq_sweep_partial", "one partial-mode 256-bit MMUL under the interrupt harness",
       Configuration::CIPE, {"a", "b"},
       [](Configuration config, const GuestInputs& in) {
         return emitIrqSweep(config, input(in, "a", kDefaultA) % p256Prime(),
                             input(in, "b", kDefaultB) % p256Prime(), "irq_sweep_partial");
       }},
    };
    return catalog;
  }


  GuestProgram
  buildGuest(std::string_view name, Configuration config, const GuestInputs& inputs)
  {
    for (const GuestInfo& info : guestCatalog())
      {
        if (info.name != name)
          continue;
        if (info.requiredConfig && *info.requiredConfig != config)
          throw ConfigError("guest " + info.name + " runs only under "
                            + std::string(configurationName(*info.requiredConfig)));
        for (const auto& [key, value] : inputs)
          if (std::find(info.inputNames.begin(), info.inputNames.end(), key)
              == info.inputNames.end())
            throw ConfigError("guest " + info.name + " has no input '" + key + "'");
        return info.build(config, inputs);
      }
    throw GuestNotFound(std::string(name));
  }

}
