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

#include "mmulrv/benchmark.hpp"
#include "mmulrv/isa.hpp"
#include "mmulrv/machine.hpp"
#include "mmulrv/mmul_encoding.hpp"
#include "mmulrv/mmul_engine.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace mmulrv;

namespace
{

  struct CommonOptions
  {
    std::string guest;
    std::string config;
    unsigned words = 8;
    unsigned readLatency = 1;
    unsigned writeLatency = 1;
    uint64_t budget = 2'000'000'000;
    std::string format = "table";
    std::string out;
    std::vector<std::string> inputs;
  };


  void
  addCommon(CLI::App* app, CommonOptions& o)
  {
    app->add_option("--guest", o.guest, "Guest program name")->required();
    app->add_option("--words", o.words, "MMUL hardware operand limit in words")
      ->check(CLI::Range(1, 32));
    app->add_option("--read-latency", o.readLatency, "Memory read latency in cycles")
      ->check(CLI::Range(1, 1000));
    app->add_option("--write-latency", o.writeLatency, "Memory write latency in cycles")
      ->check(CLI::Range(1, 1000));
    app->add_option("--budget", o.budget, "Cycle budget");
    app->add_option("--format", o.format, "Report format")
      ->check(CLI::IsMember({"json", "table"}));
    app->add_option("--out", o.out, "Write the report to a file");
    app->add_option("--input", o.inputs, "Guest input name=hex (repeatable)");
  }


  GuestInputs
  parseInputs(const std::vector<std::string>& items)
  {
    GuestInputs in;
    for (const std::string& item : items)
      {
        size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
          throw InvalidConfig("input '" + item + "' is not name=hex");
        in[item.substr(0, eq)] = BigUint::fromHex(item.substr(eq + 1));
      }
    return in;
  }


  const GuestInfo*
  findGuest(const std::string& name)
  {
    for (const GuestInfo& g : guestCatalog())
      if (g.name == name)
        return &g;
    throw GuestNotFound(name);
  }


  RunConfig
  makeConfig(const CommonOptions& o, const std::string& configText)
  {
    RunConfig cfg;
    cfg.guest = o.guest;
    const GuestInfo* info = findGuest(o.guest);
    if (!configText.empty())
      cfg.config = parseConfiguration(configText);
    else
      cfg.config = info->requiredConfig.value_or(Configuration::BA);
    cfg.inputs = parseInputs(o.inputs);
    cfg.maxWords = o.words;
    cfg.readLatency = o.readLatency;
    cfg.writeLatency = o.writeLatency;
    cfg.cycleBudget = o.budget;
    return cfg;
  }


  void
  emit(const CommonOptions& o, const std::string& text)
  {
    if (o.out.empty())
      {
        std::cout << text;
        return;
      }
    std::ofstream f(o.out);
    if (!f)
      throw InvalidConfig("cannot write " + o.out);
    f << text;
  }


  std::vector<uint64_t>
  parseCycles(const std::vector<std::string>& items)
  {
    std::vector<uint64_t> out;
    for (const std::string& item : items)
      {
        std::stringstream ss(item);
        std::string piece;
        while (std::getline(ss, piece, ','))
          {
            size_t used = 0;
            uint64_t v = std::stoull(piece, &used);
            if (used != piece.size())
              throw InvalidConfig("bad interrupt cycle '" + piece + "'");
            out.push_back(v);
          }
      }
    return out;
  }


  /// "CI-AE" or "BA@3:2" (config with read:write latency override).
  RunConfig
  parseCompareItem(const CommonOptions& o, const std::string& item)
  {
    size_t at = item.find('@');
    RunConfig cfg = makeConfig(o, item.substr(0, at));
    if (at != std::string::npos)
      {
        std::string lat = item.substr(at + 1);
        size_t colon = lat.find(':');
        try
          {
            cfg.readLatency = unsigned(std::stoul(lat.substr(0, colon)));
            cfg.writeLatency = colon == std::string::npos
              ? cfg.readLatency : unsigned(std::stoul(lat.substr(colon + 1)));
          }
        catch (const std::logic_error&)
          {
            throw InvalidConfig("bad latency override in '" + item + "'");
          }
      }
    return cfg;
  }


  int
  selftest(unsigned count)
  {
    uint64_t seed = 1;
    if (const char* env = std::getenv("MMULRV_SEED"))
      seed = std::strtoull(env, nullptr, 0);
    std::mt19937_64 rng(seed);
    unsigned failures = 0;
    auto fail = [&](const std::string& what) {
      if (failures++ < 10)
        std::cerr << "FAIL " << what << "\n";
    };

    // Engine against the defining congruence P * 2^n == A * B (mod N).
    for (unsigned words : {1u, 2u, 4u, 8u})
      for (unsigned i = 0; i < count; ++i)
        {
          unsigned nBits = 32 * words;
          BigUint n = BigUint::randomBits(rng, nBits);
          if (!n.isOdd())
            n += BigUint(1);
          if (n == BigUint(1))
            n = BigUint(3);
          BigUint a = BigUint::randomBits(rng, nBits);
          BigUint b = BigUint::randomBelow(rng, n);

          Memory mem = Memory::withDefaultLayout();
          MmulOperands ops{0x10000, 0x10100, 0x10200, 0x10300, words};
          auto put = [&](uint32_t addr, const BigUint& v) {
            std::vector<uint32_t> ws = v.toWords(words);
            for (unsigned k = 0; k < words; ++k)
              mem.pokeWord(addr + 4 * k, ws[k]);
          };
          auto get = [&](uint32_t addr) {
            std::vector<uint32_t> ws(words);
            for (unsigned k = 0; k < words; ++k)
              ws[k] = mem.peekWord(addr + 4 * k);
            return BigUint::fromWords(ws);
          };
          put(ops.addrA, a);
          put(ops.addrB, b);
          put(ops.addrN, n);
          MmulEngine engine(32);
          MmulCallReport rep = engine.executeAtomic(mem, ops);
          BigUint p = get(ops.addrP);
          if (!(p < n) || (p << nBits) % n != (a * b) % n)
            fail("atomic words=" + std::to_string(words) + " a=" + a.toHex()
                 + " b=" + b.toHex() + " n=" + n.toHex());
          if (rep.computeCycles != 2 * nBits + 1 || rep.loads != 3 * words
              || rep.stores != words)
            fail("cycle formula words=" + std::to_string(words));

          mem.pokeWord(ops.addrP, ~p.toWords(words)[0]);
          uint64_t partialCompute = 0;
          for (unsigned call = 0; call < nBits; ++call)
            partialCompute += engine.executePartialCall(mem, ops).computeCycles;
          if (get(ops.addrP) != p || partialCompute != rep.computeCycles || engine.busy())
            fail("partial equivalence words=" + std::to_string(words));
        }

    // Software guest against the MMUL guest.
    for (unsigned i = 0; i < 4; ++i)
      {
        BigUint n = BigUint::randomBits(rng, 128);
        if (!n.isOdd())
          n += BigUint(1);
        FieldContext ctx = FieldContext::make(n, 4);
        BigUint a = BigUint::randomBits(rng, 128), b = BigUint::randomBelow(rng, n);
        for (Configuration c : kConfigurations)
          {
            GuestProgram g = emitMontmul(ctx, c, a, b);
            Machine m;
            g.loadInto(m);
            Core core(m);
            RunResult r = core.run();
            if (r.reason != StopReason::Halted || !g.resultMatches(m))
              fail("guest montmul " + std::string(configurationName(c)));
          }
      }

    std::cout << "selftest seed=" << seed << " vectors=" << 4 * count
              << (failures ? " FAILED " + std::to_string(failures) : " ok") << "\n";
    return failures ? 1 : 0;
  }


  int
  encode(unsigned rd, unsigned rs1, unsigned rs2, unsigned rs3, unsigned words,
         const std::string& decodeHex)
  {
    if (!decodeHex.empty())
      {
        uint32_t word = uint32_t(std::stoul(decodeHex, nullptr, 16));
        MmulFields f = decodeR4(word);
        std::cout << "rd=x" << f.rd << " rs1=x" << f.rs1 << " rs2=x" << f.rs2
                  << " rs3=x" << f.rs3 << " words=" << f.words << "\n"
                  << disassemble(decode(word)) << "\n";
        return 0;
      }
    MmulFields f{rd, rs1, rs2, rs3, words};
    uint32_t word = encodeR4(f);
    std::ostringstream hex;
    hex << "0x" << std::hex << std::setw(8) << std::setfill('0') << word;
    std::cout << hex.str() << "\n" << insnDirective(f) << "\n"
              << disassemble(decode(word)) << "\n\n"
              << "format  length-field  unit   max operand bits (RV32 / RV64)\n";
    for (MmulFormat fmt : {MmulFormat::IType, MmulFormat::RType, MmulFormat::R4Type})
      {
        FormatCapacity c32 = capacity(fmt, 32), c64 = capacity(fmt, 64);
        std::cout << std::left << std::setw(8) << formatName(fmt) << std::setw(14)
                  << c32.lengthBitsAvailable << std::setw(7)
                  << (c32.unit == LengthUnit::Bits ? "bits" : "words")
                  << c32.maxOperandBits << " / " << c64.maxOperandBits << "\n";
      }
    return 0;
  }

}


int
main(int argc, char** argv)
{
  CLI::App app{"RV32EC + MMUL instruction-set simulator"};
  app.require_subcommand(1);

  CommonOptions runOpts;
  std::vector<std::string> irqs;
  std::string sweep;
  CLI::App* run = app.add_subcommand("run", "Run one guest under one configuration");
  addCommon(run, runOpts);
  run->add_option("--config", runOpts.config, "BA, CI-AE or CI-PE");
  run->add_option("--irq", irqs, "Interrupt assert cycles (repeatable or comma list)");
  run->add_option("--sweep", sweep, "Interrupt sweep start:end:step, one run per point");

  CommonOptions cmpOpts;
  std::vector<std::string> cmpConfigs{"BA", "CI-AE", "CI-PE"};
  CLI::App* cmp = app.add_subcommand("compare", "Speedup and normalized energy across configurations");
  addCommon(cmp, cmpOpts);
  cmp->add_option("--config", cmpConfigs,
                  "Configurations, optionally with latency override, e.g. BA@3:1")
    ->delimiter(',');

  unsigned stCount = 250;
  CLI::App* st = app.add_subcommand("selftest", "Random oracle-equivalence checks (seed from MMULRV_SEED)");
  st->add_option("--count", stCount, "Vectors per word size");

  unsigned rd = 13, rs1 = 10, rs2 = 11, rs3 = 12, words = 8;
  std::string decodeHex;
  CLI::App* enc = app.add_subcommand("encode", "Encode an R4-type MMUL and print format capacities");
  enc->add_option("--rd", rd, "P address register");
  enc->add_option("--rs1", rs1, "A address register");
  enc->add_option("--rs2", rs2, "B address register");
  enc->add_option("--rs3", rs3, "N address register");
  enc->add_option("--words", words, "Operand length in words");
  enc->add_option("--decode", decodeHex, "Decode a hex instruction word instead");

  std::string listGuest, listConfig;
  CLI::App* list = app.add_subcommand("guests", "List guests, or print one guest's listing");
  list->add_option("--guest", listGuest, "Guest to print in assembler syntax");
  list->add_option("--config", listConfig, "Configuration for the listing");

  try
    {
      app.parse(argc, argv);
    }
  catch (const CLI::ParseError& e)
    {
      int code = app.exit(e);
      return code == 0 ? 0 : exit_status::kUsage;
    }

  try
    {
      if (run->parsed())
        {
          RunConfig cfg = makeConfig(runOpts, runOpts.config);
          cfg.interrupts = parseCycles(irqs);
          if (!sweep.empty())
            cfg.sweep = SweepSpec::parse(sweep);
          RunReport report = runBenchmark(cfg);
          emit(runOpts, runOpts.format == "json" ? reportJson(report) : reportTable(report));
          return report.exitStatus();
        }
      if (cmp->parsed())
        {
          std::vector<RunConfig> cfgs;
          for (const std::string& item : cmpConfigs)
            cfgs.push_back(parseCompareItem(cmpOpts, item));
          Comparison c = compare(cfgs);
          emit(cmpOpts, cmpOpts.format == "json" ? comparisonJson(c) : comparisonTable(c));
          for (const CompareRow& row : c.rows)
            if (row.report.exitStatus() != exit_status::kOk)
              return row.report.exitStatus();
          return exit_status::kOk;
        }
      if (st->parsed())
        return selftest(stCount);
      if (enc->parsed())
        return encode(rd, rs1, rs2, rs3, words, decodeHex);
      if (list->parsed())
        {
          if (listGuest.empty())
            {
              for (const GuestInfo& g : guestCatalog())
                {
                  std::cout << std::left << std::setw(20) << g.name << g.description;
                  if (!g.inputNames.empty())
                    {
                      std::cout << "  [inputs:";
                      for (const std::string& n : g.inputNames)
                        std::cout << " " << n;
                      std::cout << "]";
                    }
                  std::cout << "\n";
                }
              return 0;
            }
          const GuestInfo* info = findGuest(listGuest);
          Configuration c = listConfig.empty()
            ? info->requiredConfig.value_or(Configuration::BA) : parseConfiguration(listConfig);
          std::cout << buildGuest(listGuest, c).listing;
          return 0;
        }
    }
  catch (const SimError& e)
    {
      std::cerr << "mmulrv: " << e.what() << "\n";
      return exit_status::kUsage;
    }
  catch (const std::exception& e)
    {
      std::cerr << "mmulrv: " << e.what() << "\n";
      return exit_status::kUsage;
    }
  return exit_status::kUsage;
}
