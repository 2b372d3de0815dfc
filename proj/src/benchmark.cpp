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
#include "mmulrv/machine.hpp"

#include <json.hpp>

#include <charconv>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>

namespace mmulrv
{

  SweepSpec
  SweepSpec::parse(std::string_view text)
  {
    std::vector<uint64_t> parts;
    size_t pos = 0;
    while (true)
      {
        size_t colon = text.find(':', pos);
        std::string_view piece = text.substr(pos, colon == std::string_view::npos
                                             ? std::string_view::npos : colon - pos);
        uint64_t value = 0;
        auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), value);
        if (piece.empty() || ec != std::errc() || ptr != piece.data() + piece.size())
          throw InvalidConfig("bad sweep '" + std::string(text) + "', expected start:end:step");
        parts.push_back(value);
        if (colon == std::string_view::npos)
          break;
        pos = colon + 1;
      }
    if (parts.size() < 2 || parts.size() > 3)
      throw InvalidConfig("bad sweep '" + std::string(text) + "', expected start:end:step");
    SweepSpec s{parts[0], parts[1], parts.size() == 3 ? parts[2] : 1};
    if (s.step == 0 || s.end < s.start)
      throw InvalidConfig("sweep needs step > 0 and start <= end");
    return s;
  }


  std::vector<uint64_t>
  SweepSpec::points() const
  {
    std::vector<uint64_t> out;
    for (uint64_t t = start; t < end; t += step)
      out.push_back(t);
    return out;
  }


  void
  RunConfig::validate() const
  {
    if (guest.empty())
      throw InvalidConfig("no guest selected");
    if (maxWords < 1 || maxWords > 32)
      throw InvalidConfig("max words must be in 1..32");
    if (readLatency < 1 || writeLatency < 1)
      throw InvalidConfig("memory latencies must be at least one cycle");
    if (cycleBudget == 0)
      throw InvalidConfig("cycle budget must be positive");
    if (sweep && !interrupts.empty())
      throw InvalidConfig("use either --irq or --sweep, not both");
  }


  MachineConfig
  RunConfig::machineConfig() const
  {
    MachineConfig mc;
    mc.maxWords = maxWords;
    mc.readLatency = readLatency;
    mc.writeLatency = writeLatency;
    return mc;
  }


  int
  RunReport::exitStatus() const
  {
    switch (reason)
      {
      case StopReason::Trapped:
        return exit_status::kTrapped;
      case StopReason::CycleBudgetExhausted:
        return exit_status::kBudgetExhausted;
      case StopReason::Halted:
      case StopReason::PcSentinel:
        break;
      }
    return result && !resultOk ? exit_status::kWrongResult : exit_status::kOk;
  }


  RunReport
  runSingle(const RunConfig& cfg, const std::vector<uint64_t>& interrupts,
            const PowerModel& model)
  {
    cfg.validate();
    GuestProgram guest = buildGuest(cfg.guest, cfg.config, cfg.inputs);
    Machine machine(cfg.machineConfig());
    guest.loadInto(machine);
    Core core(machine);
    RunOptions options;
    options.cycleBudget = cfg.cycleBudget;
    options.interruptSchedule = interrupts;
    RunResult result = core.run(options);

    RunReport report;
    report.guest = cfg.guest;
    report.config = cfg.config;
    report.maxWords = cfg.maxWords;
    report.readLatency = cfg.readLatency;
    report.writeLatency = cfg.writeLatency;
    report.reason = result.reason;
    report.trap = result.trap;
    report.stats = result.stats;
    report.energy = estimateEnergy(result.stats, model, cfg.config);
    if (!guest.resultSymbol.empty())
      {
        report.result = guest.readSymbol(machine, guest.resultSymbol).toHex();
        report.resultOk = result.reason == StopReason::Halted && guest.resultMatches(machine);
      }
    return report;
  }


  RunConfig
  baselineFor(const RunConfig& cfg)
  {
    RunConfig base = cfg;
    base.config = Configuration::BA;
    base.interrupts.clear();
    base.sweep.reset();
    if (cfg.guest == "irq_sweep_atomic" || cfg.guest == "irq_sweep_partial")
      {
        // Same multiplication without the harness, in software.
        base.guest = "montmul";
        base.inputs["n"] = p256Prime();
      }
    return base;
  }


  namespace
  {
    std::string
    cacheKey(const RunConfig& cfg)
    {
      std::ostringstream os;
      os << cfg.guest << '|' << int(cfg.config) << '|' << cfg.maxWords << '|'
         << cfg.readLatency << '|' << cfg.writeLatency << '|' << cfg.cycleBudget;
      for (const auto& [k, v] : cfg.inputs)
        os << '|' << k << '=' << v.toHex();
      return os.str();
    }

    /// Deterministic runs make the cache exact; it only saves time.
    RunReport
    cachedBaseline(const RunConfig& cfg, const PowerModel& model)
    {
      static std::mutex mutex;
      static std::map<std::string, RunReport> cache;
      RunConfig base = baselineFor(cfg);
      std::string key = cacheKey(base);
      {
        std::lock_guard lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end())
          return it->second;
      }
      RunReport report = runSingle(base, {}, model);
      std::lock_guard lock(mutex);
      cache.emplace(key, report);
      return report;
    }
  }


  RunReport
  runBenchmark(const RunConfig& cfg, const PowerModel& model)
  {
    cfg.validate();
    RunReport report;
    if (cfg.sweep)
      {
        report = runSingle(cfg, {}, model);
        for (uint64_t t : cfg.sweep->points())
          {
            RunReport point = runSingle(cfg, {t}, model);
            ++report.sweepRuns;
            for (const InterruptLatency& l : point.stats.interruptLatencies)
              report.stats.interruptLatencies.push_back(l);
            if (point.reason != StopReason::Halted)
              {
                report.reason = point.reason;
                report.trap = point.trap;
              }
            if (point.result && !point.resultOk)
              report.resultOk = false;
          }
      }
    else
      report = runSingle(cfg, cfg.interrupts, model);

    if (report.reason != StopReason::Halted && report.reason != StopReason::PcSentinel)
      return report;
    RunReport base = cfg.config == Configuration::BA && !cfg.sweep && cfg.interrupts.empty()
      ? report : cachedBaseline(cfg, model);
    if (base.reason != StopReason::Halted)
      throw SimError("BA reference run did not halt: "
                     + std::string(stopReasonName(base.reason)));
    report.baselineCycles = base.stats.totalCycles;
    report.normalizedEnergy = normalizedEnergy(report.energy, &base.energy);
    return report;
  }


  Comparison
  compare(const std::vector<RunConfig>& cfgs, const PowerModel& model)
  {
    if (cfgs.empty())
      throw InvalidConfig("compare needs at least one configuration");
    for (const RunConfig& c : cfgs)
      if (c.guest != cfgs.front().guest || c.inputs != cfgs.front().inputs)
        throw MismatchedWorkloads("compare needs one guest and one input set, got "
                                  + cfgs.front().guest + " and " + c.guest);

    Comparison out;
    out.guest = cfgs.front().guest;
    for (const RunConfig& c : cfgs)
      {
        RunConfig plain = c;
        plain.interrupts.clear();
        plain.sweep.reset();
        out.rows.push_back({plain, runBenchmark(plain, model)});
      }
    out.referenceRow = 0;
    for (size_t i = 0; i < out.rows.size(); ++i)
      if (out.rows[i].cfg.config == Configuration::BA)
        {
          out.referenceRow = i;
          break;
        }
    const CompareRow& ref = out.rows[out.referenceRow];
    for (CompareRow& row : out.rows)
      {
        row.speedup = double(ref.report.stats.totalCycles)
          / double(row.report.stats.totalCycles);
        row.normalizedEnergy = normalizedEnergy(row.report.energy, &ref.report.energy);
        row.latencySensitivity = row.cfg.config == ref.cfg.config
          && (row.cfg.readLatency != ref.cfg.readLatency
              || row.cfg.writeLatency != ref.cfg.writeLatency);
      }
    return out;
  }


  namespace
  {
    using nlohmann::ordered_json;

    ordered_json
    toJson(const RunReport& r)
    {
      ordered_json j;
      j["guest"] = r.guest;
      j["config"] = std::string(configurationName(r.config));
      j["max_words"] = r.maxWords;
      j["read_latency"] = r.readLatency;
      j["write_latency"] = r.writeLatency;
      j["stop_reason"] = stopReasonName(r.reason);
      if (r.trap)
        j["trap"] = {{"cause", r.trap->cause}, {"tval", r.trap->tval},
                     {"pc", r.trap->pc}, {"detail", r.trap->detail}};
      j["total_cycles"] = r.stats.totalCycles;
      j["retired"] = r.stats.retiredInstructions;
      j["mem_reads"] = r.stats.memReads;
      j["mem_writes"] = r.stats.memWrites;
      ordered_json active;
      for (Module m : kModules)
        active[std::string(moduleName(m))] = r.stats.active(m);
      j["module_active_cycles"] = active;
      j["mmul_invocations"] = r.stats.mmulInvocations;
      j["mmul_engine_cycles"] = r.stats.mmulEngineCycles;
      ordered_json lat = ordered_json::array();
      for (const InterruptLatency& l : r.stats.interruptLatencies)
        lat.push_back({{"assert_cycle", l.assertCycle}, {"service_cycle", l.serviceCycle}});
      j["interrupt_latencies"] = lat;
      if (!r.stats.interruptLatencies.empty())
        {
          LatencyReport lr = interruptLatencyReport(r.stats.interruptLatencies);
          j["interrupt_latency_max"] = lr.max;
          j["interrupt_latency_min"] = lr.min;
        }
      if (r.sweepRuns)
        j["sweep_runs"] = r.sweepRuns;
      j["avg_power_watts"] = r.energy.avgPowerWatts;
      j["energy"] = r.energy.energy;
      j["baseline_cycles"] = r.baselineCycles;
      if (r.normalizedEnergy)
        j["normalized_energy"] = *r.normalizedEnergy;
      else
        j["normalized_energy"] = nullptr;
      if (r.result)
        {
          j["result"] = *r.result;
          j["result_ok"] = r.resultOk;
        }
      return j;
    }

    std::string
    fixed(double v, int digits)
    {
      std::ostringstream os;
      os << std::fixed << std::setprecision(digits) << v;
      return os.str();
    }
  }


  std::string
  reportJson(const RunReport& report)
  {
    return toJson(report).dump(2) + "\n";
  }


  std::string
  reportTable(const RunReport& r)
  {
    std::ostringstream os;
    auto row = [&](const std::string& k, const std::string& v) {
      os << std::left << std::setw(24) << k << v << "\n";
    };
    row("guest", r.guest);
    row("config", std::string(configurationName(r.config)));
    row("stop reason", stopReasonName(r.reason));
    if (r.trap)
      row("trap", r.trap->detail);
    row("total cycles", std::to_string(r.stats.totalCycles));
    row("retired", std::to_string(r.stats.retiredInstructions));
    row("mem reads / writes", std::to_string(r.stats.memReads) + " / "
        + std::to_string(r.stats.memWrites));
    row("mmul invocations", std::to_string(r.stats.mmulInvocations));
    for (Module m : kModules)
      row("active " + std::string(moduleName(m)),
          std::to_string(r.stats.active(m)) + "  (duty " + fixed(r.stats.duty(m), 3) + ")");
    row("avg power [W]", fixed(r.energy.avgPowerWatts, 4));
    row("normalized energy",
        r.normalizedEnergy ? fixed(*r.normalizedEnergy, 4) : std::string("n/a"));
    if (!r.stats.interruptLatencies.empty())
      {
        LatencyReport lr = interruptLatencyReport(r.stats.interruptLatencies);
        row("interrupts serviced", std::to_string(lr.count));
        row("latency min/mean/max", std::to_string(lr.min) + " / " + fixed(lr.mean, 1)
            + " / " + std::to_string(lr.max));
      }
    if (r.result)
      row("result", *r.result + (r.resultOk ? "  (ok)" : "  (MISMATCH)"));
    return os.str();
  }


  std::string
  comparisonJson(const Comparison& c)
  {
    ordered_json j;
    j["guest"] = c.guest;
    j["reference"] = c.referenceRow;
    ordered_json rows = ordered_json::array();
    for (const CompareRow& row : c.rows)
      {
        ordered_json r = toJson(row.report);
        r["speedup"] = row.speedup;
        r["normalized_energy"] = row.normalizedEnergy;
        r["latency_sensitivity"] = row.latencySensitivity;
        rows.push_back(r);
      }
    j["rows"] = rows;
    return j.dump(2) + "\n";
  }


  std::string
  comparisonTable(const Comparison& c)
  {
    std::ostringstream os;
    std::vector<std::string> headers;
    for (const CompareRow& row : c.rows)
      {
        std::string h(configurationName(row.cfg.config));
        if (row.latencySensitivity)
          h += " rl" + std::to_string(row.cfg.readLatency) + "/wl"
            + std::to_string(row.cfg.writeLatency) + "*";
        headers.push_back(h);
      }
    os << std::left << std::setw(20) << c.guest;
    for (const std::string& h : headers)
      os << std::right << std::setw(16) << h;
    os << "\n";
    auto line = [&](const char* label, auto value) {
      os << std::left << std::setw(20) << label;
      for (const CompareRow& row : c.rows)
        os << std::right << std::setw(16) << value(row);
      os << "\n";
    };
    line("cycles", [](const CompareRow& r) { return std::to_string(r.report.stats.totalCycles); });
    line("speedup", [](const CompareRow& r) { return fixed(r.speedup, 2); });
    line("avg power [W]", [](const CompareRow& r) { return fixed(r.report.energy.avgPowerWatts, 4); });
    line("norm. energy", [](const CompareRow& r) { return fixed(r.normalizedEnergy, 4); });
    line("result", [](const CompareRow& r) {
      return std::string(r.report.result ? (r.report.resultOk ? "ok" : "MISMATCH") : "-");
    });
    bool flagged = false;
    for (const CompareRow& row : c.rows)
      flagged |= row.latencySensitivity;
    if (flagged)
      os << "* latency-sensitivity row: same configuration, different memory latency\n";
    return os.str();
  }

}
