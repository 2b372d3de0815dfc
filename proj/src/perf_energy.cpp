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

#include "mmulrv/perf_energy.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <string>

namespace mmulrv
{

  std::string_view
  moduleName(Module module)
  {
    switch (module)
      {
      case Module::Fetch:   return "fetch";
      case Module::Decode:  return "decode";
      case Module::Alu:     return "alu";
      case Module::RegFile: return "regfile";
      case Module::Mmul:    return "mmul";
      }
    return "?";
  }


  std::string_view
  configurationName(Configuration config)
  {
    switch (config)
      {
      case Configuration::BA:   return "BA";
      case Configuration::CIAE: return "CI-AE";
      case Configuration::CIPE: return "CI-PE";
      }
    return "?";
  }


  Configuration
  parseConfiguration(std::string_view text)
  {
    std::string key;
    for (char c : text)
      if (c != '-' && c != '_')
        key.push_back(char(std::toupper(static_cast<unsigned char>(c))));
    if (key == "BA")
      return Configuration::BA;
    if (key == "CIAE")
      return Configuration::CIAE;
    if (key == "CIPE")
      return Configuration::CIPE;
    throw ConfigError("unknown configuration '" + std::string(text)
                      + "' (expected BA, CI-AE or CI-PE)");
  }


  void
  recordActivity(RunStats& stats, Module module, uint64_t cycles)
  {
    stats.activeCycles[size_t(module)] += cycles;
  }


  PowerModel
  PowerModel::defaults()
  {
    PowerModel m;
    //                  BA     CI-AE  CI-PE
    m.staticWatts =          {0.107, 0.105, 0.106};
    m.measuredDynamicWatts = {0.154, 0.064, 0.120};
    m.measuredTotalWatts =   {0.261, 0.170, 0.226};
    //                fetch  decode alu    regfile mmul
    m.moduleWatts = {{{0.058, 0.014, 0.031, 0.012, 0.000},    // BA
                      {0.002, 0.001, 0.001, 0.002, 0.054},    // CI-AE
                      {0.026, 0.006, 0.008, 0.003, 0.053}}};  // CI-PE
    return m;
  }


  double
  PowerModel::moduleSum(Configuration c) const
  {
    const auto& row = moduleWatts[size_t(c)];
    return std::accumulate(row.begin(), row.end(), 0.0);
  }


  double
  PowerModel::unattributedPower(Configuration c) const
  {
    return std::max(0.0, measuredDynamicWatts[size_t(c)] - moduleSum(c));
  }


  void
  PowerModel::validate() const
  {
    auto check = [](double w) {
      if (w < 0)
        throw ConfigError("power model entries must be non-negative");
    };
    for (size_t c = 0; c < kConfigurations.size(); ++c)
      {
        check(staticWatts[c]);
        check(measuredDynamicWatts[c]);
        check(measuredTotalWatts[c]);
        for (double w : moduleWatts[c])
          check(w);
      }
  }


  EnergyEstimate
  estimateFromDuty(std::span<const double, kModules.size()> duty,
                   const PowerModel& model, Configuration config)
  {
    EnergyEstimate e;
    e.config = config;
    e.staticWatts = model.staticPower(config);
    for (Module m : kModules)
      {
        double d = std::clamp(duty[size_t(m)], 0.0, 1.0);
        e.moduleWatts[size_t(m)] = model.modulePower(config, m) * d;
        e.moduleDynamicWatts += e.moduleWatts[size_t(m)];
      }
    e.unattributedWatts = model.unattributedPower(config);
    e.avgPowerWatts = e.staticWatts + e.moduleDynamicWatts + e.unattributedWatts;
    return e;
  }


  EnergyEstimate
  estimateEnergy(const RunStats& stats, const PowerModel& model,
                 Configuration config)
  {
    std::array<double, kModules.size()> duty{};
    for (Module m : kModules)
      duty[size_t(m)] = stats.duty(m);
    EnergyEstimate e = estimateFromDuty(duty, model, config);
    e.totalCycles = stats.totalCycles;
    e.energy = e.avgPowerWatts * double(stats.totalCycles);
    return e;
  }


  double
  normalizedEnergy(const EnergyEstimate& run, const EnergyEstimate* baseline)
  {
    if (!baseline || baseline->energy <= 0)
      throw MissingReferenceRun();
    return run.energy / baseline->energy;
  }


  LatencyReport
  interruptLatencyReport(std::span<const InterruptLatency> latencies)
  {
    if (latencies.empty())
      throw NoInterruptsRecorded();

    LatencyReport r;
    r.count = latencies.size();
    r.min = UINT64_MAX;
    double sum = 0;
    for (const auto& l : latencies)
      {
        uint64_t v = l.latency();
        r.min = std::min(r.min, v);
        r.max = std::max(r.max, v);
        sum += double(v);
        ++r.histogram[v];
      }
    r.mean = sum / double(r.count);
    return r;
  }

}
