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

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace mmulrv
{

  /// Value returned by a load together with the cycles the access took.
  struct LoadResult
  {
    uint32_t value = 0;
    unsigned latency = 0;
  };


  /// Contiguous block of simulated memory.
  struct MemoryRegion
  {
    uint32_t base = 0;
    std::vector<uint8_t> bytes;
    unsigned readLatency = 1;
    unsigned writeLatency = 1;

    uint64_t end() const
    { return uint64_t(base) + bytes.size(); }
  };


  /// Little-endian physical memory made of one or more regions. Every
  /// data access through load/store is counted; instruction fetches and
  /// host-side peek/poke are not.
  class Memory
  {
  public:
    static constexpr uint32_t kDefaultCodeBase = 0x0;
    static constexpr uint32_t kDefaultDataBase = 0x10000;
    static constexpr uint32_t kDefaultRegionSize = 64 * 1024;

    Memory() = default;

    /// 64 KiB of code at 0x0 and 64 KiB of data at 0x10000.
    static Memory withDefaultLayout(unsigned readLatency = 1,
                                    unsigned writeLatency = 1);

    /// Add a zero-filled region. Overlapping an existing region is a
    /// ConfigError.
    void addRegion(uint32_t base, uint32_t size, unsigned readLatency = 1,
                   unsigned writeLatency = 1);

    /// Set the latencies of every region.
    void setLatencies(unsigned readLatency, unsigned writeLatency);

    LoadResult loadWord(uint32_t addr);

    unsigned storeWord(uint32_t addr, uint32_t value);

    /// Zero-extended load of 1, 2 or 4 bytes at a naturally aligned
    /// address.
    LoadResult load(uint32_t addr, unsigned size);

    unsigned store(uint32_t addr, unsigned size, uint32_t value);

    /// Instruction fetch of a halfword; uncounted.
    LoadResult fetchHalf(uint32_t addr) const;

    /// Throws MemoryFault unless [addr, addr+size) lies in one region and
    /// addr is aligned to align bytes.
    void checkAccess(uint32_t addr, uint32_t size, unsigned align,
                     bool isStore) const;

    bool isMapped(uint32_t addr, uint32_t size) const;

    /// Host-side copy into memory; uncounted.
    void loadImage(uint32_t base, std::span<const uint8_t> image);

    void loadImageFile(const std::filesystem::path& path, uint32_t base);

    uint32_t peekWord(uint32_t addr) const;

    void pokeWord(uint32_t addr, uint32_t value);

    uint64_t reads() const
    { return reads_; }

    uint64_t writes() const
    { return writes_; }

    const std::vector<MemoryRegion>& regions() const
    { return regions_; }

  private:
    const MemoryRegion* find(uint32_t addr, uint32_t size) const;

    MemoryRegion* find(uint32_t addr, uint32_t size)
    {
      return const_cast<MemoryRegion*>(std::as_const(*this).find(addr, size));
    }

    std::vector<MemoryRegion> regions_;
    uint64_t reads_ = 0;
    uint64_t writes_ = 0;
  };

}
