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

#include "mmulrv/memory.hpp"
#include "mmulrv/error.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>

namespace mmulrv
{

  Memory
  Memory::withDefaultLayout(unsigned readLatency, unsigned writeLatency)
  {
    Memory mem;
    mem.addRegion(kDefaultCodeBase, kDefaultRegionSize, readLatency, writeLatency);
    mem.addRegion(kDefaultDataBase, kDefaultRegionSize, readLatency, writeLatency);
    return mem;
  }


  void
  Memory::addRegion(uint32_t base, uint32_t size, unsigned readLatency,
                    unsigned writeLatency)
  {
    if (size == 0)
      throw ConfigError("memory region of size zero");
    uint64_t end = uint64_t(base) + size;
    if (end > (uint64_t(1) << 32))
      throw ConfigError("memory region exceeds the 32-bit address space");
    for (const auto& region : regions_)
      if (base < region.end() && region.base < end)
        throw ConfigError("overlapping memory regions");

    MemoryRegion region;
    region.base = base;
    region.bytes.assign(size, 0);
    region.readLatency = readLatency;
    region.writeLatency = writeLatency;
    regions_.push_back(std::move(region));
  }


  void
  Memory::setLatencies(unsigned readLatency, unsigned writeLatency)
  {
    for (auto& region : regions_)
      {
        region.readLatency = readLatency;
        region.writeLatency = writeLatency;
      }
  }


  const MemoryRegion*
  Memory::find(uint32_t addr, uint32_t size) const
  {
    uint64_t end = uint64_t(addr) + size;
    for (const auto& region : regions_)
      if (addr >= region.base && end <= region.end())
        return &region;
    return nullptr;
  }


  bool
  Memory::isMapped(uint32_t addr, uint32_t size) const
  {
    return find(addr, size) != nullptr;
  }


  void
  Memory::checkAccess(uint32_t addr, uint32_t size, unsigned align,
                      bool isStore) const
  {
    if (align > 1 && (addr % align) != 0)
      throw MemoryFault(MemoryFault::MisalignedAccess, addr, isStore);
    if (!find(addr, size))
      throw MemoryFault(MemoryFault::UnmappedAddress, addr, isStore);
  }


  LoadResult
  Memory::load(uint32_t addr, unsigned size)
  {
    if (addr % size)
      throw MemoryFault(MemoryFault::MisalignedAccess, addr, false);
    const MemoryRegion* region = find(addr, size);
    if (!region)
      throw MemoryFault(MemoryFault::UnmappedAddress, addr, false);

    uint32_t value = 0;
    std::memcpy(&value, region->bytes.data() + (addr - region->base), size);
    ++reads_;
    return {value, region->readLatency};
  }


  unsigned
  Memory::store(uint32_t addr, unsigned size, uint32_t value)
  {
    if (addr % size)
      throw MemoryFault(MemoryFault::MisalignedAccess, addr, true);
    MemoryRegion* region = find(addr, size);
    if (!region)
      throw MemoryFault(MemoryFault::UnmappedAddress, addr, true);

    std::memcpy(region->bytes.data() + (addr - region->base), &value, size);
    ++writes_;
    return region->writeLatency;
  }


  LoadResult
  Memory::loadWord(uint32_t addr)
  {
    return load(addr, 4);
  }


  unsigned
  Memory::storeWord(uint32_t addr, uint32_t value)
  {
    return store(addr, 4, value);
  }


  LoadResult
  Memory::fetchHalf(uint32_t addr) const
  {
    if (addr & 1)
      throw MemoryFault(MemoryFault::MisalignedAccess, addr, false);
    const MemoryRegion* region = find(addr, 2);
    if (!region)
      throw MemoryFault(MemoryFault::UnmappedAddress, addr, false);
    uint16_t half;
    std::memcpy(&half, region->bytes.data() + (addr - region->base), 2);
    return {half, region->readLatency};
  }


  void
  Memory::loadImage(uint32_t base, std::span<const uint8_t> image)
  {
    if (image.empty())
      return;
    MemoryRegion* region = find(base, uint32_t(image.size()));
    if (!region)
      throw ConfigError("image does not fit in a mapped region");
    std::copy(image.begin(), image.end(),
              region->bytes.begin() + (base - region->base));
  }


  void
  Memory::loadImageFile(const std::filesystem::path& path, uint32_t base)
  {
    std::ifstream in(path, std::ios::binary);
    if (!in)
      throw ConfigError("cannot open image " + path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    loadImage(base, bytes);
  }


  uint32_t
  Memory::peekWord(uint32_t addr) const
  {
    checkAccess(addr, 4, 4, false);
    const MemoryRegion* region = find(addr, 4);
    uint32_t value;
    std::memcpy(&value, region->bytes.data() + (addr - region->base), 4);
    return value;
  }


  void
  Memory::pokeWord(uint32_t addr, uint32_t value)
  {
    checkAccess(addr, 4, 4, true);
    MemoryRegion* region = find(addr, 4);
    std::memcpy(region->bytes.data() + (addr - region->base), &value, 4);
  }

}
