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
#include <stdexcept>
#include <string>

namespace mmulrv
{

  /// Base class of every error raised by the simulator library.
  class SimError : public std::runtime_error
  {
  public:
    using std::runtime_error::runtime_error;
  };

  /// Misuse of the host-side API or an invalid run configuration.
  class ConfigError : public SimError
  {
  public:
    using SimError::SimError;
  };

  /// Architectural memory fault raised by the load/store unit.
  class MemoryFault : public SimError
  {
  public:
    enum Kind { UnmappedAddress, MisalignedAccess };

    MemoryFault(Kind kind, uint32_t address, bool isStore);

    Kind kind() const
    { return kind_; }

    uint32_t address() const
    { return address_; }

    bool isStore() const
    { return isStore_; }

  private:
    Kind kind_;
    uint32_t address_;
    bool isStore_;
  };

  /// Instruction word that does not decode under RV32EC + MMUL.
  class IllegalInstruction : public SimError
  {
  public:
    IllegalInstruction(uint32_t bits, const std::string& why);

    uint32_t bits() const
    { return bits_; }

  private:
    uint32_t bits_;
  };

  /// Access to a CSR address the machine does not implement, or a write
  /// to a read-only CSR.
  class CsrFault : public SimError
  {
  public:
    CsrFault(uint16_t csr, const std::string& why);

    uint16_t csr() const
    { return csr_; }

  private:
    uint16_t csr_;
  };

}
