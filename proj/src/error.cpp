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

#include "mmulrv/error.hpp"

#include <iomanip>
#include <sstream>

namespace mmulrv
{

  namespace
  {
    std::string
    hex(uint32_t value)
    {
      std::ostringstream os;
      os << "0x" << std::hex << std::setw(8) << std::setfill('0') << value;
      return os.str();
    }
  }


  MemoryFault::MemoryFault(Kind kind, uint32_t address, bool isStore)
    : SimError(std::string(kind == UnmappedAddress ? "unmapped " : "misaligned ")
               + (isStore ? "store" : "load") + " at " + hex(address)),
      kind_(kind), address_(address), isStore_(isStore)
  { }


  IllegalInstruction::IllegalInstruction(uint32_t bits, const std::string& why)
    : SimError("illegal instruction " + hex(bits) + ": " + why), bits_(bits)
  { }


  CsrFault::CsrFault(uint16_t csr, const std::string& why)
    : SimError("csr " + hex(csr) + ": " + why), csr_(csr)
  { }

}
