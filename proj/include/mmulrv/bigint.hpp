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

#include <compare>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mmulrv
{

  /// Arbitrary-precision unsigned integer stored as little-endian 32-bit
  /// limbs. Host-side helper for preparing guest data and checking
  /// results; not used inside the simulated datapath.
  class BigUint
  {
  public:
    BigUint() = default;

    BigUint(uint64_t value);

    /// Parse hexadecimal digits with an optional 0x prefix. Underscores
    /// are accepted as digit separators.
    static BigUint fromHex(std::string_view text);

    static BigUint fromWords(std::span<const uint32_t> words);

    static BigUint powerOfTwo(unsigned exponent);

    /// Uniform value in [0, 2^bits).
    static BigUint randomBits(std::mt19937_64& rng, unsigned bits);

    /// Uniform value in [0, bound). Bound must be non-zero.
    static BigUint randomBelow(std::mt19937_64& rng, const BigUint& bound);

    std::string toHex() const;

    /// Fixed-width little-endian word image. Throws ConfigError when the
    /// value does not fit in count words.
    std::vector<uint32_t> toWords(size_t count) const;

    uint64_t toU64() const;

    size_t bitLength() const;

    bool bit(size_t index) const;

    bool isZero() const
    { return limbs_.empty(); }

    bool isOdd() const
    { return !limbs_.empty() && (limbs_[0] & 1); }

    std::span<const uint32_t> limbs() const
    { return limbs_; }

    BigUint& operator+=(const BigUint& other);
    BigUint& operator-=(const BigUint& other);
    BigUint& operator<<=(unsigned shift);
    BigUint& operator>>=(unsigned shift);

    friend BigUint operator+(BigUint a, const BigUint& b)
    { return a += b; }

    /// Throws ConfigError when b > a.
    friend BigUint operator-(BigUint a, const BigUint& b)
    { return a -= b; }

    friend BigUint operator<<(BigUint a, unsigned shift)
    { return a <<= shift; }

    friend BigUint operator>>(BigUint a, unsigned shift)
    { return a >>= shift; }

    friend BigUint operator*(const BigUint& a, const BigUint& b);
    friend BigUint operator/(const BigUint& a, const BigUint& b);
    friend BigUint operator%(const BigUint& a, const BigUint& b);

    friend bool operator==(const BigUint& a, const BigUint& b) = default;
    friend std::strong_ordering operator<=>(const BigUint& a, const BigUint& b);

    /// Quotient and remainder in one pass. Throws on division by zero.
    static void divMod(const BigUint& num, const BigUint& den,
                       BigUint& quot, BigUint& rem);

  private:
    void trim();

    std::vector<uint32_t> limbs_;
  };

  BigUint mulMod(const BigUint& a, const BigUint& b, const BigUint& mod);

  BigUint powMod(const BigUint& base, const BigUint& exp, const BigUint& mod);

}
