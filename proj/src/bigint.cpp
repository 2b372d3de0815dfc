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

#include "mmulrv/bigint.hpp"
#include "mmulrv/error.hpp"

#include <algorithm>
#include <bit>

namespace mmulrv
{

  BigUint::BigUint(uint64_t value)
  {
    if (value)
      limbs_.push_back(uint32_t(value));
    if (value >> 32)
      limbs_.push_back(uint32_t(value >> 32));
  }


  void
  BigUint::trim()
  {
    while (!limbs_.empty() && limbs_.back() == 0)
      limbs_.pop_back();
  }


  BigUint
  BigUint::fromHex(std::string_view text)
  {
    if (text.starts_with("0x") || text.starts_with("0X"))
      text.remove_prefix(2);
    if (text.empty())
      throw ConfigError("empty hexadecimal literal");

    BigUint result;
    unsigned shift = 0;
    for (auto it = text.rbegin(); it != text.rend(); ++it)
      {
        char c = *it;
        uint32_t digit;
        if (c == '_')
          continue;
        if (c >= '0' && c <= '9')
          digit = c - '0';
        else if (c >= 'a' && c <= 'f')
          digit = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F')
          digit = c - 'A' + 10;
        else
          throw ConfigError("invalid hexadecimal digit '" + std::string(1, c) + "'");
        if (shift / 32 >= result.limbs_.size())
          result.limbs_.push_back(0);
        result.limbs_[shift / 32] |= digit << (shift % 32);
        shift += 4;
      }
    result.trim();
    return result;
  }


  BigUint
  BigUint::fromWords(std::span<const uint32_t> words)
  {
    BigUint result;
    result.limbs_.assign(words.begin(), words.end());
    result.trim();
    return result;
  }


  BigUint
  BigUint::powerOfTwo(unsigned exponent)
  {
    BigUint result;
    result.limbs_.assign(exponent / 32 + 1, 0);
    result.limbs_.back() = uint32_t(1) << (exponent % 32);
    return result;
  }


  BigUint
  BigUint::randomBits(std::mt19937_64& rng, unsigned bits)
  {
    BigUint result;
    result.limbs_.resize((bits + 31) / 32);
    for (auto& limb : result.limbs_)
      limb = uint32_t(rng());
    if (bits % 32)
      result.limbs_.back() &= (uint32_t(1) << (bits % 32)) - 1;
    result.trim();
    return result;
  }


  BigUint
  BigUint::randomBelow(std::mt19937_64& rng, const BigUint& bound)
  {
    if (bound.isZero())
      throw ConfigError("randomBelow: zero bound");
    unsigned bits = unsigned(bound.bitLength());
    while (true)
      {
        BigUint candidate = randomBits(rng, bits);
        if (candidate < bound)
          return candidate;
      }
  }


  std::string
  BigUint::toHex() const
  {
    static const char digits[] = "0123456789abcdef";
    if (limbs_.empty())
      return "0x0";
    std::string out;
    for (auto it = limbs_.rbegin(); it != limbs_.rend(); ++it)
      for (int nibble = 7; nibble >= 0; --nibble)
        out.push_back(digits[(*it >> (4 * nibble)) & 0xf]);
    out.erase(0, std::min(out.find_first_not_of('0'), out.size() - 1));
    return "0x" + out;
  }


  std::vector<uint32_t>
  BigUint::toWords(size_t count) const
  {
    if (limbs_.size() > count)
      throw ConfigError("value " + toHex() + " does not fit in "
                        + std::to_string(count) + " words");
    std::vector<uint32_t> out(limbs_);
    out.resize(count, 0);
    return out;
  }


  uint64_t
  BigUint::toU64() const
  {
    if (limbs_.size() > 2)
      throw ConfigError("value " + toHex() + " exceeds 64 bits");
    uint64_t value = 0;
    for (size_t i = 0; i < limbs_.size(); ++i)
      value |= uint64_t(limbs_[i]) << (32 * i);
    return value;
  }


  size_t
  BigUint::bitLength() const
  {
    if (limbs_.empty())
      return 0;
    return 32 * limbs_.size() - std::countl_zero(limbs_.back());
  }


  bool
  BigUint::bit(size_t index) const
  {
    size_t limb = index / 32;
    return limb < limbs_.size() && ((limbs_[limb] >> (index % 32)) & 1);
  }


  BigUint&
  BigUint::operator+=(const BigUint& other)
  {
    if (other.limbs_.size() > limbs_.size())
      limbs_.resize(other.limbs_.size(), 0);
    uint64_t carry = 0;
    for (size_t i = 0; i < limbs_.size(); ++i)
      {
        uint64_t sum = uint64_t(limbs_[i]) + carry;
        if (i < other.limbs_.size())
          sum += other.limbs_[i];
        limbs_[i] = uint32_t(sum);
        carry = sum >> 32;
      }
    if (carry)
      limbs_.push_back(uint32_t(carry));
    return *this;
  }


  BigUint&
  BigUint::operator-=(const BigUint& other)
  {
    if (*this < other)
      throw ConfigError("BigUint subtraction underflow");
    int64_t borrow = 0;
    for (size_t i = 0; i < limbs_.size(); ++i)
      {
        int64_t diff = int64_t(limbs_[i]) - borrow;
        if (i < other.limbs_.size())
          diff -= other.limbs_[i];
        borrow = diff < 0;
        limbs_[i] = uint32_t(diff + (borrow << 32));
      }
    trim();
    return *this;
  }


  BigUint&
  BigUint::operator<<=(unsigned shift)
  {
    if (limbs_.empty())
      return *this;
    unsigned limbShift = shift / 32, bitShift = shift % 32;
    limbs_.insert(limbs_.begin(), limbShift, 0);
    if (bitShift)
      {
        uint32_t carry = 0;
        for (size_t i = limbShift; i < limbs_.size(); ++i)
          {
            uint32_t next = limbs_[i] >> (32 - bitShift);
            limbs_[i] = (limbs_[i] << bitShift) | carry;
            carry = next;
          }
        if (carry)
          limbs_.push_back(carry);
      }
    return *this;
  }


  BigUint&
  BigUint::operator>>=(unsigned shift)
  {
    unsigned limbShift = shift / 32, bitShift = shift % 32;
    if (limbShift >= limbs_.size())
      {
        limbs_.clear();
        return *this;
      }
    limbs_.erase(limbs_.begin(), limbs_.begin() + limbShift);
    if (bitShift)
      {
        for (size_t i = 0; i < limbs_.size(); ++i)
          {
            uint32_t high = i + 1 < limbs_.size() ? limbs_[i + 1] : 0;
            limbs_[i] = (limbs_[i] >> bitShift) | (high << (32 - bitShift));
          }
      }
    trim();
    return *this;
  }


  BigUint
  operator*(const BigUint& a, const BigUint& b)
  {
    BigUint result;
    if (a.isZero() || b.isZero())
      return result;
    result.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
    for (size_t i = 0; i < a.limbs_.size(); ++i)
      {
        uint64_t carry = 0;
        for (size_t j = 0; j < b.limbs_.size(); ++j)
          {
            uint64_t t = uint64_t(a.limbs_[i]) * b.limbs_[j]
              + result.limbs_[i + j] + carry;
            result.limbs_[i + j] = uint32_t(t);
            carry = t >> 32;
          }
        result.limbs_[i + b.limbs_.size()] = uint32_t(carry);
      }
    result.trim();
    return result;
  }


  std::strong_ordering
  operator<=>(const BigUint& a, const BigUint& b)
  {
    if (a.limbs_.size() != b.limbs_.size())
      return a.limbs_.size() <=> b.limbs_.size();
    for (size_t i = a.limbs_.size(); i-- > 0;)
      if (a.limbs_[i] != b.limbs_[i])
        return a.limbs_[i] <=> b.limbs_[i];
    return std::strong_ordering::equal;
  }


  void
  BigUint::divMod(const BigUint& num, const BigUint& den,
                  BigUint& quot, BigUint& rem)
  {
    if (den.isZero())
      throw ConfigError("BigUint division by zero");

    // Restoring binary long division.
    BigUint q, r;
    size_t bits = num.bitLength();
    q.limbs_.assign((bits + 31) / 32, 0);
    for (size_t i = bits; i-- > 0;)
      {
        r <<= 1;
        if (num.bit(i))
          {
            if (r.limbs_.empty())
              r.limbs_.push_back(1);
            else
              r.limbs_[0] |= 1;
          }
        if (r >= den)
          {
            r -= den;
            q.limbs_[i / 32] |= uint32_t(1) << (i % 32);
          }
      }
    q.trim();
    quot = std::move(q);
    rem = std::move(r);
  }


  BigUint
  operator/(const BigUint& a, const BigUint& b)
  {
    BigUint q, r;
    BigUint::divMod(a, b, q, r);
    return q;
  }


  BigUint
  operator%(const BigUint& a, const BigUint& b)
  {
    BigUint q, r;
    BigUint::divMod(a, b, q, r);
    return r;
  }


  BigUint
  mulMod(const BigUint& a, const BigUint& b, const BigUint& mod)
  {
    return (a * b) % mod;
  }


  BigUint
  powMod(const BigUint& base, const BigUint& exp, const BigUint& mod)
  {
    BigUint result = BigUint(1) % mod;
    BigUint square = base % mod;
    size_t bits = exp.bitLength();
    for (size_t i = 0; i < bits; ++i)
      {
        if (exp.bit(i))
          result = mulMod(result, square, mod);
        if (i + 1 < bits)
          square = mulMod(square, square, mod);
      }
    return result;
  }

}
