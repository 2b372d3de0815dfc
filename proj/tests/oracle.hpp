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

// Test-side reference arithmetic on GMP, independent of BigUint and of
// the R2MM recurrence.

#include "mmulrv/bigint.hpp"

#include <gmpxx.h>

#include <random>

namespace oracle
{

  inline mpz_class
  toMpz(const mmulrv::BigUint& v)
  {
    return mpz_class(v.toHex().substr(2), 16);
  }

  inline mmulrv::BigUint
  fromMpz(const mpz_class& v)
  {
    return mmulrv::BigUint::fromHex(v.get_str(16));
  }

  inline mpz_class
  pow2(unsigned bits)
  {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, bits);
    return r;
  }

  /// a * b * 2^-bits mod n through a modular inverse.
  inline mpz_class
  montProduct(const mpz_class& a, const mpz_class& b, const mpz_class& n,
              unsigned bits)
  {
    mpz_class rinv;
    mpz_class r = pow2(bits) % n;
    if (!mpz_invert(rinv.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t()))
      throw std::runtime_error("2^bits not invertible");
    mpz_class out = a * b % n * rinv % n;
    return out;
  }

  inline mpz_class
  powm(const mpz_class& b, const mpz_class& e, const mpz_class& m)
  {
    mpz_class r;
    mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return r;
  }

  inline mpz_class
  random(gmp_randclass& rng, unsigned bits)
  {
    return rng.get_z_bits(bits);
  }

  /// RFC 7748 x-only ladder without clamping; result x2 / z2 mod p.
  inline mpz_class
  x25519(const mpz_class& k, const mpz_class& u, unsigned bits)
  {
    const mpz_class p = pow2(255) - 19;
    const mpz_class a24 = 121665;
    auto md = [&](mpz_class v) {
      v %= p;
      if (v < 0)
        v += p;
      return v;
    };
    mpz_class x1 = md(u), x2 = 1, z2 = 0, x3 = x1, z3 = 1;
    int swap = 0;
    for (int t = int(bits) - 1; t >= 0; --t)
      {
        int kt = mpz_tstbit(k.get_mpz_t(), t);
        swap ^= kt;
        if (swap)
          {
            std::swap(x2, x3);
            std::swap(z2, z3);
          }
        swap = kt;
        mpz_class A = md(x2 + z2), AA = md(A * A), B = md(x2 - z2), BB = md(B * B);
        mpz_class E = md(AA - BB), C = md(x3 + z3), D = md(x3 - z3);
        mpz_class DA = md(D * A), CB = md(C * B);
        x3 = md((DA + CB) * (DA + CB));
        z3 = md(x1 * md((DA - CB) * (DA - CB)));
        x2 = md(AA * BB);
        z2 = md(E * (AA + a24 * E));
      }
    if (swap)
      {
        std::swap(x2, x3);
        std::swap(z2, z3);
      }
    return md(x2 * powm(z2, p - 2, p));
  }

}
