#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>

namespace sjl {

using BigInt = mpz_class;

inline std::size_t bit_length(const BigInt& a) {
  if (a == 0) return 0;
  return mpz_sizeinbase(a.get_mpz_t(), 2);
}

inline std::string to_decimal(const BigInt& a) { return a.get_str(10); }

inline BigInt from_decimal(const std::string& s) { return BigInt(s, 10); }

}  // namespace sjl
