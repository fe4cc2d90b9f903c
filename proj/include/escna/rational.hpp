#pragma once

#include <cstdint>
#include <string>

#include "escna/error.hpp"

namespace escna::poly {

// Exact rational arithmetic over 128-bit integers. Wide enough for every
// combinatorial constant this library needs up to expansion order n = 30
// (denominators reach 2^121); anything larger raises NumericError instead of
// overflowing silently.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(__int128 num, __int128 den);

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;
    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }

    __int128 num() const { return num_; }
    __int128 den() const { return den_; }
    double to_double() const;
    std::string to_string() const;

private:
    __int128 num_; // sign lives here
    __int128 den_; // always > 0
};

// Overflow-checked binomial coefficient C(n, k); n is limited to 62 so the
// result stays inside 64 bits of magnitude.
__int128 binomial(int n, int k);

std::string int128_to_string(__int128 v);

} // namespace escna::poly
