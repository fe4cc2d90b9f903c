#pragma once

#include <functional>
#include <vector>

#include "escna/rational.hpp"

namespace escna::poly {

// p(u) = sum_n coeffs[n] * u^(2n+1). coeffs[0] multiplies u, coeffs[1]
// multiplies u^3, and so on. Evaluation is Horner in u^2 times u, which keeps
// p bitwise odd: p(-u) == -p(u) for every u.
struct OddPolynomial {
    std::vector<double> coeffs;

    int max_index() const { return static_cast<int>(coeffs.size()) - 1; }
    double eval(double u) const;
};

// One term of an odd cosine-power expansion: coeff * cos(freq * theta).
struct CosineTerm {
    int freq; // odd multiple of the base angle
    Rational coeff;
};

// cos^(2n+1)(theta) = sum_l C(2n+1, l)/2^(2n) * cos((2n+1-2l) * theta),
// l = 0..n, listed with descending frequency.
struct CosineExpansion {
    int n;
    std::vector<CosineTerm> terms;

    double eval(double theta) const;
};

// Expansion order limit: binomial/2^(2n) arithmetic stays exact in 128 bits
// through n = 30; larger orders raise NumericError.
inline constexpr int kMaxExpansionOrder = 30;

CosineExpansion trig_power_expand(int n);

// A_m = sum_{l=0..m} C(2m+1, l)^2. A_0 = 1, A_1 = 10, A_2 = 126.
Rational avg_gain_A(int m);

// B_n = C(2n, n)/2^(2n), the mean of cos^(2n). B_0 = 1, B_1 = 1/2, B_2 = 3/8.
Rational even_gain_B(int n);

// a_{m,l} = alpha * C(2m+1, l)^2 / 2^(4m+1), the per-frequency constant whose
// sum over l reproduces alpha * A_m / 2^(4m+1).
double weak_limit_coeff(int m, int l, double alpha);
Rational weak_limit_coeff_exact(int m, int l); // alpha = 1

struct FitResult {
    OddPolynomial poly;
    double sup_error; // max |h - p| over a check grid 10x denser than the fit grid
};

// Discrete least squares of h against the odd monomials u, u^3, ..., u^(2m+1)
// on a uniform symmetric grid of `samples` points spanning [-U, U]. The basis
// is odd, so the returned polynomial is exactly odd regardless of h.
FitResult fit_odd_polynomial(const std::function<double(double)>& h, int m, double U,
                             int samples);

} // namespace escna::poly
