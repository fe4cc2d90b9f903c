#include "escna/oddpoly.hpp"

#include <cmath>
#include <numeric>

namespace escna::poly {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

__int128 checked_mul(__int128 a, __int128 b) {
    __int128 r;
    if (__builtin_mul_overflow(a, b, &r))
        throw NumericError("128-bit rational overflow; reduce the expansion order");
    return r;
}

__int128 checked_add(__int128 a, __int128 b) {
    __int128 r;
    if (__builtin_add_overflow(a, b, &r))
        throw NumericError("128-bit rational overflow; reduce the expansion order");
    return r;
}

__int128 pow2_128(int e) {
    if (e < 0 || e > 126) throw NumericError("power of two outside the 128-bit range");
    return static_cast<__int128>(1) << e;
}

void check_order(int n, const char* what) {
    if (n < 0) throw NumericError(std::string(what) + " must be nonnegative");
    if (n > kMaxExpansionOrder)
        throw NumericError(std::string(what) + " exceeds the supported limit of " +
                           std::to_string(kMaxExpansionOrder));
}

} // namespace

Rational::Rational(__int128 num, __int128 den) : num_(num), den_(den) {
    if (den_ == 0) throw NumericError("rational with zero denominator");
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    const __int128 g = gcd128(num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

Rational Rational::operator+(const Rational& o) const {
    return Rational(checked_add(checked_mul(num_, o.den_), checked_mul(o.num_, den_)),
                    checked_mul(den_, o.den_));
}

Rational Rational::operator-(const Rational& o) const {
    return Rational(checked_add(checked_mul(num_, o.den_), -checked_mul(o.num_, den_)),
                    checked_mul(den_, o.den_));
}

Rational Rational::operator*(const Rational& o) const {
    return Rational(checked_mul(num_, o.num_), checked_mul(den_, o.den_));
}

Rational Rational::operator/(const Rational& o) const {
    if (o.num_ == 0) throw NumericError("rational division by zero");
    return Rational(checked_mul(num_, o.den_), checked_mul(den_, o.num_));
}

double Rational::to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Rational::to_string() const {
    if (den_ == 1) return int128_to_string(num_);
    return int128_to_string(num_) + "/" + int128_to_string(den_);
}

std::string int128_to_string(__int128 v) {
    if (v == 0) return "0";
    const bool negative = v < 0;
    unsigned __int128 u = negative ? static_cast<unsigned __int128>(-(v + 1)) + 1
                                   : static_cast<unsigned __int128>(v);
    std::string digits;
    while (u != 0) {
        digits.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (negative) digits.push_back('-');
    return {digits.rbegin(), digits.rend()};
}

__int128 binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (n > 62) throw NumericError("binomial order above 62 is unsupported");
    if (k > n - k) k = n - k;
    __int128 result = 1;
    for (int i = 1; i <= k; ++i) {
        result = checked_mul(result, n - k + i);
        result /= i; // exact at every step: result is C(n-k+i, i)
    }
    return result;
}

double OddPolynomial::eval(double u) const {
    const double w = u * u;
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * w + coeffs[i];
    return u * acc;
}

double CosineExpansion::eval(double theta) const {
    double acc = 0.0;
    for (const auto& term : terms) acc += term.coeff.to_double() * std::cos(term.freq * theta);
    return acc;
}

CosineExpansion trig_power_expand(int n) {
    check_order(n, "expansion order");
    CosineExpansion out;
    out.n = n;
    const __int128 den = pow2_128(2 * n);
    out.terms.reserve(static_cast<std::size_t>(n) + 1);
    for (int l = 0; l <= n; ++l)
        out.terms.push_back({2 * n + 1 - 2 * l, Rational(binomial(2 * n + 1, l), den)});
    return out;
}

Rational avg_gain_A(int m) {
    check_order(m, "gain order");
    __int128 sum = 0;
    for (int l = 0; l <= m; ++l) {
        const __int128 c = binomial(2 * m + 1, l);
        sum = checked_add(sum, checked_mul(c, c));
    }
    return Rational(sum, 1);
}

Rational even_gain_B(int n) {
    check_order(n, "gain order");
    return Rational(binomial(2 * n, n), pow2_128(2 * n));
}

Rational weak_limit_coeff_exact(int m, int l) {
    check_order(m, "gain order");
    if (l < 0 || l > m) throw NumericError("weak-limit index l must lie in [0, m]");
    const __int128 c = binomial(2 * m + 1, l);
    return Rational(checked_mul(c, c), pow2_128(4 * m + 1));
}

double weak_limit_coeff(int m, int l, double alpha) {
    return alpha * weak_limit_coeff_exact(m, l).to_double();
}

namespace {

// Gaussian elimination with partial pivoting on a small dense system.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (a[pivot][col] == 0.0 || !std::isfinite(a[pivot][col]))
            throw NumericError("singular normal system in polynomial fit");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t row = n; row-- > 0;) {
        double acc = b[row];
        for (std::size_t c = row + 1; c < n; ++c) acc -= a[row][c] * x[c];
        x[row] = acc / a[row][row];
    }
    return x;
}

} // namespace

FitResult fit_odd_polynomial(const std::function<double(double)>& h, int m, double U,
                             int samples) {
    if (m < 0) throw NumericError("fit order must be nonnegative");
    if (!(U > 0.0)) throw NumericError("singular normal system in polynomial fit: U must be > 0");
    const int basis = m + 1;
    if (samples < 2 * basis)
        throw NumericError("fit needs at least " + std::to_string(2 * basis) + " samples");

    // Work in the scaled variable v = u/U so the normal system stays well
    // conditioned, then unscale the coefficients.
    auto grid_point = [&](int j, int count) {
        return -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(count - 1);
    };

    std::vector<std::vector<double>> normal(basis, std::vector<double>(basis, 0.0));
    std::vector<double> rhs(basis, 0.0);
    std::vector<double> powers(basis);
    for (int j = 0; j < samples; ++j) {
        const double v = grid_point(j, samples);
        double p = v;
        for (int a = 0; a < basis; ++a) {
            powers[a] = p;
            p *= v * v;
        }
        const double hv = h(v * U);
        for (int a = 0; a < basis; ++a) {
            rhs[a] += powers[a] * hv;
            for (int b = 0; b <= a; ++b) normal[a][b] += powers[a] * powers[b];
        }
    }
    for (int a = 0; a < basis; ++a)
        for (int b = a + 1; b < basis; ++b) normal[a][b] = normal[b][a];

    std::vector<double> scaled = solve_dense(std::move(normal), std::move(rhs));

    FitResult result;
    result.poly.coeffs.resize(basis);
    double scale = U;
    for (int a = 0; a < basis; ++a) {
        result.poly.coeffs[a] = scaled[a] / scale;
        scale *= U * U;
    }
    while (result.poly.coeffs.size() > 1 && result.poly.coeffs.back() == 0.0)
        result.poly.coeffs.pop_back();

    const int dense = 10 * samples;
    double sup = 0.0;
    for (int j = 0; j < dense; ++j) {
        const double u = grid_point(j, dense) * U;
        sup = std::max(sup, std::abs(h(u) - result.poly.eval(u)));
    }
    result.sup_error = sup;
    return result;
}

} // namespace escna::poly
