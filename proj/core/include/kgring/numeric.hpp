#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace kgring {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

using boost::multiprecision::denominator;
using boost::multiprecision::gcd;
using boost::multiprecision::lcm;
using boost::multiprecision::numerator;

inline Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

// g = a*x + b*y with g = gcd(a,b) >= 0.
inline Int ext_gcd(const Int& a, const Int& b, Int& x, Int& y) {
    if (b == 0) {
        x = (a < 0) ? -1 : 1;
        y = 0;
        return abs_int(a);
    }
    Int x1, y1;
    Int g = ext_gcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

// True iff every prime factor of d divides m.  d = 0 counts as smooth only
// for m = 0; callers always pass d >= 1.
inline bool is_smooth(Int d, const Int& m) {
    d = abs_int(d);
    if (d == 1) return true;
    if (m == 0) return false;
    Int g = gcd(d, m);
    while (g > 1) {
        while (d % g == 0) d /= g;
        if (d == 1) return true;
        g = gcd(d, m);
    }
    return d == 1;
}

// Largest divisor of d coprime to m (strips the primes dividing m).
inline Int coprime_part(Int d, const Int& m) {
    d = abs_int(d);
    if (d == 0) return 0;
    Int g = gcd(d, m);
    while (g > 1) {
        d /= g;
        g = gcd(d, m);
    }
    return d;
}

inline Int mod_floor(const Int& a, const Int& n) {
    Int r = a % n;
    if (r < 0) r += n;
    return r;
}

inline Int pow_mod(Int base, Int exp, const Int& mod) {
    Int r = 1;
    base = mod_floor(base, mod);
    while (exp > 0) {
        if ((exp & 1) != 0) r = r * base % mod;
        base = base * base % mod;
        exp >>= 1;
    }
    return r;
}

inline std::optional<Int> inverse_mod(const Int& a, const Int& n) {
    Int x, y;
    if (ext_gcd(mod_floor(a, n), n, x, y) != 1) return std::nullopt;
    return mod_floor(x, n);
}

inline bool is_prime(const Int& n) {
    if (n < 2) return false;
    for (Int d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline Int pow_int(Int base, unsigned long exp) {
    Int r = 1;
    while (exp > 0) {
        if (exp & 1u) r *= base;
        base *= base;
        exp >>= 1u;
    }
    return r;
}

inline Int binomial(unsigned long n, unsigned long k) {
    if (k > n) return 0;
    Int r = 1;
    for (unsigned long i = 1; i <= k; ++i) {
        r *= Int(n - k + i);
        r /= Int(i);
    }
    return r;
}

// Exact fraction parsing for "a" or "a/b".
Rat parse_fraction(const std::string& s);
std::string fraction_to_string(const Rat& r);

class kg_error : public std::runtime_error {
public:
    explicit kg_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kgring
