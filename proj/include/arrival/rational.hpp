#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace arrival {

// All values, probabilities and matrix entries are exact rationals. GMP's
// mpq_class canonicalizes after every arithmetic operation, so num/den are
// always in lowest terms with a positive denominator.
using Rational = mpq_class;
using BigInt = mpz_class;

inline Rational make_rational(long num, long den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational make_rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// 2^-e for e >= 0.
inline Rational pow2_inv(unsigned long e) {
    BigInt den = 1;
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), e);
    return make_rational(BigInt(1), den);
}

inline BigInt pow2(unsigned long e) {
    BigInt v = 1;
    mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), e);
    return v;
}

// Parses "a/b" or a plain integer "a". Throws std::invalid_argument on junk.
inline Rational parse_rational(const std::string& text) {
    Rational r;
    if (r.set_str(text, 10) != 0)
        throw std::invalid_argument("malformed rational '" + text + "'");
    if (r.get_den() == 0)
        throw std::invalid_argument("zero denominator in '" + text + "'");
    r.canonicalize();
    return r;
}

inline std::string rational_str(const Rational& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline double rational_approx(const Rational& r) { return r.get_d(); }

inline size_t bit_length(const BigInt& v) {
    if (v == 0) return 0;
    return mpz_sizeinbase(v.get_mpz_t(), 2);
}

}  // namespace arrival
