#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

namespace mg {

// GMP rationals are kept canonical after every arithmetic operation.
using Rational = mpq_class;
using Vec = std::vector<Rational>;
using Matrix = std::vector<Vec>;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Accepts "p", "p/q", "-p/q". Rejects decimals, blanks and zero denominators.
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);

Rational min_entry(const Matrix& m);
Rational max_entry(const Matrix& m);
Matrix negate(const Matrix& m);
Matrix transpose(const Matrix& m);

// x^T A y
Rational bilinear(const Vec& x, const Matrix& a, const Vec& y);
Rational dot(const Vec& a, const Vec& b);
Vec row_times(const Vec& x, const Matrix& a);  // x^T A
Vec times_col(const Matrix& a, const Vec& y);  // A y
Vec pure(std::size_t n, std::size_t i);

bool is_distribution(const Vec& w);

// mpq_class(n, d) does not canonicalize; use this for computed fractions.
inline Rational frac(long n, long d) {
    Rational q(n, d);
    q.canonicalize();
    return q;
}

inline const Rational& median3(const Rational& a, const Rational& b, const Rational& c) {
    if (a <= b) {
        if (b <= c) return b;
        return a <= c ? c : a;
    }
    if (a <= c) return a;
    return b <= c ? c : b;
}

}  // namespace mg
