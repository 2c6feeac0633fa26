#include "mg/rational.hpp"

#include <cctype>

namespace mg {

namespace {

bool valid_integer(const std::string& s, bool allow_sign) {
    std::size_t i = 0;
    if (allow_sign && i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

}  // namespace

Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    std::string num = text.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
    if (!valid_integer(num, true) || !valid_integer(den, false))
        throw ParseError("malformed rational literal '" + text + "'");
    if (num[0] == '+') num.erase(0, 1);
    mpz_class n(num), d(den);
    if (d == 0) throw ParseError("zero denominator in '" + text + "'");
    Rational q(n, d);
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

Rational min_entry(const Matrix& m) {
    Rational best = m.at(0).at(0);
    for (const auto& row : m)
        for (const auto& v : row)
            if (v < best) best = v;
    return best;
}

Rational max_entry(const Matrix& m) {
    Rational best = m.at(0).at(0);
    for (const auto& row : m)
        for (const auto& v : row)
            if (v > best) best = v;
    return best;
}

Matrix negate(const Matrix& m) {
    Matrix out = m;
    for (auto& row : out)
        for (auto& v : row) v = -v;
    return out;
}

Matrix transpose(const Matrix& m) {
    if (m.empty()) return {};
    Matrix out(m[0].size(), Vec(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) out[j][i] = m[i][j];
    return out;
}

Rational dot(const Vec& a, const Vec& b) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
    return s;
}

Vec row_times(const Vec& x, const Matrix& a) {
    Vec out(a.empty() ? 0 : a[0].size(), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (x[i] == 0) continue;
        for (std::size_t j = 0; j < a[i].size(); ++j) out[j] += x[i] * a[i][j];
    }
    return out;
}

Vec times_col(const Matrix& a, const Vec& y) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = dot(a[i], y);
    return out;
}

Rational bilinear(const Vec& x, const Matrix& a, const Vec& y) { return dot(row_times(x, a), y); }

Vec pure(std::size_t n, std::size_t i) {
    Vec v(n, Rational(0));
    v.at(i) = 1;
    return v;
}

bool is_distribution(const Vec& w) {
    Rational s = 0;
    for (const auto& v : w) {
        if (v < 0 || v > 1) return false;
        s += v;
    }
    return s == 1;
}

}  // namespace mg
