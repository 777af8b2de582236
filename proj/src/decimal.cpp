#include "m3/decimal.hpp"

#include <cctype>
#include <cstdlib>

#include "m3/vocab.hpp"

namespace m3 {

namespace {

using int128 = __int128;

int128 pow10_128(int n) {
    int128 p = 1;
    while (n-- > 0) p *= 10;
    return p;
}

/// Divide with half-even rounding; den must be positive.
int128 div_half_even(int128 num, int128 den) {
    const bool negative = num < 0;
    int128 n = negative ? -num : num;
    int128 q = n / den;
    const int128 r = n % den;
    const int128 twice = 2 * r;
    if (twice > den || (twice == den && (q % 2) != 0))
        ++q;
    return negative ? -q : q;
}

} // namespace

void Decimal::normalize() {
    while (scale_ > 0 && coeff_ % 10 == 0) {
        coeff_ /= 10;
        --scale_;
    }
}

std::optional<Decimal> Decimal::parse(std::string_view lexical) {
    if (lexical.empty())
        return std::nullopt;
    std::size_t i = 0;
    bool negative = false;
    if (lexical[i] == '+' || lexical[i] == '-') {
        negative = lexical[i] == '-';
        ++i;
    }
    std::int64_t coeff = 0;
    int scale = 0;
    bool digits = false;
    bool fraction = false;
    for (; i < lexical.size(); ++i) {
        const char c = lexical[i];
        if (c == '.') {
            if (fraction)
                return std::nullopt;
            fraction = true;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return std::nullopt;
        if (coeff > (INT64_MAX - 9) / 10)
            return std::nullopt; // out of supported range
        coeff = coeff * 10 + (c - '0');
        if (fraction)
            ++scale;
        digits = true;
    }
    if (!digits)
        return std::nullopt;
    return Decimal(negative ? -coeff : coeff, scale);
}

std::optional<Decimal> Decimal::from_term(const Term& term) {
    if (!term.is_literal())
        return std::nullopt;
    if (term.datatype() != vocab::xsd("decimal") && term.datatype() != vocab::xsd("integer"))
        return std::nullopt;
    return parse(term.value());
}

std::string Decimal::to_canonical() const {
    std::string digits = std::to_string(coeff_ < 0 ? -coeff_ : coeff_);
    if (static_cast<int>(digits.size()) <= scale_)
        digits.insert(0, scale_ - digits.size() + 1, '0');
    std::string out = coeff_ < 0 ? "-" : "";
    out += digits.substr(0, digits.size() - scale_);
    out += ".";
    out += scale_ > 0 ? digits.substr(digits.size() - scale_) : "0";
    return out;
}

std::strong_ordering Decimal::operator<=>(const Decimal& other) const {
    const int common = scale_ > other.scale_ ? scale_ : other.scale_;
    const int128 a = static_cast<int128>(coeff_) * pow10_128(common - scale_);
    const int128 b = static_cast<int128>(other.coeff_) * pow10_128(common - other.scale_);
    if (a < b) return std::strong_ordering::less;
    if (a > b) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

Decimal Decimal::affine(std::int64_t slope_num, std::int64_t slope_den,
                        std::int64_t icpt_num, std::int64_t icpt_den) const {
    // Exact rational: (coeff * sn * id + in * sd * 10^scale) / (sd * id * 10^scale),
    // then round the value scaled by 10^4 half-even.
    constexpr int kOutScale = 4;
    int128 num = static_cast<int128>(coeff_) * slope_num * icpt_den +
                 static_cast<int128>(icpt_num) * slope_den * pow10_128(scale_);
    int128 den = static_cast<int128>(slope_den) * icpt_den * pow10_128(scale_);
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const int128 scaled = div_half_even(num * pow10_128(kOutScale), den);
    return Decimal(static_cast<std::int64_t>(scaled), kOutScale);
}

} // namespace m3
