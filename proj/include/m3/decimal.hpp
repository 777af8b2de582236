#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "m3/term.hpp"

namespace m3 {

/// Exact decimal value (coefficient * 10^-scale) used wherever lexical forms
/// must compare by numeric value: rule built-ins, query filters, and unit
/// conversion. Arithmetic stays in integers so results are bit-stable across
/// platforms. Range is bounded by the int64 coefficient, which is far beyond
/// anything a sensor reading needs.
class Decimal {
public:
    Decimal() = default;

    /// Accepts xsd:decimal / xsd:integer lexical forms: [+-]? digits [ '.' digits ].
    static std::optional<Decimal> parse(std::string_view lexical);

    /// Numeric value of a literal term, or nullopt for IRIs, blanks, and
    /// literals whose datatype is not xsd:decimal/xsd:integer.
    static std::optional<Decimal> from_term(const Term& term);

    std::int64_t coefficient() const { return coeff_; }
    int scale() const { return scale_; }

    /// Canonical xsd:decimal form: sign, no leading zeros, always one or more
    /// fractional digits ("38" renders as "38.0").
    std::string to_canonical() const;

    /// Applies v -> (v * slope_num/slope_den) + (icpt_num/icpt_den), rounding
    /// half-even to four fractional digits.
    Decimal affine(std::int64_t slope_num, std::int64_t slope_den,
                   std::int64_t icpt_num, std::int64_t icpt_den) const;

    std::strong_ordering operator<=>(const Decimal& other) const;
    bool operator==(const Decimal& other) const { return (*this <=> other) == 0; }

private:
    Decimal(std::int64_t coeff, int scale) : coeff_(coeff), scale_(scale) { normalize(); }

    void normalize();

    std::int64_t coeff_ = 0;
    int scale_ = 0; // number of fractional digits, >= 0
};

} // namespace m3
