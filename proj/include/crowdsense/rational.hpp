#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>

namespace crowdsense {

/// Exact arithmetic for costs, payments, and reputation scores. Generated
/// scenarios quantize costs to 0.01-credit steps, so every payment the
/// allocation and payment rules produce stays representable on the integer
/// ledger used by the chain simulator.
using Rational = boost::rational<std::int64_t>;

inline Rational centi(std::int64_t hundredths) { return Rational(hundredths, 100); }

double to_double(const Rational& q);

/// Canonical text form: "n" when integral, "n/d" otherwise.
std::string to_string(const Rational& q);

/// Accepts "n", "n/d", and plain decimals such as "51.25".
Rational parse_rational(const std::string& text);

/// Exact conversion to 0.01-credit ledger units; throws std::domain_error
/// when the value is not a multiple of 1/100.
std::int64_t to_centi(const Rational& q);

}  // namespace crowdsense
