#include "crowdsense/rational.hpp"

#include <cstdlib>
#include <stdexcept>

namespace crowdsense {

double to_double(const Rational& q) {
  return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const std::int64_t num = std::stoll(text.substr(0, slash));
    const std::int64_t den = std::stoll(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    return Rational(num, den);
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(std::stoll(text));
  const std::string whole = text.substr(0, dot);
  const std::string frac = text.substr(dot + 1);
  if (frac.empty()) return Rational(std::stoll(whole));
  if (frac.size() > 12) throw std::invalid_argument("too many decimal places in '" + text + "'");
  std::int64_t den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  std::int64_t num = std::stoll(frac);
  const bool negative = !whole.empty() && whole[0] == '-';
  std::int64_t whole_num = whole.empty() || whole == "-" ? 0 : std::stoll(whole);
  if (negative) num = -num;
  return Rational(whole_num) + Rational(num, den);
}

std::int64_t to_centi(const Rational& q) {
  const Rational scaled = q * Rational(100);
  if (scaled.denominator() != 1)
    throw std::domain_error("value " + to_string(q) + " is not a multiple of 0.01");
  return scaled.numerator();
}

}  // namespace crowdsense
