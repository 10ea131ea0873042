#include "nspforge/rational.hpp"

#include <cctype>
#include <cstdlib>

#include "nspforge/errors.hpp"

namespace nsp {

namespace {

long long parse_integer(std::string_view text, std::string_view whole) {
  if (text.empty()) throw ParseError("empty number in '" + std::string(whole) + "'");
  std::size_t pos = 0;
  bool neg = false;
  if (text[pos] == '+' || text[pos] == '-') {
    neg = text[pos] == '-';
    ++pos;
  }
  if (pos == text.size()) throw ParseError("sign without digits in '" + std::string(whole) + "'");
  long long value = 0;
  for (; pos < text.size(); ++pos) {
    if (!std::isdigit(static_cast<unsigned char>(text[pos])))
      throw ParseError("invalid number '" + std::string(whole) + "'");
    value = value * 10 + (text[pos] - '0');
  }
  return neg ? -value : value;
}

}  // namespace

Rat parse_rational(std::string_view text) {
  // Trim surrounding whitespace.
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw ParseError("empty rational");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    long long num = parse_integer(text.substr(0, slash), text);
    long long den = parse_integer(text.substr(slash + 1), text);
    if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    return Rat(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view head = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    if (frac.empty()) throw ParseError("trailing decimal point in '" + std::string(text) + "'");
    bool neg = !head.empty() && head.front() == '-';
    if (!head.empty() && (head.front() == '+' || head.front() == '-')) head.remove_prefix(1);
    long long whole = head.empty() ? 0 : parse_integer(head, text);
    long long scale = 1;
    long long digits = 0;
    for (char c : frac) {
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw ParseError("invalid number '" + std::string(text) + "'");
      digits = digits * 10 + (c - '0');
      scale *= 10;
    }
    long long num = whole * scale + digits;
    return Rat(neg ? -num : num, scale);
  }
  return Rat(parse_integer(text, text), 1);
}

std::string to_string(const Rat& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rat& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace nsp
