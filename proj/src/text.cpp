#include "casekit/text.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>

namespace casekit::text {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

char lower_char(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) out.push_back(lower_char(c));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> tokenize(std::string_view s) {
  static const std::unordered_set<std::string> kNoStopwords;
  return tokenize(s, kNoStopwords);
}

std::vector<std::string> tokenize(std::string_view s,
                                  const std::unordered_set<std::string>& stopwords) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char raw : s) {
    char c = lower_char(raw);
    if ((c >= 'a' && c <= 'z') || is_digit(c)) {
      cur.push_back(c);
    } else if (!cur.empty()) {
      if (!stopwords.count(cur)) tokens.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty() && !stopwords.count(cur)) tokens.push_back(cur);
  return tokens;
}

std::optional<ParsedLiteral> parse_numeric_literal(std::string_view token) {
  std::string t = trim(token);
  if (t.empty()) return std::nullopt;

  std::string normalized;
  normalized.reserve(t.size());
  std::size_t i = 0;
  bool negative = false;
  bool saw_dollar = false;

  // Sign and currency marker may appear in either order ("-$5", "$-5").
  while (i < t.size() && (t[i] == '-' || t[i] == '+' || t[i] == '$')) {
    if (t[i] == '$') {
      if (saw_dollar) return std::nullopt;
      saw_dollar = true;
    } else if (t[i] == '-') {
      if (negative) return std::nullopt;
      negative = true;
    }
    ++i;
  }

  std::string digits;
  bool saw_digit = false;
  bool saw_dot = false;
  while (i < t.size()) {
    char c = lower_char(t[i]);
    if (is_digit(c)) {
      digits.push_back(c);
      saw_digit = true;
      ++i;
    } else if (c == ',') {
      // thousands separator, must sit between digits
      if (!saw_digit || i + 1 >= t.size() || !is_digit(t[i + 1])) return std::nullopt;
      ++i;
    } else if (c == '.') {
      if (saw_dot) return std::nullopt;
      saw_dot = true;
      digits.push_back('.');
      ++i;
    } else {
      break;
    }
  }
  if (!saw_digit) return std::nullopt;

  // optional exponent
  if (i < t.size() && lower_char(t[i]) == 'e') {
    std::string exp = "e";
    std::size_t j = i + 1;
    if (j < t.size() && (t[j] == '+' || t[j] == '-')) {
      exp.push_back(t[j]);
      ++j;
    }
    bool exp_digits = false;
    while (j < t.size() && is_digit(t[j])) {
      exp.push_back(t[j]);
      exp_digits = true;
      ++j;
    }
    if (!exp_digits) return std::nullopt;
    digits += exp;
    i = j;
  }

  bool percent = false;
  if (i < t.size() && t[i] == '%') {
    percent = true;
    ++i;
  }
  if (i != t.size()) return std::nullopt;

  std::string plain = (negative ? "-" : "") + digits;
  char* end = nullptr;
  double value = std::strtod(plain.c_str(), &end);
  if (end == nullptr || *end != '\0') return std::nullopt;

  ParsedLiteral lit;
  lit.value = value;
  lit.percent = percent;
  lit.normalized = plain + (percent ? "%" : "");
  return lit;
}

std::optional<double> parse_cell_number(std::string_view cell) {
  std::string t = trim(cell);
  if (t.empty()) return std::nullopt;

  // accounting negative: "(5)" means -5
  if (t.front() == '(' && t.back() == ')') {
    auto inner = parse_cell_number(std::string_view(t).substr(1, t.size() - 2));
    if (!inner) return std::nullopt;
    return -*inner;
  }

  std::string cleaned;
  cleaned.reserve(t.size());
  for (char c : t) {
    if (c == '$' || c == ',' || is_space(c)) continue;
    cleaned.push_back(c);
  }
  if (cleaned.empty()) return std::nullopt;

  bool percent = false;
  if (cleaned.back() == '%') {
    percent = true;
    cleaned.pop_back();
    if (cleaned.empty()) return std::nullopt;
  }

  char* end = nullptr;
  double value = std::strtod(cleaned.c_str(), &end);
  if (end == nullptr || *end != '\0') return std::nullopt;
  return percent ? value / 100.0 : value;
}

std::string canonical_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return std::string(buf);
}

}  // namespace casekit::text
