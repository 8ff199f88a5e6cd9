#include <algorithm>
#include <regex>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "cocoon/stats.hpp"

namespace cocoon::stats {

namespace {

enum class TokenKind : char { Digit = 'd', Alpha = 'a', Space = 's', Symbol = 'y' };

struct Token {
  TokenKind kind;
  std::string_view text;
};

TokenKind classify(unsigned char c) {
  if (c >= '0' && c <= '9') return TokenKind::Digit;
  if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c >= 0x80) return TokenKind::Alpha;
  if (c == ' ' || c == '\t') return TokenKind::Space;
  return TokenKind::Symbol;
}

// Digit, alpha and space characters group into maximal runs; every other
// character is a token of its own.
std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const TokenKind k = classify(static_cast<unsigned char>(s[i]));
    std::size_t j = i + 1;
    if (k != TokenKind::Symbol) {
      while (j < s.size() && classify(static_cast<unsigned char>(s[j])) == k) ++j;
    }
    out.push_back({k, s.substr(i, j - i)});
    i = j;
  }
  return out;
}

std::string signature(const std::vector<Token>& tokens) {
  std::string sig;
  for (const auto& t : tokens) {
    sig += static_cast<char>(t.kind);
    if (t.kind == TokenKind::Symbol) sig += t.text;
  }
  return sig;
}

std::string escape_literal(std::string_view text) {
  static const std::string kSpecial = "\\^$.|?*+()[]{}/";
  std::string out;
  for (char c : text) {
    if (kSpecial.find(c) != std::string::npos) out += '\\';
    if (c == '\t') {
      out += "\\t";
      continue;
    }
    out += c;
  }
  return out;
}

bool all_ascii_letters(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
  });
}

std::string slot_class(TokenKind kind, const std::vector<std::string_view>& texts) {
  switch (kind) {
    case TokenKind::Digit: return "\\d";
    case TokenKind::Space: return "[ \\t]";
    case TokenKind::Alpha:
      if (std::all_of(texts.begin(), texts.end(), all_ascii_letters)) return "[A-Za-z]";
      // Letters plus any non-ASCII byte.
      return "[^\\s\\d!-/:-@\\[-`{-~]";
    case TokenKind::Symbol: break;
  }
  return ".";
}

std::string quantifier(std::size_t lo, std::size_t hi) {
  if (lo == hi) return lo == 1 ? "" : "{" + std::to_string(lo) + "}";
  return "{" + std::to_string(lo) + "," + std::to_string(hi) + "}";
}

}  // namespace

StringStats induce_regex_pattern(std::span<const std::string> values, double coverage) {
  if (!(coverage > 0.5 && coverage <= 1.0)) {
    throw std::invalid_argument("coverage threshold must lie in (0.5, 1]");
  }
  StringStats out;
  if (values.empty()) return out;

  std::vector<std::vector<Token>> tokens;
  tokens.reserve(values.size());
  std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> sig_counts;  // count, first
  std::vector<std::string> sigs;
  sigs.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    tokens.push_back(tokenize(values[i]));
    sigs.push_back(signature(tokens.back()));
    auto [it, inserted] = sig_counts.try_emplace(sigs.back(), 0, i);
    ++it->second.first;
  }

  const std::string* modal = nullptr;
  std::size_t modal_count = 0, modal_first = 0;
  for (const auto& [sig, cf] : sig_counts) {
    if (cf.first > modal_count || (cf.first == modal_count && cf.second < modal_first)) {
      modal = &sig;
      modal_count = cf.first;
      modal_first = cf.second;
    }
  }
  const double n = static_cast<double>(values.size());
  if (static_cast<double>(modal_count) < coverage * n - 1e-9) return out;

  std::vector<std::size_t> covered;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (sigs[i] == *modal) covered.push_back(i);
  }
  const auto& shape = tokens[covered.front()];
  std::string pattern;
  for (std::size_t slot = 0; slot < shape.size(); ++slot) {
    std::vector<std::string_view> texts;
    texts.reserve(covered.size());
    std::size_t lo = SIZE_MAX, hi = 0;
    bool identical = true;
    for (auto i : covered) {
      const auto text = tokens[i][slot].text;
      identical = identical && text == shape[slot].text;
      lo = std::min(lo, text.size());
      hi = std::max(hi, text.size());
      texts.push_back(text);
    }
    if (identical) {
      pattern += escape_literal(shape[slot].text);
    } else {
      pattern += slot_class(shape[slot].kind, texts) + quantifier(lo, hi);
    }
  }

  const std::regex re(pattern);
  std::unordered_map<std::string_view, bool> verdict;
  std::unordered_set<std::string_view> listed;
  std::size_t matched = 0;
  for (const auto& v : values) {
    auto [it, inserted] = verdict.try_emplace(v, false);
    if (inserted) it->second = std::regex_match(v, re);
    if (it->second) {
      ++matched;
      if (out.sample_inlier.size() < 5 && listed.insert(v).second) out.sample_inlier.push_back(v);
    } else {
      ++out.outlier_count;
      if (out.sample_outlier.size() < 5 && listed.insert(v).second) out.sample_outlier.push_back(v);
    }
  }
  out.regex_pattern = std::move(pattern);
  out.coverage = static_cast<double>(matched) / n;
  return out;
}

}  // namespace cocoon::stats
