#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dredge {

enum class Language { c, java, python };

Language language_from_string(std::string_view name);
std::string_view to_string(Language language);

/// Buckets used when aggregating distractor tokens.
enum class TokenCategory {
  control_flow,
  datatypes,
  digits,
  identifiers,
  operators,
  modifiers,
  others,
};

std::string_view to_string(TokenCategory category);
TokenCategory token_category_from_string(std::string_view name);

/// One lexical unit. `text` is the verbatim lexeme, or a synthetic layout
/// name (NEWLINE / INDENT / UNIND) for python sources. `index` is the
/// token's position in the original program; reduced programs keep the
/// original indices so removals stay attributable.
struct Token {
  std::string text;
  TokenCategory category = TokenCategory::others;
  std::size_t index = 0;
  std::size_t line = 1;

  bool operator==(const Token&) const = default;
};

struct Program {
  Language language = Language::c;
  std::vector<Token> tokens;
  std::string source_id;
};

inline constexpr std::string_view kNewlineToken = "NEWLINE";
inline constexpr std::string_view kIndentToken = "INDENT";
inline constexpr std::string_view kUnindentToken = "UNIND";

/// Lex `source_text` into a flat token sequence. Comments are dropped,
/// string/char literals are kept as single tokens, whitespace collapses.
/// Python input additionally yields NEWLINE at logical line ends and
/// INDENT/UNIND at indentation changes.
///
/// Throws LexError (with line number) on unterminated strings/comments
/// and inconsistent python indentation.
Program tokenize(std::string_view source_text, Language language,
                 std::string source_id = "");

/// Total, deterministic lexeme -> category mapping for one language.
TokenCategory categorize(std::string_view text, Language language);
inline TokenCategory categorize(const Token& token, Language language) {
  return categorize(token.text, language);
}

/// Deterministic single-space join of the token texts. Python layout
/// tokens render back to newlines and 4-space indentation steps.
std::string render(const Program& program);

}  // namespace dredge
