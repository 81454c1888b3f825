#include "dredge/token.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

#include "dredge/errors.hpp"

namespace dredge {

namespace {

bool is_ident_start(char c, Language lang) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
         (lang == Language::java && c == '$');
}

bool is_ident_cont(char c, Language lang) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
         (lang == Language::java && c == '$');
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

const std::unordered_set<std::string_view>& keywords_control_flow(Language lang) {
  static const std::unordered_set<std::string_view> c = {
      "if", "else", "for", "while", "do", "switch", "case", "default",
      "break", "continue", "goto", "return"};
  static const std::unordered_set<std::string_view> java = {
      "if", "else", "for", "while", "do", "switch", "case", "default",
      "break", "continue", "return", "try", "catch", "finally", "throw",
      "assert"};
  static const std::unordered_set<std::string_view> python = {
      "if", "elif", "else", "for", "while", "return", "break", "continue",
      "try", "except", "finally", "raise", "yield"};
  switch (lang) {
    case Language::c: return c;
    case Language::java: return java;
    default: return python;
  }
}

const std::unordered_set<std::string_view>& keywords_datatypes(Language lang) {
  static const std::unordered_set<std::string_view> c = {
      "void", "char", "short", "int", "long", "float", "double", "signed",
      "unsigned", "struct", "union", "enum", "bool", "_Bool", "size_t"};
  static const std::unordered_set<std::string_view> java = {
      "boolean", "byte", "char", "short", "int", "long", "float", "double",
      "void", "String"};
  static const std::unordered_set<std::string_view> python = {};
  switch (lang) {
    case Language::c: return c;
    case Language::java: return java;
    default: return python;
  }
}

const std::unordered_set<std::string_view>& keywords_modifiers(Language lang) {
  static const std::unordered_set<std::string_view> c = {
      "const", "volatile", "static", "extern", "register", "inline",
      "restrict", "auto"};
  static const std::unordered_set<std::string_view> java = {
      "public", "private", "protected", "static", "final", "abstract",
      "synchronized", "native", "transient", "volatile", "strictfp"};
  static const std::unordered_set<std::string_view> python = {};
  switch (lang) {
    case Language::c: return c;
    case Language::java: return java;
    default: return python;
  }
}

// Keywords that act as operators (python `in`, java `instanceof`, c `sizeof`).
const std::unordered_set<std::string_view>& keywords_operators(Language lang) {
  static const std::unordered_set<std::string_view> c = {"sizeof"};
  static const std::unordered_set<std::string_view> java = {"instanceof"};
  static const std::unordered_set<std::string_view> python = {"in", "not",
                                                              "and", "or", "is"};
  switch (lang) {
    case Language::c: return c;
    case Language::java: return java;
    default: return python;
  }
}

// Remaining keywords and special names land in "others".
const std::unordered_set<std::string_view>& keywords_others(Language lang) {
  static const std::unordered_set<std::string_view> c = {"typedef"};
  static const std::unordered_set<std::string_view> java = {
      "new",    "super",     "this",    "Override", "class", "interface",
      "extends", "implements", "package", "import",   "enum",  "throws",
      "null",   "true",      "false"};
  static const std::unordered_set<std::string_view> python = {
      "def",    "class",  "import", "from",  "as",   "lambda", "global",
      "nonlocal", "del",  "pass",   "with",  "assert", "async", "await",
      "None",   "True",   "False",  "NEWLINE", "INDENT", "UNIND"};
  switch (lang) {
    case Language::c: return c;
    case Language::java: return java;
    default: return python;
  }
}

// Multi-character operators, longest first per language (maximal munch).
const std::vector<std::string_view>& multi_char_operators(Language lang) {
  static const std::vector<std::string_view> c = {
      "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==",
      "!=", "&&", "||", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^="};
  static const std::vector<std::string_view> java = {
      ">>>=", ">>>", "<<=", ">>=", "...", "->", "::", "++", "--", "<<",
      ">>",   "<=",  ">=",  "==",  "!=",  "&&", "||", "+=", "-=", "*=",
      "/=",   "%=",  "&=",  "|=",  "^="};
  static const std::vector<std::string_view> python = {
      "**=", "//=", "<<=", ">>=", "...", ":=", "->", "**", "//", "<<",
      ">>",  "<=",  ">=",  "==",  "!=",  "+=", "-=", "*=", "/=", "%=",
      "&=",  "|=",  "^=",  "@="};
  switch (lang) {
    case Language::c: return c;
    case Language::java: return java;
    default: return python;
  }
}

bool is_layout_name(std::string_view text) {
  return text == kNewlineToken || text == kIndentToken || text == kUnindentToken;
}

bool looks_like_literal(std::string_view text) {
  if (text.empty()) return false;
  char c = text.front();
  if (c == '"' || c == '\'') return true;
  // python string prefixes: r"...", rb'...', f"...", ...
  std::size_t i = 0;
  while (i < text.size() && i < 2) {
    char p = static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
    if (p != 'r' && p != 'b' && p != 'u' && p != 'f') break;
    ++i;
  }
  return i > 0 && i < text.size() && (text[i] == '"' || text[i] == '\'');
}

struct Cursor {
  std::string_view src;
  std::size_t pos = 0;
  std::size_t line = 1;

  bool eof() const { return pos >= src.size(); }
  char peek(std::size_t off = 0) const {
    return pos + off < src.size() ? src[pos + off] : '\0';
  }
  char advance() {
    char c = src[pos++];
    if (c == '\n') ++line;
    return c;
  }
  bool starts_with(std::string_view s) const {
    return src.compare(pos, s.size(), s) == 0;
  }
};

// Consumes a number starting at the cursor. Accepts ints, floats, hex,
// exponents and digit separators; the whole literal is one token.
std::string scan_number(Cursor& cur) {
  std::string text;
  char prev = '\0';
  while (!cur.eof()) {
    char c = cur.peek();
    bool take = std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                c == '.' ||
                ((c == '+' || c == '-') &&
                 (prev == 'e' || prev == 'E' || prev == 'p' || prev == 'P'));
    if (!take) break;
    text.push_back(cur.advance());
    prev = text.back();
  }
  return text;
}

// Single-line quoted literal (strings for all languages, chars for c/java).
// Backslash escapes the next character, including an escaped newline.
std::string scan_quoted(Cursor& cur, char quote, std::size_t start_line) {
  std::string text;
  text.push_back(cur.advance());  // opening quote
  while (!cur.eof()) {
    char c = cur.peek();
    if (c == '\\') {
      text.push_back(cur.advance());
      if (!cur.eof()) text.push_back(cur.advance());
      continue;
    }
    if (c == '\n') break;
    text.push_back(cur.advance());
    if (c == quote) return text;
  }
  throw LexError("unterminated string literal", start_line);
}

std::string scan_triple_quoted(Cursor& cur, char quote, std::size_t start_line) {
  std::string text;
  for (int i = 0; i < 3; ++i) text.push_back(cur.advance());
  const char triple[4] = {quote, quote, quote, '\0'};
  while (!cur.eof()) {
    if (cur.peek() == '\\') {
      text.push_back(cur.advance());
      if (!cur.eof()) text.push_back(cur.advance());
      continue;
    }
    if (cur.starts_with(triple)) {
      for (int i = 0; i < 3; ++i) text.push_back(cur.advance());
      return text;
    }
    text.push_back(cur.advance());
  }
  throw LexError("unterminated triple-quoted string", start_line);
}

std::string scan_operator(Cursor& cur, Language lang) {
  for (std::string_view op : multi_char_operators(lang)) {
    if (cur.starts_with(op)) {
      for (std::size_t i = 0; i < op.size(); ++i) cur.advance();
      return std::string(op);
    }
  }
  return std::string(1, cur.advance());
}

class TokenSink {
 public:
  TokenSink(Language lang, std::string source_id)
      : program_{lang, {}, std::move(source_id)} {}

  void emit(std::string text, std::size_t line) {
    Token tok;
    tok.category = categorize(text, program_.language);
    tok.text = std::move(text);
    tok.index = program_.tokens.size();
    tok.line = line;
    program_.tokens.push_back(std::move(tok));
  }

  Program take() { return std::move(program_); }

 private:
  Program program_;
};

Program tokenize_c_family(std::string_view source, Language lang,
                          std::string source_id) {
  Cursor cur{source};
  TokenSink sink(lang, std::move(source_id));
  while (!cur.eof()) {
    char c = cur.peek();
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
        c == '\v') {
      cur.advance();
      continue;
    }
    if (c == '/' && cur.peek(1) == '/') {
      while (!cur.eof() && cur.peek() != '\n') cur.advance();
      continue;
    }
    if (c == '/' && cur.peek(1) == '*') {
      std::size_t start = cur.line;
      cur.advance();
      cur.advance();
      while (!cur.eof() && !(cur.peek() == '*' && cur.peek(1) == '/')) {
        cur.advance();
      }
      if (cur.eof()) throw LexError("unterminated block comment", start);
      cur.advance();
      cur.advance();
      continue;
    }
    std::size_t line = cur.line;
    if (c == '"' || c == '\'') {
      sink.emit(scan_quoted(cur, c, line), line);
      continue;
    }
    if (is_digit(c) || (c == '.' && is_digit(cur.peek(1)))) {
      sink.emit(scan_number(cur), line);
      continue;
    }
    if (is_ident_start(c, lang)) {
      std::string text;
      while (!cur.eof() && is_ident_cont(cur.peek(), lang)) {
        text.push_back(cur.advance());
      }
      sink.emit(std::move(text), line);
      continue;
    }
    sink.emit(scan_operator(cur, lang), line);
  }
  return sink.take();
}

bool is_python_string_start(const Cursor& cur) {
  std::size_t i = 0;
  while (i < 2) {
    char p = static_cast<char>(
        std::tolower(static_cast<unsigned char>(cur.peek(i))));
    if (p != 'r' && p != 'b' && p != 'u' && p != 'f') break;
    ++i;
  }
  char q = cur.peek(i);
  return q == '"' || q == '\'';
}

Program tokenize_python(std::string_view source, std::string source_id) {
  Cursor cur{source};
  TokenSink sink(Language::python, std::move(source_id));
  std::vector<std::size_t> indents{0};
  std::size_t bracket_depth = 0;
  bool at_line_start = true;
  bool line_has_tokens = false;

  auto end_logical_line = [&](std::size_t line) {
    if (line_has_tokens) {
      sink.emit(std::string(kNewlineToken), line);
      line_has_tokens = false;
    }
    at_line_start = true;
  };

  while (!cur.eof()) {
    if (at_line_start && bracket_depth == 0) {
      // Measure indentation; blank and comment-only lines produce nothing.
      std::size_t col = 0;
      std::size_t probe = cur.pos;
      while (probe < source.size()) {
        char w = source[probe];
        if (w == ' ') {
          ++col;
        } else if (w == '\t') {
          col = (col / 8 + 1) * 8;
        } else if (w == '\f' || w == '\r') {
          // ignored for indentation purposes
        } else {
          break;
        }
        ++probe;
      }
      if (probe >= source.size() || source[probe] == '\n' ||
          source[probe] == '#') {
        while (!cur.eof() && cur.peek() != '\n') cur.advance();
        if (!cur.eof()) cur.advance();
        continue;
      }
      std::size_t line = cur.line;
      while (cur.pos < probe) cur.advance();
      if (col > indents.back()) {
        indents.push_back(col);
        sink.emit(std::string(kIndentToken), line);
      } else {
        while (col < indents.back()) {
          indents.pop_back();
          sink.emit(std::string(kUnindentToken), line);
        }
        if (col != indents.back()) {
          throw LexError("unindent does not match any outer indentation level",
                         line);
        }
      }
      at_line_start = false;
      continue;
    }

    char c = cur.peek();
    std::size_t line = cur.line;
    if (c == '\n') {
      cur.advance();
      if (bracket_depth == 0) end_logical_line(line);
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
      cur.advance();
      continue;
    }
    if (c == '#') {
      while (!cur.eof() && cur.peek() != '\n') cur.advance();
      continue;
    }
    if (c == '\\' && (cur.peek(1) == '\n' ||
                      (cur.peek(1) == '\r' && cur.peek(2) == '\n'))) {
      cur.advance();
      while (!cur.eof() && cur.peek() != '\n') cur.advance();
      if (!cur.eof()) cur.advance();
      continue;
    }
    if (is_python_string_start(cur)) {
      std::string prefix;
      while (cur.peek() != '"' && cur.peek() != '\'') {
        prefix.push_back(cur.advance());
      }
      char quote = cur.peek();
      std::string body;
      if (cur.peek(1) == quote && cur.peek(2) == quote) {
        body = scan_triple_quoted(cur, quote, line);
      } else {
        body = scan_quoted(cur, quote, line);
      }
      sink.emit(prefix + body, line);
      line_has_tokens = true;
      continue;
    }
    if (is_digit(c) || (c == '.' && is_digit(cur.peek(1)))) {
      sink.emit(scan_number(cur), line);
      line_has_tokens = true;
      continue;
    }
    if (is_ident_start(c, Language::python)) {
      std::string text;
      while (!cur.eof() && is_ident_cont(cur.peek(), Language::python)) {
        text.push_back(cur.advance());
      }
      sink.emit(std::move(text), line);
      line_has_tokens = true;
      continue;
    }
    if (c == '(' || c == '[' || c == '{') ++bracket_depth;
    if ((c == ')' || c == ']' || c == '}') && bracket_depth > 0) {
      --bracket_depth;
    }
    sink.emit(scan_operator(cur, Language::python), line);
    line_has_tokens = true;
  }
  end_logical_line(cur.line);
  Program program = sink.take();
  std::size_t line = program.tokens.empty() ? 1 : program.tokens.back().line;
  while (indents.size() > 1) {
    indents.pop_back();
    Token tok;
    tok.text = std::string(kUnindentToken);
    tok.category = TokenCategory::others;
    tok.index = program.tokens.size();
    tok.line = line;
    program.tokens.push_back(std::move(tok));
  }
  return program;
}

}  // namespace

Language language_from_string(std::string_view name) {
  if (name == "c") return Language::c;
  if (name == "java") return Language::java;
  if (name == "python") return Language::python;
  throw ConfigError("unsupported language id: '" + std::string(name) +
                    "' (expected c, java or python)");
}

std::string_view to_string(Language language) {
  switch (language) {
    case Language::c: return "c";
    case Language::java: return "java";
    case Language::python: return "python";
  }
  return "?";
}

std::string_view to_string(TokenCategory category) {
  switch (category) {
    case TokenCategory::control_flow: return "control-flow";
    case TokenCategory::datatypes: return "datatypes";
    case TokenCategory::digits: return "digits";
    case TokenCategory::identifiers: return "identifiers";
    case TokenCategory::operators: return "operators";
    case TokenCategory::modifiers: return "modifiers";
    case TokenCategory::others: return "others";
  }
  return "?";
}

TokenCategory token_category_from_string(std::string_view name) {
  static const std::array<TokenCategory, 7> all = {
      TokenCategory::control_flow, TokenCategory::datatypes,
      TokenCategory::digits,       TokenCategory::identifiers,
      TokenCategory::operators,    TokenCategory::modifiers,
      TokenCategory::others};
  for (TokenCategory cat : all) {
    if (to_string(cat) == name) return cat;
  }
  throw ConfigError("unknown token category: '" + std::string(name) + "'");
}

Program tokenize(std::string_view source_text, Language language,
                 std::string source_id) {
  if (language == Language::python) {
    return tokenize_python(source_text, std::move(source_id));
  }
  return tokenize_c_family(source_text, language, std::move(source_id));
}

TokenCategory categorize(std::string_view text, Language language) {
  if (text.empty()) return TokenCategory::others;
  if (language == Language::python && is_layout_name(text)) {
    return TokenCategory::others;
  }
  char first = text.front();
  if (is_digit(first) || (first == '.' && text.size() > 1 && is_digit(text[1]))) {
    return TokenCategory::digits;
  }
  // Pre-normalized C corpora spell numeric literals as NUMBER.
  if (language == Language::c && text == "NUMBER") return TokenCategory::digits;
  if (looks_like_literal(text)) return TokenCategory::others;
  if (is_ident_start(first, language)) {
    if (keywords_control_flow(language).count(text)) {
      return TokenCategory::control_flow;
    }
    if (keywords_datatypes(language).count(text)) {
      return TokenCategory::datatypes;
    }
    if (keywords_modifiers(language).count(text)) {
      return TokenCategory::modifiers;
    }
    if (keywords_operators(language).count(text)) {
      return TokenCategory::operators;
    }
    if (keywords_others(language).count(text)) return TokenCategory::others;
    return TokenCategory::identifiers;
  }
  if (text == ";" || text == "@") return TokenCategory::others;
  return TokenCategory::operators;
}

std::string render(const Program& program) {
  std::string out;
  if (program.language != Language::python) {
    for (const Token& tok : program.tokens) {
      if (!out.empty()) out.push_back(' ');
      out += tok.text;
    }
    return out;
  }
  std::size_t level = 0;
  bool at_line_start = true;
  for (const Token& tok : program.tokens) {
    if (tok.text == kNewlineToken) {
      out.push_back('\n');
      at_line_start = true;
      continue;
    }
    if (tok.text == kIndentToken) {
      ++level;
      continue;
    }
    if (tok.text == kUnindentToken) {
      if (level > 0) --level;
      continue;
    }
    if (at_line_start) {
      out.append(level * 4, ' ');
      at_line_start = false;
    } else {
      out.push_back(' ');
    }
    out += tok.text;
  }
  return out;
}

}  // namespace dredge
