#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "residuum/diagnostics.hpp"

namespace residuum {

enum class Tok {
  Eof,
  Ident,
  IntLit,
  KwFn,
  KwLet,
  KwIf,
  KwElse,
  KwWhile,
  KwTry,
  KwCatch,
  KwFinally,
  KwException,
  KwThrow,
  KwBreak,
  KwReturn,
  KwPerform,
  KwTrue,
  KwFalse,
  KwUnit,
  KwBool,
  KwInt,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Semi,
  Colon,
  Subtype,  // <:
  Arrow,    // ->
  FatArrow, // =>
  Assign,   // =
  Backslash,
  At,
  Error,
};

const char* tokName(Tok t);

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  Span span;
};

class Lexer {
 public:
  Lexer(std::string_view src, std::string file, std::string systemId,
        std::vector<Diagnostic>* diags);

  const Token& peek(std::size_t k = 0);
  Token next();

  // Raw character scan used for effect annotations, whose literal syntax is
  // system specific. Starts right after the last consumed token, expects an
  // opening '(' (after whitespace/comments) and captures everything up to its
  // matching ')'. Parentheses inside double quotes do not count. Any buffered
  // lookahead is discarded and rescanned afterwards.
  std::optional<std::pair<std::string, Span>> scanBalanced();

 private:
  Token lexOne();
  void fill(std::size_t n);
  void skipTrivia();
  void error(Span span, const std::string& message);

  std::string_view src_;
  std::string file_;
  std::string system_;
  std::size_t pos_ = 0;
  std::size_t lastEnd_ = 0;
  std::vector<Token> buf_;
  std::vector<Diagnostic>* diags_;
};

}  // namespace residuum
