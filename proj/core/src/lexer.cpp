#include "residuum/lexer.hpp"

#include <cctype>
#include <map>

namespace residuum {

const char* tokName(Tok t) {
  switch (t) {
    case Tok::Eof: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::IntLit: return "integer literal";
    case Tok::KwFn: return "'fn'";
    case Tok::KwLet: return "'let'";
    case Tok::KwIf: return "'if'";
    case Tok::KwElse: return "'else'";
    case Tok::KwWhile: return "'while'";
    case Tok::KwTry: return "'try'";
    case Tok::KwCatch: return "'catch'";
    case Tok::KwFinally: return "'finally'";
    case Tok::KwException: return "'exception'";
    case Tok::KwThrow: return "'throw'";
    case Tok::KwBreak: return "'break'";
    case Tok::KwReturn: return "'return'";
    case Tok::KwPerform: return "'perform'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::KwUnit: return "'unit'";
    case Tok::KwBool: return "'bool'";
    case Tok::KwInt: return "'int'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Subtype: return "'<:'";
    case Tok::Arrow: return "'->'";
    case Tok::FatArrow: return "'=>'";
    case Tok::Assign: return "'='";
    case Tok::Backslash: return "'\\'";
    case Tok::At: return "'@'";
    case Tok::Error: return "invalid token";
  }
  return "?";
}

namespace {
const std::map<std::string_view, Tok>& keywords() {
  static const std::map<std::string_view, Tok> kw{
      {"fn", Tok::KwFn},           {"let", Tok::KwLet},
      {"if", Tok::KwIf},           {"else", Tok::KwElse},
      {"while", Tok::KwWhile},     {"try", Tok::KwTry},
      {"catch", Tok::KwCatch},     {"finally", Tok::KwFinally},
      {"exception", Tok::KwException}, {"throw", Tok::KwThrow},
      {"break", Tok::KwBreak},     {"return", Tok::KwReturn},
      {"perform", Tok::KwPerform}, {"true", Tok::KwTrue},
      {"false", Tok::KwFalse},     {"unit", Tok::KwUnit},
      {"bool", Tok::KwBool},       {"int", Tok::KwInt},
  };
  return kw;
}
}  // namespace

Lexer::Lexer(std::string_view src, std::string file, std::string systemId,
             std::vector<Diagnostic>* diags)
    : src_(src), file_(std::move(file)), system_(std::move(systemId)),
      diags_(diags) {}

void Lexer::error(Span span, const std::string& message) {
  if (!diags_) return;
  diags_->push_back(Diagnostic{DiagKind::SyntaxError, file_, span, message, "",
                               "", system_});
}

void Lexer::skipTrivia() {
  while (pos_ < src_.size()) {
    char c = src_[pos_];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++pos_;
    } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
      while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
    } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
      std::size_t start = pos_;
      pos_ += 2;
      while (pos_ + 1 < src_.size() &&
             !(src_[pos_] == '*' && src_[pos_ + 1] == '/'))
        ++pos_;
      if (pos_ + 1 < src_.size()) {
        pos_ += 2;
      } else {
        pos_ = src_.size();
        error(Span{start, pos_}, "unterminated block comment");
      }
    } else {
      break;
    }
  }
}

Token Lexer::lexOne() {
  skipTrivia();
  std::size_t start = pos_;
  if (pos_ >= src_.size()) return Token{Tok::Eof, "", Span{start, start}};

  char c = src_[pos_];
  auto make = [&](Tok kind, std::size_t len) {
    Token t{kind, std::string(src_.substr(start, len)), Span{start, start + len}};
    pos_ = start + len;
    return t;
  };

  if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
    std::size_t end = pos_;
    while (end < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[end])) ||
            src_[end] == '_'))
      ++end;
    std::string_view word = src_.substr(start, end - start);
    auto it = keywords().find(word);
    return make(it == keywords().end() ? Tok::Ident : it->second, end - start);
  }
  if (std::isdigit(static_cast<unsigned char>(c))) {
    std::size_t end = pos_;
    while (end < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[end])))
      ++end;
    return make(Tok::IntLit, end - start);
  }

  auto two = [&](char second) {
    return pos_ + 1 < src_.size() && src_[pos_ + 1] == second;
  };
  switch (c) {
    case '(': return make(Tok::LParen, 1);
    case ')': return make(Tok::RParen, 1);
    case '{': return make(Tok::LBrace, 1);
    case '}': return make(Tok::RBrace, 1);
    case ',': return make(Tok::Comma, 1);
    case ';': return make(Tok::Semi, 1);
    case ':': return make(Tok::Colon, 1);
    case '@': return make(Tok::At, 1);
    case '\\': return make(Tok::Backslash, 1);
    case '<':
      if (two(':')) return make(Tok::Subtype, 2);
      break;
    case '-':
      if (two('>')) return make(Tok::Arrow, 2);
      break;
    case '=':
      if (two('>')) return make(Tok::FatArrow, 2);
      return make(Tok::Assign, 1);
    default: break;
  }
  Token t = make(Tok::Error, 1);
  error(t.span, std::string("unexpected character '") + c + "'");
  return t;
}

void Lexer::fill(std::size_t n) {
  while (buf_.size() < n) buf_.push_back(lexOne());
}

const Token& Lexer::peek(std::size_t k) {
  fill(k + 1);
  return buf_[k];
}

Token Lexer::next() {
  fill(1);
  Token t = buf_.front();
  buf_.erase(buf_.begin());
  if (t.kind != Tok::Eof) lastEnd_ = t.span.end;
  return t;
}

std::optional<std::pair<std::string, Span>> Lexer::scanBalanced() {
  buf_.clear();
  pos_ = lastEnd_;
  skipTrivia();
  if (pos_ >= src_.size() || src_[pos_] != '(') {
    error(Span{pos_, pos_ < src_.size() ? pos_ + 1 : pos_},
          "expected '(' to open an effect annotation");
    return std::nullopt;
  }
  ++pos_;
  std::size_t contentStart = pos_;
  int depth = 1;
  while (pos_ < src_.size()) {
    char c = src_[pos_];
    if (c == '"') {
      ++pos_;
      while (pos_ < src_.size() && src_[pos_] != '"') ++pos_;
      if (pos_ < src_.size()) ++pos_;
      continue;
    }
    if (c == '(') ++depth;
    if (c == ')') {
      --depth;
      if (depth == 0) break;
    }
    ++pos_;
  }
  if (depth != 0) {
    error(Span{contentStart - 1, src_.size()},
          "unterminated effect annotation");
    pos_ = src_.size();
    lastEnd_ = pos_;
    return std::nullopt;
  }
  std::size_t contentEnd = pos_;
  ++pos_;  // consume ')'
  lastEnd_ = pos_;

  std::size_t b = contentStart, e = contentEnd;
  while (b < e && std::isspace(static_cast<unsigned char>(src_[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(src_[e - 1]))) --e;
  return std::make_pair(std::string(src_.substr(b, e - b)), Span{b, e});
}

}  // namespace residuum
