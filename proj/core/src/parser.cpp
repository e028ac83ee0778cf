#include "residuum/parser.hpp"

#include <cctype>
#include <memory>

#include "residuum/lexer.hpp"

namespace residuum {

namespace {

using namespace ast;

class Parser {
 public:
  Parser(std::string source, std::string file, std::string systemId)
      : file_(std::move(file)), system_(std::move(systemId)) {
    m_.file = file_;
    m_.source = std::move(source);
    lex_ = std::make_unique<Lexer>(m_.source, file_, system_, &diags_);
  }

  ParseResult run() {
    while (at().kind != Tok::Eof) {
      if (at().kind == Tok::KwException) {
        parseExceptionDecl();
      } else if (at().kind == Tok::KwFn) {
        parseFn();
      } else {
        error(at().span, std::string("expected a declaration, found ") +
                             tokName(at().kind));
        syncDecl();
      }
    }
    return ParseResult{std::move(m_), std::move(diags_)};
  }

 private:
  const Token& at(std::size_t k = 0) { return lex_->peek(k); }

  Token advance() { return lex_->next(); }

  bool accept(Tok kind, Token* out = nullptr) {
    if (at().kind != kind) return false;
    Token t = advance();
    if (out) *out = t;
    return true;
  }

  std::optional<Token> expect(Tok kind, const char* context) {
    if (at().kind == kind) return advance();
    error(at().span, std::string("expected ") + tokName(kind) + " " + context +
                         ", found " + tokName(at().kind));
    return std::nullopt;
  }

  void error(Span span, const std::string& message) {
    diags_.push_back(Diagnostic{DiagKind::SyntaxError, file_, span, message,
                                "", "", system_});
  }

  void syncDecl() {
    while (at().kind != Tok::Eof && at().kind != Tok::KwFn &&
           at().kind != Tok::KwException)
      advance();
  }

  void syncStmt() {
    while (at().kind != Tok::Eof && at().kind != Tok::Semi &&
           at().kind != Tok::RBrace)
      advance();
    accept(Tok::Semi);
  }

  // ---- arena helpers ----

  template <typename Node>
  ExprId addExpr(Span span, Node&& node) {
    m_.exprs.push_back(Expr{span, std::forward<Node>(node)});
    return static_cast<ExprId>(m_.exprs.size() - 1);
  }

  TypeId addType(TypeExpr t) {
    m_.types.push_back(std::move(t));
    return static_cast<TypeId>(m_.types.size() - 1);
  }

  StmtId addStmt(Stmt s) {
    m_.stmts.push_back(std::move(s));
    return static_cast<StmtId>(m_.stmts.size() - 1);
  }

  BlockId addBlock(Block b) {
    m_.blocks.push_back(std::move(b));
    return static_cast<BlockId>(m_.blocks.size() - 1);
  }

  // ---- declarations ----

  void parseExceptionDecl() {
    Token kw = advance();
    auto name = expect(Tok::Ident, "after 'exception'");
    if (!name) {
      syncDecl();
      return;
    }
    ExceptionDecl decl;
    decl.name = name->text;
    decl.span = Span{kw.span.begin, name->span.end};
    if (accept(Tok::Subtype)) {
      auto parent = expect(Tok::Ident, "after '<:'");
      if (parent) {
        decl.parent = parent->text;
        decl.span.end = parent->span.end;
      }
    }
    expect(Tok::Semi, "after exception declaration");
    m_.exceptions.push_back(std::move(decl));
  }

  std::vector<Param> parseParamList() {
    std::vector<Param> params;
    if (at().kind == Tok::RParen) return params;
    while (true) {
      auto name = expect(Tok::Ident, "as parameter name");
      if (!name) break;
      expect(Tok::Colon, "after parameter name");
      TypeId ty = parseType();
      params.push_back(
          Param{name->text, ty, Span{name->span.begin, m_.types[ty].span.end}});
      if (!accept(Tok::Comma)) break;
    }
    return params;
  }

  void parseFn() {
    Token kw = advance();
    auto name = expect(Tok::Ident, "after 'fn'");
    if (!name) {
      syncDecl();
      return;
    }
    FnDecl fn;
    fn.name = name->text;
    fn.nameSpan = name->span;
    expect(Tok::LParen, "to open the parameter list");
    fn.params = parseParamList();
    expect(Tok::RParen, "to close the parameter list");
    expect(Tok::Arrow, "before the result type");
    fn.resultType = parseType();

    bool haveEffect = false;
    while (at().kind == Tok::At) {
      Token atTok = advance();
      auto word = expect(Tok::Ident, "after '@'");
      if (!word) break;
      if (word->text == "effect") {
        auto scanned = lex_->scanBalanced();
        if (!scanned) break;
        if (haveEffect) {
          error(Span{atTok.span.begin, scanned->second.end},
                "duplicate @effect annotation");
        } else {
          haveEffect = true;
          fn.effectText = scanned->first;
          fn.effectSpan = scanned->second;
        }
      } else if (word->text == "throws") {
        auto scanned = lex_->scanBalanced();
        if (!scanned) break;
        parseThrowsAnn(*scanned, fn);
      } else {
        error(word->span,
              "unknown annotation '@" + word->text +
                  "' (expected @effect or @throws)");
        lex_->scanBalanced();
      }
    }
    if (!haveEffect)
      error(fn.nameSpan,
            "function '" + fn.name + "' requires an @effect annotation");

    if (at().kind != Tok::LBrace) {
      error(at().span, std::string("expected '{' to open the function body, "
                                   "found ") +
                           tokName(at().kind));
      syncDecl();
      return;
    }
    fn.body = parseBlock();
    fn.span = Span{kw.span.begin, m_.blocks[fn.body].span.end};
    m_.fns.push_back(std::move(fn));
  }

  void parseThrowsAnn(const std::pair<std::string, Span>& scanned, FnDecl& fn) {
    const std::string& text = scanned.first;
    Span span = scanned.second;
    std::size_t comma = text.find(',');
    if (comma == std::string::npos) {
      error(span, "@throws takes an exception name and an effect, separated "
                  "by a comma");
      return;
    }
    std::string namePart = text.substr(0, comma);
    std::size_t nameEnd = namePart.size();
    while (nameEnd > 0 &&
           std::isspace(static_cast<unsigned char>(namePart[nameEnd - 1])))
      --nameEnd;
    std::string effPart = text.substr(comma + 1);
    std::size_t effLead = 0;
    while (effLead < effPart.size() &&
           std::isspace(static_cast<unsigned char>(effPart[effLead])))
      ++effLead;

    ThrowsAnn ann;
    ann.exception = namePart.substr(0, nameEnd);
    ann.exceptionSpan = Span{span.begin, span.begin + nameEnd};
    ann.effectText = effPart.substr(effLead);
    ann.effectSpan = Span{span.begin + comma + 1 + effLead, span.end};
    if (ann.exception.empty() || ann.effectText.empty()) {
      error(span, "@throws takes an exception name and an effect, separated "
                  "by a comma");
      return;
    }
    fn.throws.push_back(std::move(ann));
  }

  // ---- types ----

  TypeId parseType() {
    Token t = at();
    switch (t.kind) {
      case Tok::KwUnit:
        advance();
        return addType(TypeExpr{TypeExpr::Kind::Unit, {}, kNone, "", {}, t.span});
      case Tok::KwBool:
        advance();
        return addType(TypeExpr{TypeExpr::Kind::Bool, {}, kNone, "", {}, t.span});
      case Tok::KwInt:
        advance();
        return addType(TypeExpr{TypeExpr::Kind::Int, {}, kNone, "", {}, t.span});
      case Tok::KwFn: {
        advance();
        TypeExpr ty;
        ty.kind = TypeExpr::Kind::Fn;
        ty.span.begin = t.span.begin;
        expect(Tok::LParen, "after 'fn' in a function type");
        if (at().kind != Tok::RParen) {
          while (true) {
            ty.params.push_back(parseType());
            if (!accept(Tok::Comma)) break;
          }
        }
        expect(Tok::RParen, "in a function type");
        expect(Tok::Arrow, "in a function type");
        ty.result = parseType();
        ty.span.end = m_.types[ty.result].span.end;
        expect(Tok::At, "before the latent effect of a function type");
        auto word = expect(Tok::Ident, "after '@'");
        if (word && word->text != "effect")
          error(word->span, "function types carry a single @effect annotation");
        if (auto scanned = lex_->scanBalanced()) {
          ty.latentText = scanned->first;
          ty.latentSpan = scanned->second;
          ty.span.end = scanned->second.end + 1;
        }
        return addType(std::move(ty));
      }
      default:
        error(t.span, std::string("expected a type, found ") + tokName(t.kind));
        advance();
        return addType(TypeExpr{TypeExpr::Kind::Unit, {}, kNone, "", {}, t.span});
    }
  }

  // ---- blocks and statements ----

  bool isBlockLike(ExprId e) const {
    const auto& node = m_.exprs[e].node;
    return std::holds_alternative<IfExpr>(node) ||
           std::holds_alternative<WhileExpr>(node) ||
           std::holds_alternative<TryExpr>(node) ||
           std::holds_alternative<BlockExpr>(node);
  }

  BlockId parseBlock() {
    Token open = advance();  // '{'
    Block b;
    b.span.begin = open.span.begin;
    while (true) {
      if (at().kind == Tok::RBrace || at().kind == Tok::Eof) break;
      if (at().kind == Tok::KwLet) {
        parseLet(b);
        continue;
      }
      ExprId e = parseExpr();
      Span es = m_.exprs[e].span;
      if (accept(Tok::Semi)) {
        b.stmts.push_back(addStmt(Stmt{Stmt::Kind::Expr, "", kNone, e, es}));
      } else if (at().kind == Tok::RBrace) {
        b.tail = e;
        break;
      } else if (isBlockLike(e)) {
        b.stmts.push_back(addStmt(Stmt{Stmt::Kind::Expr, "", kNone, e, es}));
      } else {
        error(at().span, std::string("expected ';' or '}' after expression, "
                                     "found ") +
                             tokName(at().kind));
        syncStmt();
      }
    }
    auto close = expect(Tok::RBrace, "to close the block");
    b.span.end = close ? close->span.end
                       : (m_.source.empty() ? 0 : m_.source.size());
    return addBlock(std::move(b));
  }

  void parseLet(Block& b) {
    Token kw = advance();
    auto name = expect(Tok::Ident, "after 'let'");
    if (!name) {
      syncStmt();
      return;
    }
    TypeId declared = kNone;
    if (accept(Tok::Colon)) declared = parseType();
    if (!expect(Tok::Assign, "in 'let'")) {
      syncStmt();
      return;
    }
    ExprId e = parseExpr();
    Span end = m_.exprs[e].span;
    expect(Tok::Semi, "after 'let' initializer");
    b.stmts.push_back(addStmt(Stmt{Stmt::Kind::Let, name->text, declared, e,
                                   Span{kw.span.begin, end.end}}));
  }

  // ---- expressions ----

  ExprId parseExpr() {
    switch (at().kind) {
      case Tok::Backslash: return parseLambda();
      case Tok::KwThrow: {
        Token kw = advance();
        auto name = expect(Tok::Ident, "after 'throw'");
        Span span{kw.span.begin, name ? name->span.end : kw.span.end};
        return addExpr(span, ThrowExpr{name ? name->text : ""});
      }
      case Tok::KwBreak: {
        Token kw = advance();
        std::string label;
        Span span = kw.span;
        Token lbl;
        if (at().kind == Tok::Ident) {
          lbl = advance();
          label = lbl.text;
          span.end = lbl.span.end;
        }
        return addExpr(span, BreakExpr{label});
      }
      case Tok::KwReturn: {
        Token kw = advance();
        ExprId value = kNone;
        Span span = kw.span;
        if (at().kind != Tok::Semi && at().kind != Tok::RBrace &&
            at().kind != Tok::RParen && at().kind != Tok::Comma &&
            at().kind != Tok::Eof) {
          value = parseExpr();
          span.end = m_.exprs[value].span.end;
        }
        return addExpr(span, ReturnExpr{value});
      }
      case Tok::KwPerform: {
        Token kw = advance();
        auto name = expect(Tok::Ident, "after 'perform'");
        Span span{kw.span.begin, name ? name->span.end : kw.span.end};
        return addExpr(span, PerformExpr{name ? name->text : ""});
      }
      case Tok::KwIf: return parseIf();
      case Tok::KwWhile: return parseWhile("");
      case Tok::KwTry: return parseTry();
      case Tok::Ident:
        if (at(1).kind == Tok::Colon && at(2).kind == Tok::KwWhile) {
          Token lbl = advance();
          advance();  // ':'
          ExprId w = parseWhile(lbl.text);
          m_.exprs[w].span.begin = lbl.span.begin;
          return w;
        }
        return parsePostfix();
      default: return parsePostfix();
    }
  }

  ExprId parseLambda() {
    Token slash = advance();
    expect(Tok::LParen, "to open the lambda parameter list");
    LambdaExpr lam;
    lam.params = parseParamList();
    expect(Tok::RParen, "to close the lambda parameter list");
    expect(Tok::At, "before the lambda's latent effect");
    auto word = expect(Tok::Ident, "after '@'");
    if (word && word->text != "effect")
      error(word->span, "lambdas carry a single @effect annotation");
    if (auto scanned = lex_->scanBalanced()) {
      lam.latentText = scanned->first;
      lam.latentSpan = scanned->second;
    }
    expect(Tok::FatArrow, "before the lambda body");
    lam.body = parseExpr();
    Span span{slash.span.begin, m_.exprs[lam.body].span.end};
    return addExpr(span, std::move(lam));
  }

  ExprId parseIf() {
    Token kw = advance();
    expect(Tok::LParen, "after 'if'");
    ExprId cond = parseExpr();
    expect(Tok::RParen, "after the condition");
    BlockId thenB = expectBlock("for the if branch");
    BlockId elseB = kNone;
    Span span{kw.span.begin, m_.blocks[thenB].span.end};
    if (accept(Tok::KwElse)) {
      if (at().kind == Tok::KwIf) {
        ExprId nested = parseIf();
        Span ns = m_.exprs[nested].span;
        elseB = addBlock(Block{{}, nested, ns});
        span.end = ns.end;
      } else {
        elseB = expectBlock("for the else branch");
        span.end = m_.blocks[elseB].span.end;
      }
    }
    return addExpr(span, IfExpr{cond, thenB, elseB});
  }

  ExprId parseWhile(std::string label) {
    Token kw = advance();
    expect(Tok::LParen, "after 'while'");
    ExprId cond = parseExpr();
    expect(Tok::RParen, "after the loop condition");
    BlockId body = expectBlock("for the loop body");
    Span span{kw.span.begin, m_.blocks[body].span.end};
    return addExpr(span, WhileExpr{std::move(label), cond, body});
  }

  BlockId expectBlock(const char* context) {
    if (at().kind == Tok::LBrace) return parseBlock();
    error(at().span, std::string("expected '{' ") + context + ", found " +
                         tokName(at().kind));
    return addBlock(Block{{}, kNone, at().span});
  }

  ExprId parseTry() {
    Token kw = advance();
    BlockId body = expectBlock("for the try body");
    std::vector<CatchClause> catches;
    while (at().kind == Tok::KwCatch) {
      advance();
      expect(Tok::LParen, "after 'catch'");
      auto name = expect(Tok::Ident, "as the caught exception");
      expect(Tok::RParen, "after the caught exception");
      BlockId cb = expectBlock("for the catch body");
      catches.push_back(CatchClause{name ? name->text : "",
                                    name ? name->span : Span{}, cb});
    }
    BlockId fin = kNone;
    if (accept(Tok::KwFinally)) fin = expectBlock("for the finally body");
    Span span{kw.span.begin,
              fin != kNone
                  ? m_.blocks[fin].span.end
                  : (catches.empty() ? m_.blocks[body].span.end
                                     : m_.blocks[catches.back().block].span.end)};
    if (catches.empty() && fin == kNone)
      error(span, "try needs at least one catch or a finally");

    if (fin != kNone) {
      body = appendFinalizer(body, fin);
      for (CatchClause& c : catches) c.block = appendFinalizer(c.block, fin);
    }
    if (catches.empty()) return addExpr(span, BlockExpr{body});
    return addExpr(span, TryExpr{body, std::move(catches)});
  }

  ExprId parsePostfix() {
    ExprId e = parsePrimary();
    while (at().kind == Tok::LParen) {
      advance();
      std::vector<ExprId> args;
      if (at().kind != Tok::RParen) {
        while (true) {
          args.push_back(parseExpr());
          if (!accept(Tok::Comma)) break;
        }
      }
      auto close = expect(Tok::RParen, "to close the argument list");
      Span span{m_.exprs[e].span.begin,
                close ? close->span.end : m_.exprs[e].span.end};
      e = addExpr(span, CallExpr{e, std::move(args)});
    }
    return e;
  }

  ExprId parsePrimary() {
    Token t = at();
    switch (t.kind) {
      case Tok::LParen: {
        advance();
        if (at().kind == Tok::RParen) {
          Token close = advance();
          return addExpr(Span{t.span.begin, close.span.end}, UnitLit{});
        }
        ExprId inner = parseExpr();
        expect(Tok::RParen, "to close the parenthesized expression");
        return inner;
      }
      case Tok::LBrace: {
        BlockId b = parseBlock();
        return addExpr(m_.blocks[b].span, BlockExpr{b});
      }
      case Tok::KwTrue:
        advance();
        return addExpr(t.span, BoolLit{true});
      case Tok::KwFalse:
        advance();
        return addExpr(t.span, BoolLit{false});
      case Tok::IntLit:
        advance();
        return addExpr(t.span, IntLit{std::stoll(t.text)});
      case Tok::Ident:
        advance();
        return addExpr(t.span, VarRef{t.text});
      default:
        error(t.span,
              std::string("expected an expression, found ") + tokName(t.kind));
        advance();
        return addExpr(t.span, UnitLit{});
    }
  }

  // ---- finally lowering ----

  ExprId copyExpr(ExprId id) {
    Expr e = m_.exprs[id];
    std::visit(
        [&](auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, CallExpr>) {
            node.callee = copyExpr(node.callee);
            for (ExprId& a : node.args) a = copyExpr(a);
          } else if constexpr (std::is_same_v<T, LambdaExpr>) {
            node.body = copyExpr(node.body);
          } else if constexpr (std::is_same_v<T, IfExpr>) {
            node.cond = copyExpr(node.cond);
            node.thenBlock = copyBlock(node.thenBlock);
            if (node.elseBlock != kNone) node.elseBlock = copyBlock(node.elseBlock);
          } else if constexpr (std::is_same_v<T, WhileExpr>) {
            node.cond = copyExpr(node.cond);
            node.body = copyBlock(node.body);
          } else if constexpr (std::is_same_v<T, TryExpr>) {
            node.body = copyBlock(node.body);
            for (CatchClause& c : node.catches) c.block = copyBlock(c.block);
          } else if constexpr (std::is_same_v<T, BlockExpr>) {
            node.block = copyBlock(node.block);
          } else if constexpr (std::is_same_v<T, ReturnExpr>) {
            if (node.value != kNone) node.value = copyExpr(node.value);
          }
        },
        e.node);
    m_.exprs.push_back(std::move(e));
    return static_cast<ExprId>(m_.exprs.size() - 1);
  }

  BlockId copyBlock(BlockId id) {
    Block b = m_.blocks[id];
    for (StmtId& s : b.stmts) {
      Stmt st = m_.stmts[s];
      st.expr = copyExpr(st.expr);
      s = addStmt(std::move(st));
    }
    if (b.tail != kNone) b.tail = copyExpr(b.tail);
    return addBlock(std::move(b));
  }

  BlockId appendFinalizer(BlockId bodyId, BlockId finId) {
    Block out;
    const Block& body = m_.blocks[bodyId];
    out.span = body.span;
    out.stmts = body.stmts;
    ExprId tailVar = kNone;
    if (body.tail != kNone) {
      Span ts = m_.exprs[body.tail].span;
      std::string name = "__fin" + std::to_string(finCounter_++);
      out.stmts.push_back(
          addStmt(Stmt{Stmt::Kind::Let, name, kNone, body.tail, ts}));
      tailVar = addExpr(ts, VarRef{name});
    }
    BlockId finCopy = copyBlock(finId);
    const Block& fin = m_.blocks[finCopy];
    for (StmtId s : fin.stmts) out.stmts.push_back(s);
    if (fin.tail != kNone) {
      out.stmts.push_back(addStmt(Stmt{Stmt::Kind::Expr, "", kNone, fin.tail,
                                       m_.exprs[fin.tail].span}));
    }
    out.tail = tailVar;
    return addBlock(std::move(out));
  }

  ast::Module m_;
  std::unique_ptr<Lexer> lex_;
  std::vector<Diagnostic> diags_;
  std::string file_;
  std::string system_;
  int finCounter_ = 0;
};

}  // namespace

ParseResult parseSource(std::string source, std::string file,
                        std::string systemId) {
  Parser p(std::move(source), std::move(file), std::move(systemId));
  return p.run();
}

}  // namespace residuum
