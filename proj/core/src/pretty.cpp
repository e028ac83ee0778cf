#include "residuum/pretty.hpp"

namespace residuum {

namespace {

using namespace ast;

class Printer {
 public:
  explicit Printer(const Module& m) : m_(m) {}

  std::string run() {
    bool first = true;
    for (const ExceptionDecl& e : m_.exceptions) {
      out_ += "exception " + e.name;
      if (e.parent) out_ += " <: " + *e.parent;
      out_ += ";\n";
      first = false;
    }
    for (const FnDecl& fn : m_.fns) {
      if (!first) out_ += "\n";
      first = false;
      printFn(fn);
    }
    return out_;
  }

 private:
  void ind() { out_.append(static_cast<std::size_t>(indent_) * 4, ' '); }

  void printFn(const FnDecl& fn) {
    out_ += "fn " + fn.name + "(";
    printParams(fn.params);
    out_ += ") -> ";
    printType(fn.resultType);
    out_ += " @effect(" + fn.effectText + ")";
    for (const ThrowsAnn& t : fn.throws)
      out_ += " @throws(" + t.exception + ", " + t.effectText + ")";
    out_ += " ";
    printBlock(fn.body);
    out_ += "\n";
  }

  void printParams(const std::vector<Param>& params) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (i) out_ += ", ";
      out_ += params[i].name + ": ";
      printType(params[i].type);
    }
  }

  void printType(TypeId id) {
    const TypeExpr& t = m_.type(id);
    switch (t.kind) {
      case TypeExpr::Kind::Unit: out_ += "unit"; return;
      case TypeExpr::Kind::Bool: out_ += "bool"; return;
      case TypeExpr::Kind::Int: out_ += "int"; return;
      case TypeExpr::Kind::Fn:
        out_ += "fn(";
        for (std::size_t i = 0; i < t.params.size(); ++i) {
          if (i) out_ += ", ";
          printType(t.params[i]);
        }
        out_ += ") -> ";
        printType(t.result);
        out_ += " @effect(" + t.latentText + ")";
        return;
    }
  }

  bool isBlockLike(ExprId e) const {
    const auto& node = m_.expr(e).node;
    return std::holds_alternative<IfExpr>(node) ||
           std::holds_alternative<WhileExpr>(node) ||
           std::holds_alternative<TryExpr>(node) ||
           std::holds_alternative<BlockExpr>(node);
  }

  void printBlock(BlockId id) {
    const Block& b = m_.block(id);
    if (b.stmts.empty() && b.tail == kNone) {
      out_ += "{}";
      return;
    }
    out_ += "{\n";
    ++indent_;
    for (StmtId sid : b.stmts) {
      const Stmt& s = m_.stmt(sid);
      ind();
      if (s.kind == Stmt::Kind::Let) {
        out_ += "let " + s.name;
        if (s.declaredType != kNone) {
          out_ += ": ";
          printType(s.declaredType);
        }
        out_ += " = ";
        printExpr(s.expr);
        out_ += ";";
      } else {
        printExpr(s.expr);
        if (!isBlockLike(s.expr)) out_ += ";";
      }
      out_ += "\n";
    }
    if (b.tail != kNone) {
      ind();
      printExpr(b.tail);
      out_ += "\n";
    }
    --indent_;
    ind();
    out_ += "}";
  }

  void printExpr(ExprId id) {
    const Expr& e = m_.expr(id);
    std::visit([&](const auto& node) { print(node); }, e.node);
  }

  void print(const UnitLit&) { out_ += "()"; }
  void print(const BoolLit& b) { out_ += b.value ? "true" : "false"; }
  void print(const IntLit& i) { out_ += std::to_string(i.value); }
  void print(const VarRef& v) { out_ += v.name; }
  void print(const PerformExpr& p) { out_ += "perform " + p.label; }
  void print(const ThrowExpr& t) { out_ += "throw " + t.exception; }

  void print(const BreakExpr& b) {
    out_ += "break";
    if (!b.label.empty()) out_ += " " + b.label;
  }

  void print(const ReturnExpr& r) {
    out_ += "return";
    if (r.value != kNone) {
      out_ += " ";
      printExpr(r.value);
    }
  }

  void print(const CallExpr& c) {
    bool wrap = std::holds_alternative<LambdaExpr>(m_.expr(c.callee).node);
    if (wrap) out_ += "(";
    printExpr(c.callee);
    if (wrap) out_ += ")";
    out_ += "(";
    for (std::size_t i = 0; i < c.args.size(); ++i) {
      if (i) out_ += ", ";
      printExpr(c.args[i]);
    }
    out_ += ")";
  }

  void print(const LambdaExpr& l) {
    out_ += "\\(";
    printParams(l.params);
    out_ += ") @effect(" + l.latentText + ") => ";
    printExpr(l.body);
  }

  void print(const IfExpr& f) {
    out_ += "if (";
    printExpr(f.cond);
    out_ += ") ";
    printBlock(f.thenBlock);
    if (f.elseBlock == kNone) return;
    out_ += " else ";
    const Block& eb = m_.block(f.elseBlock);
    if (eb.stmts.empty() && eb.tail != kNone &&
        std::holds_alternative<IfExpr>(m_.expr(eb.tail).node)) {
      printExpr(eb.tail);
    } else {
      printBlock(f.elseBlock);
    }
  }

  void print(const WhileExpr& w) {
    if (!w.label.empty()) out_ += w.label + ": ";
    out_ += "while (";
    printExpr(w.cond);
    out_ += ") ";
    printBlock(w.body);
  }

  void print(const TryExpr& t) {
    out_ += "try ";
    printBlock(t.body);
    for (const CatchClause& c : t.catches) {
      out_ += " catch (" + c.exception + ") ";
      printBlock(c.block);
    }
  }

  void print(const BlockExpr& b) { printBlock(b.block); }

  const Module& m_;
  std::string out_;
  int indent_ = 0;
};

}  // namespace

std::string prettyPrint(const ast::Module& m) { return Printer(m).run(); }

}  // namespace residuum
