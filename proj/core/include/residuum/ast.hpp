#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "residuum/diagnostics.hpp"

namespace residuum::ast {

using ExprId = std::uint32_t;
using BlockId = std::uint32_t;
using TypeId = std::uint32_t;
using StmtId = std::uint32_t;

constexpr std::uint32_t kNone = 0xFFFFFFFFu;

struct TypeExpr {
  enum class Kind { Unit, Bool, Int, Fn };
  Kind kind = Kind::Unit;
  std::vector<TypeId> params;  // Fn
  TypeId result = kNone;       // Fn
  std::string latentText;      // Fn: raw text of @effect(...)
  Span latentSpan;             // Fn
  Span span;
};

struct Param {
  std::string name;
  TypeId type = kNone;
  Span span;
};

struct UnitLit {};
struct BoolLit {
  bool value = false;
};
struct IntLit {
  long long value = 0;
};
struct VarRef {
  std::string name;
};
struct PerformExpr {
  std::string label;
};
struct ThrowExpr {
  std::string exception;
};
struct CallExpr {
  ExprId callee = kNone;
  std::vector<ExprId> args;
};
struct LambdaExpr {
  std::vector<Param> params;
  std::string latentText;
  Span latentSpan;
  ExprId body = kNone;
};
struct IfExpr {
  ExprId cond = kNone;
  BlockId thenBlock = kNone;
  BlockId elseBlock = kNone;  // kNone when absent
};
struct WhileExpr {
  std::string label;  // empty when unlabeled
  ExprId cond = kNone;
  BlockId body = kNone;
};
struct CatchClause {
  std::string exception;
  Span exceptionSpan;
  BlockId block = kNone;
};
struct TryExpr {
  BlockId body = kNone;
  std::vector<CatchClause> catches;
};
struct BlockExpr {
  BlockId block = kNone;
};
struct BreakExpr {
  std::string label;  // empty when unlabeled
};
struct ReturnExpr {
  ExprId value = kNone;  // kNone when absent
};

struct Expr {
  Span span;
  std::variant<UnitLit, BoolLit, IntLit, VarRef, PerformExpr, ThrowExpr,
               CallExpr, LambdaExpr, IfExpr, WhileExpr, TryExpr, BlockExpr,
               BreakExpr, ReturnExpr>
      node;
};

struct Stmt {
  enum class Kind { Let, Expr };
  Kind kind = Kind::Expr;
  std::string name;            // Let
  TypeId declaredType = kNone; // Let, optional annotation
  ExprId expr = kNone;
  Span span;
};

struct Block {
  std::vector<StmtId> stmts;
  ExprId tail = kNone;  // kNone when the block ends in a statement
  Span span;
};

struct ExceptionDecl {
  std::string name;
  std::optional<std::string> parent;
  Span span;
};

struct ThrowsAnn {
  std::string exception;
  Span exceptionSpan;
  std::string effectText;
  Span effectSpan;
};

struct FnDecl {
  std::string name;
  Span nameSpan;
  std::vector<Param> params;
  TypeId resultType = kNone;
  std::string effectText;
  Span effectSpan;
  std::vector<ThrowsAnn> throws;
  BlockId body = kNone;
  Span span;
};

struct Module {
  std::string file;
  std::string source;
  std::vector<TypeExpr> types;
  std::vector<Expr> exprs;
  std::vector<Stmt> stmts;
  std::vector<Block> blocks;
  std::vector<ExceptionDecl> exceptions;
  std::vector<FnDecl> fns;

  const Expr& expr(ExprId id) const { return exprs[id]; }
  const Stmt& stmt(StmtId id) const { return stmts[id]; }
  const Block& block(BlockId id) const { return blocks[id]; }
  const TypeExpr& type(TypeId id) const { return types[id]; }
};

}  // namespace residuum::ast
