#include <doctest.h>

#include <algorithm>
#include <string>
#include <variant>
#include <vector>

#include "residuum/diagnostics.hpp"
#include "residuum/parser.hpp"
#include "residuum/pretty.hpp"
#include "residuum/registry.hpp"
#include "residuum/resolve.hpp"

using namespace residuum;

namespace {

const char* kKitchenSink = R"(exception E;
exception F <: E;

fn helper(x: int) -> int @effect(B) @throws(E, B) {
    if (false) {
        throw E;
    }
    x
}

fn apply(f: fn(int) -> int @effect(B), x: int) -> int @effect(B) {
    f(x)
}

fn main() -> unit @effect(A) {
    let a = 1;
    let f = \(y: int) @effect(B) => y;
    let b = apply(f, a);
    let c = helper(b);
    outer: while (true) {
        if (true) {
            break outer;
        }
        perform local;
    }
    try {
        perform atomic;
    } catch (F) {
        perform local;
    } catch (E) {
        perform local;
    }
    return;
}
)";

ParseResult parseOk(const std::string& src) {
  ParseResult p = parseSource(src, "<test>", "atomicity");
  for (const auto& d : p.diags) {
    CAPTURE(d.message);
    CHECK(d.kind != DiagKind::SyntaxError);
  }
  REQUIRE(p.diags.empty());
  return p;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size()))
    ++n;
  return n;
}

std::size_t countKind(const std::vector<Diagnostic>& diags, DiagKind k) {
  return std::count_if(diags.begin(), diags.end(),
                       [&](const Diagnostic& d) { return d.kind == k; });
}

}  // namespace

TEST_CASE("a full-featured module parses and resolves cleanly") {
  ParseResult p = parseOk(kKitchenSink);
  CHECK(p.module.fns.size() == 3);
  CHECK(p.module.exceptions.size() == 2);
  ResolvedModule r = resolveModule(p.module, makeSystem("atomicity"));
  for (const auto& d : r.diags) CAPTURE(d.message);
  CHECK(r.ok());
  CHECK(r.sigs.size() == 3);
  CHECK(r.sigs[2].name == "main");
}

TEST_CASE("printing a parse is a fixpoint") {
  ParseResult p1 = parseOk(kKitchenSink);
  std::string once = prettyPrint(p1.module);
  ParseResult p2 = parseOk(once);
  std::string twice = prettyPrint(p2.module);
  CHECK(once == twice);
}

TEST_CASE("spans point at the offending token") {
  std::string src =
      "fn main() -> unit @effect(B) {\n"
      "    perform local;\n"
      "}\n";
  ParseResult p = parseOk(src);
  LineMap lines(src);
  bool found = false;
  for (const auto& e : p.module.exprs)
    if (std::holds_alternative<ast::PerformExpr>(e.node)) {
      auto [line, col] = lines.lineCol(e.span.begin);
      CHECK(line == 2);
      CHECK(col == 5);
      CHECK(src.substr(e.span.begin, e.span.end - e.span.begin) ==
            "perform local");
      found = true;
    }
  CHECK(found);
}

TEST_CASE("line map translates offsets") {
  LineMap lines("ab\ncd\n");
  CHECK(lines.lineCol(0) == std::pair<std::size_t, std::size_t>{1, 1});
  CHECK(lines.lineCol(1) == std::pair<std::size_t, std::size_t>{1, 2});
  CHECK(lines.lineCol(3) == std::pair<std::size_t, std::size_t>{2, 1});
  CHECK(lines.lineCol(5) == std::pair<std::size_t, std::size_t>{2, 3});
}

TEST_CASE("the parser recovers at statement and declaration boundaries") {
  std::string src =
      "fn first() -> unit @effect(B) {\n"
      "    let = 3;\n"
      "    perform local;\n"
      "}\n"
      "fn second() -> unit @effect(B) {\n"
      "    perform ;\n"
      "}\n";
  ParseResult p = parseSource(src, "<test>", "atomicity");
  CHECK(countKind(p.diags, DiagKind::SyntaxError) >= 2);
  CHECK(p.module.fns.size() == 2);
}

TEST_CASE("a missing effect annotation is a parse error") {
  ParseResult p = parseSource("fn f() -> unit { }\n", "<t>", "atomicity");
  CHECK(countKind(p.diags, DiagKind::SyntaxError) == 1);
}

TEST_CASE("finalizers are lowered into every non-escaping path") {
  std::string src =
      "exception E;\n"
      "fn main() -> unit @effect(Top) {\n"
      "    try {\n"
      "        perform atomic;\n"
      "    } catch (E) {\n"
      "        perform local;\n"
      "    } finally {\n"
      "        perform compound;\n"
      "    }\n"
      "}\n";
  ParseResult p = parseOk(src);
  std::string printed = prettyPrint(p.module);
  CHECK(printed.find("finally") == std::string::npos);
  CHECK(count(printed, "perform compound") == 2);
  CHECK(count(printed, "catch (E)") == 1);
}

TEST_CASE("name resolution rejects what the grammar cannot") {
  auto sys = makeSystem("atomicity");
  auto resolveDiags = [&](const std::string& src) {
    ParseResult p = parseSource(src, "<t>", sys->id());
    REQUIRE(p.diags.empty());
    return resolveModule(p.module, sys).diags;
  };

  CHECK(countKind(resolveDiags("fn f() -> unit @effect(B) {\n"
                               "    let x = y;\n"
                               "}\n"),
                  DiagKind::UnboundVar) == 1);

  CHECK(countKind(resolveDiags("fn f() -> unit @effect(B) {\n"
                               "    perform zap;\n"
                               "}\n"),
                  DiagKind::ResolveError) == 1);

  CHECK(countKind(resolveDiags("fn f() -> unit @effect(B) {\n"
                               "    throw Ghost;\n"
                               "}\n"),
                  DiagKind::ResolveError) == 1);

  // Parents must be declared before children.
  CHECK(countKind(resolveDiags("exception F <: E;\n"
                               "exception E;\n"
                               "fn f() -> unit @effect(B) { }\n"),
                  DiagKind::ResolveError) >= 1);

  CHECK(countKind(resolveDiags("exception E;\n"
                               "exception E;\n"
                               "fn f() -> unit @effect(B) { }\n"),
                  DiagKind::ResolveError) == 1);

  CHECK(countKind(resolveDiags("fn f() -> unit @effect(Zap) { }\n"),
                  DiagKind::ResolveError) == 1);

  CHECK(countKind(resolveDiags("fn f() -> unit @effect(B) @throws(Ghost, B) { }\n"),
                  DiagKind::ResolveError) == 1);

  CHECK(countKind(resolveDiags("fn f() -> unit @effect(B) { }\n"
                               "fn f() -> unit @effect(B) { }\n"),
                  DiagKind::ResolveError) == 1);

  CHECK(countKind(resolveDiags("fn f() -> unit @effect(B) {\n"
                               "    while (true) {\n"
                               "        break missing;\n"
                               "    }\n"
                               "}\n"),
                  DiagKind::ResolveError) == 1);

  CHECK(countKind(resolveDiags("exception E;\n"
                               "fn f() -> unit @effect(B) {\n"
                               "    try {\n"
                               "        perform local;\n"
                               "    } catch (Ghost) {\n"
                               "    }\n"
                               "}\n"),
                  DiagKind::ResolveError) == 1);
}

TEST_CASE("signatures carry declared bounds and throw budgets") {
  auto sys = makeSystem("reentrancy");
  ParseResult p = parseSource(
      "exception E;\n"
      "fn f() -> unit @effect(locking) @throws(E, eps) {\n"
      "    perform begin;\n"
      "}\n",
      "<t>", sys->id());
  REQUIRE(p.diags.empty());
  ResolvedModule r = resolveModule(p.module, sys);
  REQUIRE(r.ok());
  ControlAlgebra alg(sys, r.poset);
  CHECK(alg.show(r.sigs[0].bound) == "locking {E: eps}");
  CHECK(sys->show(r.sigs[0].base) == "locking");
}

TEST_CASE("diagnostics sort by file and position") {
  std::vector<Diagnostic> diags = {
      {DiagKind::TypeMismatch, "b.eff", {5, 6}, "later", "", "", "s"},
      {DiagKind::UnboundVar, "a.eff", {9, 10}, "third", "", "", "s"},
      {DiagKind::SyntaxError, "a.eff", {2, 3}, "first", "", "", "s"},
      {DiagKind::ResolveError, "a.eff", {2, 8}, "second", "", "", "s"},
  };
  sortDiagnostics(diags);
  CHECK(diags[0].message == "first");
  CHECK(diags[1].message == "second");
  CHECK(diags[2].message == "third");
  CHECK(diags[3].message == "later");
}

TEST_CASE("text rendering carries position, kind, and effect context") {
  LineMap lines("perform begin;\n");
  Diagnostic d{DiagKind::ResidualUndefined, "f.eff", {0, 13},
               "cannot extend", "locking", "critical", "reentrancy"};
  CHECK(renderTextLine(d, lines) ==
        "f.eff:1:1: ResidualUndefined: cannot extend "
        "[sofar=locking, target=critical]");
}
