#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "residuum/checker.hpp"
#include "residuum/diagnostics.hpp"
#include "residuum/enumerate.hpp"
#include "residuum/laws.hpp"
#include "residuum/parser.hpp"
#include "residuum/registry.hpp"
#include "residuum/resolve.hpp"

namespace {

using namespace residuum;

std::vector<std::string> splitList(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  for (std::string& s : out) {
    while (!s.empty() && s.front() == ' ') s.erase(s.begin());
    while (!s.empty() && s.back() == ' ') s.pop_back();
  }
  return out;
}

Effect parseEffectArg(const EffectSystem& sys, const std::string& text) {
  if (std::optional<Effect> e = sys.parseLiteral(text)) return *e;
  if (std::optional<Effect> e = sys.atom(text)) return *e;
  throw std::invalid_argument("'" + text + "' is not an effect of system '" +
                              std::string(sys.id()) + "'");
}

int runCheck(std::shared_ptr<const EffectSystem> sys,
             const std::vector<std::string>& paths, const std::string& format,
             std::size_t maxErrors) {
  std::vector<Diagnostic> all;
  std::map<std::string, LineMap> lineMaps;

  for (const std::string& path : paths) {
    std::error_code ec;
    std::string source;
    bool readable = std::filesystem::is_regular_file(path, ec) && !ec;
    if (readable) {
      std::ifstream in(path, std::ios::binary);
      if (in) {
        std::ostringstream buf;
        buf << in.rdbuf();
        source = buf.str();
      } else {
        readable = false;
      }
    }
    if (!readable) {
      lineMaps.emplace(path, LineMap(""));
      all.push_back(Diagnostic{DiagKind::IoError, path, Span{0, 0},
                               "cannot read file", "", "",
                               std::string(sys->id())});
      continue;
    }

    lineMaps.emplace(path, LineMap(source));
    ParseResult pr = parseSource(source, path, std::string(sys->id()));
    if (!pr.diags.empty()) {
      all.insert(all.end(), pr.diags.begin(), pr.diags.end());
      continue;
    }
    ResolvedModule rm = resolveModule(pr.module, sys);
    if (!rm.diags.empty()) {
      all.insert(all.end(), rm.diags.begin(), rm.diags.end());
      continue;
    }
    CheckResult cr = checkModule(pr.module, rm, sys, CheckOptions{});
    all.insert(all.end(), cr.diags.begin(), cr.diags.end());
  }

  sortDiagnostics(all);
  if (format == "json")
    std::cout << renderJson(all, lineMaps, maxErrors);
  else
    std::cout << renderText(all, lineMaps, maxErrors);
  return all.empty() ? 0 : 1;
}

int runLaws(std::shared_ptr<const EffectSystem> sys, std::size_t samples) {
  LawReport rep = checkLaws(*sys, samples);
  std::cout << "laws for '" << rep.systemId << "' ("
            << (rep.exhaustive ? "exhaustive" : "sampled") << ")\n";
  for (const LawResult& l : rep.laws) {
    std::cout << "  " << l.name << ": " << l.casesChecked << " checked";
    if (l.casesSkipped > 0) std::cout << ", " << l.casesSkipped << " skipped";
    if (l.failures > 0) {
      std::cout << ", " << l.failures << " FAILED";
      if (l.firstCounterexample)
        std::cout << "  e.g. " << *l.firstCounterexample;
    }
    std::cout << "\n";
  }
  std::cout << (rep.allPassed() ? "all laws hold\n" : "law violations found\n");
  return rep.allPassed() ? 0 : 1;
}

int runVerify(std::shared_ptr<const EffectSystem> sys, std::size_t maxNodes) {
  VerifyOptions opts;
  opts.maxNodes = maxNodes;
  VerifyReport rep = runVerification(std::move(sys), opts);
  std::cout << rep.text();
  return rep.ok() ? 0 : 1;
}

int runExplain(std::shared_ptr<const EffectSystem> sys,
               const std::string& seqArg, const std::string& boundArg) {
  Effect bound = parseEffectArg(*sys, boundArg);
  std::vector<Effect> steps;
  std::vector<std::string> labels;
  if (!seqArg.empty()) {
    for (const std::string& part : splitList(seqArg)) {
      steps.push_back(parseEffectArg(*sys, part));
      labels.push_back(part);
    }
  }

  std::cout << "bound: " << sys->show(bound) << "\n";
  Effect sofar = sys->unit();
  Effect remaining = bound;
  std::cout << "start: so far " << sys->show(sofar) << ", remaining budget "
            << sys->show(remaining) << "\n";

  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::optional<Effect> next = sys->seq(sofar, steps[i]);
    if (!next) {
      std::cout << "step " << (i + 1) << " (" << labels[i] << "): '"
                << sys->show(sofar) << "' cannot be followed by '"
                << sys->show(steps[i])
                << "'; the composition is undefined\n";
      return 1;
    }
    std::optional<Effect> rest = sys->residual(steps[i], remaining);
    if (!rest) {
      std::cout << "step " << (i + 1) << " (" << labels[i]
                << "): no continuation of '" << sys->show(*next)
                << "' stays within the bound; the residual of '"
                << sys->show(steps[i]) << "' in '" << sys->show(remaining)
                << "' is undefined\n";
      return 1;
    }
    sofar = std::move(*next);
    remaining = std::move(*rest);
    std::cout << "step " << (i + 1) << " (" << labels[i] << "): so far "
              << sys->show(sofar) << ", remaining budget "
              << sys->show(remaining) << "\n";
  }
  std::cout << "every step fits within the bound\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"residuum: a sequential effect checker that reports bound"
               " violations at the earliest statement that commits them"};
  app.require_subcommand(1);

  std::string envSystem;
  if (const char* e = std::getenv("RESIDUUM_SYSTEM")) envSystem = e;

  std::string systemKey = envSystem;
  std::string format = "text";
  std::size_t maxErrors = 0;
  std::vector<std::string> paths;
  std::size_t samples = 4000;
  std::size_t maxNodes = 5;
  std::string seqArg;
  std::string boundArg;

  auto addSystemOpt = [&](CLI::App* cmd) {
    CLI::Option* o = cmd->add_option(
        "--system", systemKey,
        "effect system key (atomicity, reentrancy, trace:<syms>, "
        "must:<events>, pmonad:<states>, custom:<path>); defaults to "
        "RESIDUUM_SYSTEM");
    if (envSystem.empty()) o->required();
    return o;
  };

  CLI::App* check =
      app.add_subcommand("check", "check annotated source files");
  addSystemOpt(check);
  check->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"text", "json"}));
  check->add_option("--max-errors", maxErrors,
                    "suppress diagnostics beyond this count (0 = no limit)");
  check->add_option("paths", paths, "source files to check")
      ->required()
      ->expected(-1);

  CLI::App* laws =
      app.add_subcommand("laws", "check the algebra laws of a system");
  addSystemOpt(laws);
  laws->add_option("--samples", samples,
                   "sample budget for non-enumerable carriers");

  CLI::App* verify = app.add_subcommand(
      "verify", "differentially verify the checker against an oracle");
  addSystemOpt(verify);
  verify->add_option("--max-nodes", maxNodes,
                     "enumerate statement shapes up to this many nodes");

  CLI::App* explain = app.add_subcommand(
      "explain", "walk a sequence of effects against a bound, step by step");
  addSystemOpt(explain);
  explain->add_option("--seq", seqArg, "comma-separated effect steps");
  explain->add_option("--bound", boundArg, "declared bound")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::shared_ptr<const residuum::EffectSystem> sys =
        residuum::makeSystem(systemKey);
    if (check->parsed()) return runCheck(std::move(sys), paths, format, maxErrors);
    if (laws->parsed()) return runLaws(std::move(sys), samples);
    if (verify->parsed()) return runVerify(std::move(sys), maxNodes);
    if (explain->parsed()) return runExplain(std::move(sys), seqArg, boundArg);
  } catch (const residuum::StateBudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
