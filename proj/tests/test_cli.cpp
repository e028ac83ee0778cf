#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "test_util.hpp"

using testutil::CmdResult;
using testutil::runCommand;

namespace {

std::string cli() { return "\"" + testutil::cliPath() + "\""; }

std::string corpus(const std::string& name) {
  return "\"" + testutil::corpusDir() + "/" + name + "\"";
}

std::size_t countLines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("check reports the marker diagnostic and exits 1") {
  CmdResult r = runCommand(cli() + " check --system atomicity " +
                           corpus("atomicity_append.eff"));
  CHECK(r.exitCode == 1);
  CHECK(countLines(r.output) == 1);
  CHECK(r.output.find(":24:5: ResidualUndefined:") != std::string::npos);
  CHECK(r.output.find("[sofar=Top, target=A]") != std::string::npos);
}

TEST_CASE("clean files print nothing and exit 0") {
  CmdResult r = runCommand(cli() + " check --system reentrancy " +
                           corpus("reentrancy_doc_example.eff"));
  CHECK(r.exitCode == 0);
  CHECK(r.output.empty());
}

TEST_CASE("json output carries spans, kinds, and the system") {
  CmdResult r = runCommand(cli() + " check --system reentrancy --format json " +
                           corpus("reentrancy_begin_begin.eff"));
  CHECK(r.exitCode == 1);
  nlohmann::json arr = nlohmann::json::parse(r.output);
  REQUIRE(arr.is_array());
  REQUIRE(arr.size() == 1);
  const nlohmann::json& d = arr[0];
  CHECK(d["kind"] == "UndefinedSeq");
  CHECK(d["line"] == 7);
  CHECK(d["col"] == 5);
  CHECK(d["endLine"] == 7);
  CHECK(d["system"] == "reentrancy");
  CHECK(d["sofar"] == "locking");
  CHECK(d["target"] == "locking");
  CHECK(d["message"].get<std::string>().find("cannot be followed by") !=
        std::string::npos);
  std::string file = d["file"].get<std::string>();
  CHECK(file.find("reentrancy_begin_begin.eff") != std::string::npos);
}

TEST_CASE("--max-errors truncates and counts the rest") {
  std::string sys = testutil::corpusDir() + "/systems/lift2.json";
  CmdResult r =
      runCommand(cli() + " check --system \"custom:" + sys +
                 "\" --max-errors 1 " + corpus("commutative_two_violations.eff"));
  CHECK(r.exitCode == 1);
  CHECK(r.output.find("ResidualUndefined") != std::string::npos);
  CHECK(r.output.find("(1 more diagnostics suppressed)") != std::string::npos);
  CHECK(countLines(r.output) == 2);
}

TEST_CASE("the system key can come from the environment") {
  CmdResult r = runCommand("RESIDUUM_SYSTEM=reentrancy " + cli() + " check " +
                           corpus("reentrancy_doc_example.eff"));
  CHECK(r.exitCode == 0);

  // An explicit option wins over the environment.
  CmdResult o = runCommand("RESIDUUM_SYSTEM=atomicity " + cli() +
                           " check --system reentrancy " +
                           corpus("reentrancy_doc_example.eff"));
  CHECK(o.exitCode == 0);

  // Without either, the option is required and the parser reports usage.
  CmdResult u = runCommand("env -u RESIDUUM_SYSTEM " + cli() + " check " +
                           corpus("reentrancy_doc_example.eff"));
  CHECK(u.exitCode == 2);
}

TEST_CASE("unknown systems are rejected before any file is read") {
  CmdResult r =
      runCommand(cli() + " check --system bogus /no/such/file.eff");
  CHECK(r.exitCode == 2);
  CHECK(r.output.find("error:") != std::string::npos);
  CHECK(r.output.find("bogus") != std::string::npos);
  CHECK(r.output.find("IoError") == std::string::npos);
}

TEST_CASE("unreadable files are io errors, not crashes") {
  CmdResult r =
      runCommand(cli() + " check --system atomicity /no/such/file.eff");
  CHECK(r.exitCode == 1);
  CHECK(r.output.find("IoError") != std::string::npos);
  CHECK(r.output.find("cannot read file") != std::string::npos);
}

TEST_CASE("an empty file checks clean") {
  std::filesystem::path p =
      std::filesystem::temp_directory_path() / "residuum_cli_empty.eff";
  std::ofstream(p.string()).close();
  CmdResult r = runCommand(cli() + " check --system atomicity \"" +
                           p.string() + "\"");
  CHECK(r.exitCode == 0);
  std::filesystem::remove(p);
}

TEST_CASE("explain walks the budget step by step") {
  CmdResult r = runCommand(cli() +
                           " explain --system reentrancy --seq "
                           "begin,inside,end --bound entrant");
  CHECK(r.exitCode == 0);
  CHECK(r.output.find("bound: entrant") != std::string::npos);
  CHECK(r.output.find("start: so far eps, remaining budget entrant") !=
        std::string::npos);
  CHECK(r.output.find(
            "step 1 (begin): so far locking, remaining budget unlocking") !=
        std::string::npos);
  CHECK(r.output.find(
            "step 2 (inside): so far locking, remaining budget unlocking") !=
        std::string::npos);
  CHECK(r.output.find(
            "step 3 (end): so far entrant, remaining budget entrant") !=
        std::string::npos);
  CHECK(r.output.find("every step fits within the bound") !=
        std::string::npos);
}

TEST_CASE("explain pinpoints the first failing step") {
  CmdResult seq = runCommand(
      cli() + " explain --system reentrancy --seq begin,begin --bound entrant");
  CHECK(seq.exitCode == 1);
  CHECK(seq.output.find("step 2 (begin):") != std::string::npos);
  CHECK(seq.output.find("the composition is undefined") != std::string::npos);

  CmdResult res = runCommand(
      cli() + " explain --system reentrancy --seq inside --bound eps");
  CHECK(res.exitCode == 1);
  CHECK(res.output.find("the residual of 'critical' in 'eps' is undefined") !=
        std::string::npos);
}

TEST_CASE("laws prints every law and a verdict") {
  CmdResult r = runCommand(cli() + " laws --system atomicity");
  CHECK(r.exitCode == 0);
  CHECK(r.output.find("laws for 'atomicity' (exhaustive)") !=
        std::string::npos);
  CHECK(r.output.find("all laws hold") != std::string::npos);
  for (const char* law :
       {"unit-left", "unit-right", "seq-associative", "join-commutative",
        "join-idempotent", "join-associative", "distributes-left",
        "distributes-right", "iter-extensive", "iter-idempotent",
        "iter-monotone", "iter-foldable", "iter-possibly-empty",
        "loop-unrolling", "resid-bounding", "resid-existence", "resid-self",
        "resid-unit", "resid-sequencing", "resid-shifting", "resid-antitone"}) {
    CAPTURE(law);
    CHECK(r.output.find(std::string("  ") + law + ":") != std::string::npos);
  }
}

TEST_CASE("verify prints a readable report") {
  CmdResult r =
      runCommand(cli() + " verify --system atomicity --max-nodes 3");
  CHECK(r.exitCode == 0);
  CHECK(r.output.find("verification of 'atomicity' up to 3 nodes") !=
        std::string::npos);
  CHECK(r.output.find("  ok") != std::string::npos);
}

TEST_CASE("usage mistakes exit 2") {
  CHECK(runCommand(cli()).exitCode == 2);
  CHECK(runCommand(cli() + " check --system atomicity").exitCode == 2);
  CHECK(runCommand(cli() + " check --system atomicity --format yaml " +
                   corpus("atomicity_append.eff"))
            .exitCode == 2);
}
