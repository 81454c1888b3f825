#include "dredge/adapter.hpp"

#include <cstdlib>

#include <doctest.h>

#include "dredge/ddmin.hpp"
#include "dredge/errors.hpp"
#include "helpers.hpp"

using namespace dredge;
using namespace dredge::testing;

namespace {

std::string stub_path() {
  const char* path = std::getenv("DREDGE_STUB");
  REQUIRE_MESSAGE(path != nullptr,
                  "DREDGE_STUB must point at dredge-stub-adapter "
                  "(set automatically under ctest)");
  return path;
}

}  // namespace

TEST_CASE("command line splitting honors quotes and escapes") {
  CHECK(split_command_line("python3 adapter.py --x 1") ==
        std::vector<std::string>{"python3", "adapter.py", "--x", "1"});
  CHECK(split_command_line("run \"a b\" 'c d' e\\ f") ==
        std::vector<std::string>{"run", "a b", "c d", "e f"});
  CHECK(split_command_line("  spaced   out  ") ==
        std::vector<std::string>{"spaced", "out"});
  CHECK(split_command_line("keep '' empty") ==
        std::vector<std::string>{"keep", "", "empty"});
}

TEST_CASE("stub adapter round-trips the documented protocol") {
  ExternalModel model({stub_path(), "--label", "1", "--score", "0.84"},
                      std::chrono::milliseconds(5000));
  Program program = make_program({"if", "(", "x", ")"}, Language::java, "s1");
  Prediction prediction = model.predict(program);
  CHECK(prediction.label == "1");
  CHECK(prediction.score == 0.84);
  CHECK(model.requests_sent() == 1);
  // Sequential requests reuse the same process.
  model.predict(program);
  CHECK(model.requests_sent() == 2);
}

TEST_CASE("score 1.2 from the adapter is a protocol error") {
  ExternalModel model({stub_path(), "--bad-score"},
                      std::chrono::milliseconds(5000));
  CHECK_THROWS_AS(model.predict(make_program({"x"})), ProtocolError);
}

TEST_CASE("adapter crash mid-request surfaces as adapter error, then respawns") {
  ExternalModel model({stub_path(), "--keyword", "if", "--crash-on", "BOOM"},
                      std::chrono::milliseconds(5000));
  CHECK(model.predict(make_program({"if", "x"})).label == "1");
  CHECK_THROWS_AS(model.predict(make_program({"BOOM"})), AdapterError);
  // The next sample gets a fresh process.
  CHECK(model.predict(make_program({"x"})).label == "0");
}

TEST_CASE("a silent adapter times out") {
  ExternalModel model({"/bin/sleep", "30"}, std::chrono::milliseconds(200));
  CHECK_THROWS_AS(model.predict(make_program({"x"})), AdapterError);
}

TEST_CASE("an unlaunchable adapter command is a configuration error") {
  CHECK_THROWS_AS(ExternalModel({"/nonexistent/adapter-binary"},
                                std::chrono::milliseconds(1000)),
                  ConfigError);
  CHECK_THROWS_AS(ExternalModel({}, std::chrono::milliseconds(1000)),
                  ConfigError);
}

TEST_CASE("ddmin drives an external adapter end to end") {
  ExternalModel model({stub_path(), "--keyword", "if"},
                      std::chrono::milliseconds(5000));
  QueryCache cache;
  Program program =
      make_program({"if", "(", "x", ")", "{", "y", "}"}, Language::c, "ext");
  ReductionTrace trace = reduce(program, model, &cache);
  CHECK(trace.status == TraceStatus::complete);
  CHECK(texts_of(trace.final_tokens()) == std::vector<std::string>{"if"});
  // Memoization shields the adapter from duplicate candidates.
  CHECK(model.requests_sent() <= trace.total_queries + 1);
  CHECK(verify_one_minimal(trace, model, &cache));
}
