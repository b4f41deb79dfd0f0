#include <doctest.h>

#include "compver/instrument.hpp"
#include "test_support.hpp"

using namespace compver;
using namespace compver::testing;

namespace {

Contract increment_contract() {
  Contract c;
  c.function_name = "increment";
  c.preconditions = {"x > 0"};
  c.assigns = {"x"};
  c.postconditions = {"__ESBMC_return_value > x"};
  return c;
}

}  // namespace

TEST_CASE("enforce mode puts requires, assigns, ensures at the top of the body") {
  auto m = corpus_model("increment.c");
  auto src = render_enforce(m, increment_contract());
  CHECK(src.mode == RenderMode::enforce);
  CHECK(src.target == "increment");
  CHECK(src.text.find("int increment(int x) {\n"
                      "    __ESBMC_requires(x > 0);\n"
                      "    __ESBMC_assigns(x);\n"
                      "    __ESBMC_ensures(__ESBMC_return_value > x);\n"
                      "    return x + 1;") != std::string::npos);
  CHECK(strip(src) == m.source_text);
}

TEST_CASE("invariant becomes the first statement of a braced loop") {
  auto m = corpus_model("summation.c");
  Contract c;
  c.function_name = "sum_to";
  c.postconditions = {"__ESBMC_return_value >= 0"};
  c.loop_invariants[0] = "sum == i * (i - 1) / 2";
  auto src = render_enforce(m, c);
  CHECK(src.text.find("for (int i = 0; i < n; i++) { __ESBMC_loop_invariant(sum == i * (i - 1) / 2);\n"
                      "        sum += i;") != std::string::npos);
  CHECK(strip(src) == m.source_text);
}

TEST_CASE("unbraced loop bodies get braces") {
  auto m = corpus_model("array_fill.c");
  Contract c;
  c.function_name = "fill";
  c.postconditions = {"buf[0] == v"};
  c.loop_invariants[0] = "i >= 0";
  auto src = render_enforce(m, c);
  CHECK(src.text.find("for (int i = 0; i < N; ++i)\n        { __ESBMC_loop_invariant(i >= 0); buf[i] = v; }") !=
        std::string::npos);
  CHECK(strip(src) == m.source_text);
}

TEST_CASE("replace mode annotates every contracted function and no invariants") {
  auto m = corpus_model("two_callers.c");
  ContractSet cs;
  Contract sq;
  sq.function_name = "square";
  sq.postconditions = {"__ESBMC_return_value == x * x"};
  sq.loop_invariants[0] = "1";
  Contract ss;
  ss.function_name = "sum_squares";
  ss.postconditions = {"__ESBMC_return_value == a * a + b * b"};
  cs.emplace("square", sq);
  cs.emplace("sum_squares", ss);
  auto src = render_replace(m, cs);
  CHECK(src.mode == RenderMode::replace);
  CHECK(src.replaced == std::vector<std::string>{"square", "sum_squares"});
  CHECK(src.text.find("__ESBMC_loop_invariant") == std::string::npos);
  CHECK(src.text.find("__ESBMC_ensures(__ESBMC_return_value == x * x);") != std::string::npos);
  CHECK(strip(src) == m.source_text);
}

TEST_CASE("plain rendering is the source") {
  auto m = corpus_model("gcd.c");
  auto src = render_plain(m);
  CHECK(src.text == m.source_text);
  CHECK(src.replaced.empty());
}

TEST_CASE("injections are sorted and attributed") {
  auto m = corpus_model("increment.c");
  auto src = render_enforce(m, increment_contract());
  REQUIRE(src.injections.size() == 3);
  for (std::size_t i = 1; i < src.injections.size(); ++i)
    CHECK(src.injections[i - 1].offset <= src.injections[i].offset);
  CHECK(src.injections[0].clause == "x > 0");
  CHECK(src.injections[0].function == "increment");
}

TEST_CASE("tab indentation is reused") {
  auto m = corpus_model("tabs_and_crlf.c");
  Contract c;
  c.function_name = "neg";
  c.postconditions = {"__ESBMC_return_value == -x"};
  auto src = render_enforce(m, c);
  CHECK(src.text.find("\n\t__ESBMC_ensures(__ESBMC_return_value == -x);") != std::string::npos);
  CHECK(strip(src) == m.source_text);
}

TEST_CASE("instrumentation errors") {
  auto m = corpus_model("increment.c");
  Contract c;
  c.function_name = "nope";
  c.postconditions = {"1"};
  CHECK_THROWS_AS(render_enforce(m, c), InstrumentError);
  c.function_name = "increment";
  c.loop_invariants[3] = "1";
  try {
    render_enforce(m, c);
    FAIL("expected an error");
  } catch (const InstrumentError& e) {
    CHECK(e.kind() == InstrumentError::Kind::loop_ordinal_out_of_range);
  }
}
