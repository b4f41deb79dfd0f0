#include <doctest.h>

#include "compver/universal.hpp"

using namespace compver;

TEST_CASE("quantified form") {
  auto e = encode_universal_property("\\forall int i; 0 <= i < len ==> a[i] >= 0", "i", "len");
  CHECK(e.index_decl == "u32 idx;");
  CHECK(e.assumption == "__ESBMC_assume(idx < len);");
  CHECK(e.assertion == "assert(a[idx] >= 0);");
  CHECK(e.fragment() == "u32 idx;\n__ESBMC_assume(idx < len);\nassert(a[idx] >= 0);");
}

TEST_CASE("accepted range spellings") {
  for (const char* range : {"i < n", "0 <= i < n", "0 <= i && i < n", "i >= 0 && i < n"}) {
    INFO(range);
    auto e = encode_universal_property(std::string("\\forall i; ") + range + " ==> b[i] == 0", "i", "n");
    CHECK(e.assertion == "assert(b[idx] == 0);");
  }
}

TEST_CASE("bare body with guard") {
  auto e = encode_universal_property("len > 0 ==> a[i] != 7", "i", "len");
  CHECK(e.guard == "len > 0");
  CHECK(e.assertion == "if (len > 0) assert(a[idx] != 7);");
}

TEST_CASE("fresh index avoids clashes and member names") {
  auto e = encode_universal_property("s.idx[i] > idx", "i", "n");
  CHECK(e.index_name == "idx_1");
  CHECK(e.body == "s.idx[idx_1] > idx");
  auto f = encode_universal_property("p->i + a[i] > 0", "i", "n");
  CHECK(f.body == "p->i + a[idx] > 0");
}

TEST_CASE("bound must match") {
  CHECK_THROWS_AS(encode_universal_property("\\forall i; i < m ==> a[i] > 0", "i", "n"), UnsupportedQuantifierShape);
  CHECK_NOTHROW(encode_universal_property("\\forall i; i < n+1 ==> a[i] > 0", "i", "n + 1"));
}

TEST_CASE("unsupported shapes") {
  CHECK_THROWS_AS(encode_universal_property("\\exists i; i < n ==> a[i] == 0", "i", "n"), UnsupportedQuantifierShape);
  CHECK_THROWS_AS(encode_universal_property("\\forall i; i < n ==> \\forall j; j < n ==> a[i] <= a[j]", "i", "n"),
                  UnsupportedQuantifierShape);
  CHECK_THROWS_AS(encode_universal_property("a ==> b ==> a[i] > 0", "i", "n"), UnsupportedQuantifierShape);
}

TEST_CASE("index type is configurable") {
  auto e = encode_universal_property("a[i] > 0", "i", "n", "unsigned int");
  CHECK(e.index_decl == "unsigned int idx;");
}
