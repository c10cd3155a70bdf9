#include <catch2/catch_amalgamated.hpp>

#include "mucalc/lts.hpp"

using namespace mucalc;

namespace {
const char* kChain =
    "actions t\n"
    "init s0\n"
    "state s0 A\n"
    "state s1 B\n"
    "state s2 A\n"
    "state s3 B\n"
    "state s4 A\n"
    "edge s0 t s0\n"
    "edge s0 t s1\n"
    "edge s1 t s2\n"
    "edge s2 t s2\n"
    "edge s2 t s3\n"
    "edge s3 t s4\n"
    "edge s4 t s4\n";
}

TEST_CASE("parse the section-3 chain") {
  Lts m = parse_lts(kChain);
  REQUIRE(m.num_states() == 5);
  int edges = 0;
  for (auto& row : m.adj)
    for (auto& ss : row) edges += static_cast<int>(ss.size());
  REQUIRE(edges == 7);
  REQUIRE(m.has_prop(0, "A"));
  REQUIRE(m.has_prop(1, "B"));
  REQUIRE(m.init == 0);
}

TEST_CASE("single state no edges") {
  Lts m = parse_lts("init s0\nstate s0\n");
  REQUIRE(m.num_states() == 1);
  REQUIRE(m.actions.empty());
}

TEST_CASE("lts parse errors") {
  REQUIRE_THROWS(parse_lts("init s0\nstate s0\nedge s0 a s1\n"));  // undeclared state
  REQUIRE_THROWS(parse_lts("state s0\n"));                         // missing init
  REQUIRE_THROWS(parse_lts("init s0\nstate s0\nstate s0\n"));      // duplicate state
  REQUIRE_THROWS(parse_lts("init s0\nstate s0\nfoo bar\n"));       // unknown directive
  REQUIRE_THROWS(parse_lts("actions a\ninit s0\nstate s0\nedge s0 b s0\n"));
}

TEST_CASE("serialize round trip") {
  Lts m = parse_lts(kChain);
  Lts n = parse_lts(serialize(m));
  REQUIRE(serialize(m) == serialize(n));
  REQUIRE(n.num_states() == 5);
}

TEST_CASE("enumeration counts for one state") {
  // 2^{|props|} labellings x 2^{|actions|} self-loop choices
  long n = enumerate_lts(1, {"P"}, {"a"}, [](const Lts&) { return true; });
  REQUIRE(n == 4);
  long n2 = enumerate_lts(1, {"P", "Q"}, {"a"}, [](const Lts&) { return true; });
  REQUIRE(n2 == 8);
  long n0 = enumerate_lts(0, {"P"}, {"a"}, [](const Lts&) { return true; });
  REQUIRE(n0 == 0);
}

TEST_CASE("enumeration is deterministic and validated") {
  std::vector<std::string> first, second;
  enumerate_lts(2, {"P"}, {"a"}, [&](const Lts& m) {
    validate(m);
    first.push_back(serialize(m));
    return true;
  });
  enumerate_lts(2, {"P"}, {"a"}, [&](const Lts& m) {
    second.push_back(serialize(m));
    return true;
  });
  REQUIRE(first == second);
  REQUIRE(first.size() > 4);
  // duplicate-free
  std::set<std::string> uniq(first.begin(), first.end());
  REQUIRE(uniq.size() == first.size());
}

TEST_CASE("random lts reproducible and valid") {
  LtsBounds b;
  b.max_states = 3;
  b.props = {"P"};
  b.actions = {"a", "b"};
  Lts m1 = random_lts(42, b);
  Lts m2 = random_lts(42, b);
  REQUIRE(serialize(m1) == serialize(m2));
  REQUIRE(m1.num_states() <= 3);
  for (uint64_t s = 0; s < 1000; ++s) validate(random_lts(s, b));
}
