#include <doctest.h>

#include <sstream>

#include "emss/common.hpp"
#include "emss/netlist.hpp"

using namespace emss;

TEST_CASE("parses element cards, comments and dot cards") {
  std::istringstream in(
      "* header comment\n"
      "r1 a b 9.0 $ trailing comment\n"
      "R2 b c 1k\n"
      "\n"
      "i1 a 0 1m ; load\n"
      "v1 c 0 1.0\n"
      ".op\n"
      ".end\n"
      "r_after_end x y 1\n");
  Netlist net = parse_spice(in);
  REQUIRE(net.resistors.size() == 2);
  REQUIRE(net.current_sources.size() == 1);
  REQUIRE(net.voltage_sources.size() == 1);
  CHECK(net.resistors[0].ohms == 9.0);
  CHECK(net.resistors[1].ohms == 1000.0);
  CHECK(net.resistors[1].line == 3);
  CHECK(net.current_sources[0].value == 1e-3);
  CHECK(net.node_index("x") == -1);  // nothing after .end
  CHECK(net.node_count() == 4);      // a b c 0
}

TEST_CASE("value suffixes") {
  CHECK(parse_spice_value("2meg", 1, 1) == 2e6);
  CHECK(parse_spice_value("1.5K", 1, 1) == 1500.0);
  CHECK(parse_spice_value("10u", 1, 1) == 10e-6);
  CHECK(parse_spice_value("3n", 1, 1) == 3e-9);
  CHECK(parse_spice_value("7p", 1, 1) == 7e-12);
  CHECK(parse_spice_value("-4m", 1, 1) == -4e-3);
  CHECK(parse_spice_value("1e3", 1, 1) == 1000.0);
  CHECK_THROWS_AS(parse_spice_value("1x", 1, 1), ParseError);
  CHECK_THROWS_AS(parse_spice_value("ohm", 1, 1), ParseError);
}

TEST_CASE("parse errors carry line and column") {
  SUBCASE("unsupported card") {
    std::istringstream in("c1 a b 1p\n");
    try {
      parse_spice(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 1);
      CHECK(e.column() == 1);
    }
  }
  SUBCASE("short card") {
    std::istringstream in("r1 a b\n");
    CHECK_THROWS_AS(parse_spice(in), ParseError);
  }
  SUBCASE("trailing token") {
    std::istringstream in("r1 a b 1 extra\n");
    CHECK_THROWS_AS(parse_spice(in), ParseError);
  }
  SUBCASE("duplicate element") {
    std::istringstream in("r1 a b 1\nR1 b c 2\n");
    CHECK_THROWS_AS(parse_spice(in), ParseError);
  }
  SUBCASE("negative resistance") {
    std::istringstream in("r1 a b -5\n");
    CHECK_THROWS_AS(parse_spice(in), ParseError);
  }
}

TEST_CASE("serialize round trips") {
  std::istringstream in(
      "r1 a b 9.0\n"
      "rv b c 0\n"
      "i1 a 0 0.0005\n"
      "v1 c 0 1.0\n");
  Netlist net = parse_spice(in);
  std::istringstream again(serialize_spice(net));
  Netlist net2 = parse_spice(again);
  REQUIRE(net2.resistors.size() == net.resistors.size());
  CHECK(net2.resistors[1].ohms == 0.0);
  CHECK(net2.current_sources[0].value == 5e-4);
  CHECK(net2.node_count() == net.node_count());
}

TEST_CASE("collapse_shorts merges nodes and keeps card order") {
  std::istringstream in(
      "r1 a b 2\n"
      "rs b c 0\n"
      "r2 c d 3\n"
      "rg e 0 0\n"
      "r3 d e 4\n"
      "i1 d 0 1m\n"
      "v1 a 0 1\n");
  Netlist net = parse_spice(in);
  ShortCollapse sc = collapse_shorts(net);
  CHECK(sc.merged_elements == 2);
  // b and c merged (first-seen name wins); e merged into ground
  CHECK(sc.resolve("c") == "b");
  CHECK(sc.resolve("e") == "0");
  CHECK(sc.resolve("a") == "a");
  REQUIRE(sc.reduced.resistors.size() == 3);
  CHECK(sc.reduced.resistors[0].name == "r1");
  CHECK(sc.reduced.resistors[1].name == "r2");
  CHECK(sc.reduced.resistors[2].name == "r3");
  CHECK(sc.reduced.resistors[1].node_a == "b");
  CHECK(sc.reduced.resistors[2].node_b == "0");
  CHECK(sc.reduced.voltage_sources[0].node_a == "a");
}

TEST_CASE("collapse_shorts with no shorts is a rename-free copy") {
  std::istringstream in("r1 a b 2\nr2 b c 3\n");
  Netlist net = parse_spice(in);
  ShortCollapse sc = collapse_shorts(net);
  CHECK(sc.merged_elements == 0);
  CHECK(sc.canonical.empty());
  CHECK(sc.reduced.resistors.size() == 2);
}
