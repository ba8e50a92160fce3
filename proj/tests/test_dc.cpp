#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "emss/common.hpp"
#include "emss/dc.hpp"
#include "emss/netlist.hpp"

using namespace emss;

namespace {

Netlist from(const char* cards) {
  std::istringstream in(cards);
  return parse_spice(in);
}

}  // namespace

TEST_CASE("voltage divider") {
  Netlist net = from(
      "v1 in 0 10\n"
      "r1 in mid 4\n"
      "r2 mid 0 6\n");
  DcSolution dc = solve_dc(net);
  CHECK(dc.node_voltage[net.node_index("in")] == doctest::Approx(10.0));
  CHECK(dc.node_voltage[net.node_index("mid")] == doctest::Approx(6.0));
  CHECK(dc.node_voltage[net.node_index("0")] == 0.0);
  CHECK(dc.resistor_current[0] == doctest::Approx(1.0));  // in -> mid
  CHECK(dc.resistor_current[1] == doctest::Approx(1.0));  // mid -> 0
  CHECK(dc.residual_norm <= 1e-8);
  CHECK(verify_solution(net, dc) <= 1e-9);
}

TEST_CASE("current source into a resistor") {
  Netlist net = from(
      "i1 0 a 2\n"
      "r1 a 0 5\n");
  DcSolution dc = solve_dc(net);
  CHECK(dc.node_voltage[net.node_index("a")] == doctest::Approx(10.0));
  CHECK(dc.resistor_current[0] == doctest::Approx(2.0));
}

TEST_CASE("voltage source between two floating-side nodes uses an MNA row") {
  Netlist net = from(
      "v1 a b 1\n"
      "r1 a 0 1\n"
      "r2 b 0 1\n");
  DcSolution dc = solve_dc(net);
  CHECK(dc.node_voltage[net.node_index("a")] == doctest::Approx(0.5));
  CHECK(dc.node_voltage[net.node_index("b")] == doctest::Approx(-0.5));
}

TEST_CASE("voltage sources chain through known nodes") {
  Netlist net = from(
      "v1 a 0 5\n"
      "v2 a b 2\n"
      "r1 b 0 3\n");
  DcSolution dc = solve_dc(net);
  CHECK(dc.node_voltage[net.node_index("b")] == doctest::Approx(3.0));
  CHECK(dc.resistor_current[0] == doctest::Approx(1.0));
}

TEST_CASE("ground falls back to the first source's negative terminal") {
  Netlist net = from(
      "v1 a b 2\n"
      "r1 a b 1\n");
  DcSolution dc = solve_dc(net);
  CHECK(dc.node_voltage[net.node_index("b")] == 0.0);
  CHECK(dc.node_voltage[net.node_index("a")] == doctest::Approx(2.0));
  CHECK(dc.resistor_current[0] == doctest::Approx(2.0));
}

TEST_CASE("self-loop resistor carries no current and does not break the solve") {
  Netlist net = from(
      "v1 a 0 1\n"
      "r1 a a 5\n");
  DcSolution dc = solve_dc(net);
  CHECK(dc.resistor_current[0] == 0.0);
}

TEST_CASE("iterative path matches the direct path") {
  Netlist net = from(
      "v1 in 0 10\n"
      "r1 in mid 4\n"
      "r2 mid out 2\n"
      "r3 out 0 6\n"
      "i1 mid 0 0.5\n");
  DcSolution direct = solve_dc(net);
  DcOptions opt;
  opt.direct_limit = 0;  // force conjugate gradient
  DcSolution iter = solve_dc(net, opt);
  for (int i = 0; i < net.node_count(); ++i)
    CHECK(iter.node_voltage[i] ==
          doctest::Approx(direct.node_voltage[i]).epsilon(1e-8));
}

TEST_CASE("structural failures are reported") {
  SUBCASE("floating subnetwork") {
    Netlist net = from(
        "v1 c 0 1\n"
        "r0 c 0 1\n"
        "r1 a b 1\n");
    CHECK_THROWS_WITH_AS(solve_dc(net), "floating subnetwork (node a)", Error);
  }
  SUBCASE("no reference at all") {
    Netlist net = from(
        "r1 a b 1\n"
        "i1 a b 1\n");
    CHECK_THROWS_AS(solve_dc(net), Error);
  }
  SUBCASE("inconsistent sources") {
    Netlist net = from(
        "v1 a 0 5\n"
        "v2 a 0 4\n"
        "r1 a 0 1\n");
    CHECK_THROWS_AS(solve_dc(net), Error);
  }
  SUBCASE("zero-ohm resistor must be collapsed first") {
    Netlist net = from(
        "v1 a 0 1\n"
        "rs a b 0\n");
    CHECK_THROWS_AS(solve_dc(net), Error);
  }
}

TEST_CASE("verify_solution flags KCL violations at interior nodes") {
  Netlist net = from(
      "v1 in 0 10\n"
      "r1 in mid 4\n"
      "r2 mid 0 6\n");
  DcSolution dc = solve_dc(net);
  CHECK(verify_solution(net, dc) <= 1e-9);
  dc.node_voltage[net.node_index("mid")] += 0.12;
  // 0.12/4 + 0.12/6 = 0.05 A imbalance at mid
  CHECK(verify_solution(net, dc) == doctest::Approx(0.05));
}

TEST_CASE("import_voltages derives currents by Ohm's law") {
  Netlist net = from(
      "r1 a b 2\n"
      "i1 b 0 1\n");
  std::string path = "/tmp/emss_volts.csv";
  {
    std::ofstream out(path);
    out << "name,volts\n# comment\na,3.0\nb,1.0\n";
  }
  DcSolution dc = import_voltages(net, path);
  CHECK(dc.node_voltage[net.node_index("a")] == 3.0);
  CHECK(dc.node_voltage[net.node_index("0")] == 0.0);  // implicit ground
  CHECK(dc.resistor_current[0] == doctest::Approx(1.0));
  std::remove(path.c_str());

  {
    std::ofstream out(path);
    out << "a,3.0\n";  // b missing
  }
  CHECK_THROWS_WITH_AS(import_voltages(net, path),
                       "imported voltages missing node b", Error);
  std::remove(path.c_str());
}
