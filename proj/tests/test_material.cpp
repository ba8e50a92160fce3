#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "emss/common.hpp"
#include "emss/material.hpp"

using namespace emss;

namespace {

std::string write_temp(const char* name, const std::string& body) {
  std::string path = std::string("/tmp/emss_") + name;
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("copper defaults derive the documented constants") {
  Technology t = cu_dd_defaults();
  CHECK(t.constants.beta_over_rho ==
        doctest::Approx(13577768084.745762).epsilon(1e-14));
  CHECK(t.constants.beta == doctest::Approx(305.4997819067796).epsilon(1e-14));
  CHECK(t.constants.kappa ==
        doctest::Approx(1.7750520433262453e-18).epsilon(1e-12));
  CHECK(t.constants.effective_crit == 41e6);
  REQUIRE(t.jl_crit.has_value());
  CHECK(*t.jl_crit == 2.7e5);
}

TEST_CASE("beta is exactly beta_over_rho times rho") {
  // The voltage engine divides by rho implicitly; the two engines only agree
  // to the last bit if this identity holds bitwise.
  Technology t = cu_dd_defaults();
  CHECK(t.constants.beta == t.constants.beta_over_rho * t.params.rho);
}

TEST_CASE("derived threshold matches the single-segment closed form") {
  Technology t = cu_dd_defaults();
  double jlc = default_jl_crit(t.constants);
  CHECK(jlc == doctest::Approx(268412.63024214376).epsilon(1e-14));
  // max stress of an isolated segment at |j|*l = jlc is exactly the budget
  CHECK(t.constants.beta * jlc / 2.0 ==
        doctest::Approx(t.constants.effective_crit).epsilon(1e-14));

  Technology without = t;
  without.jl_crit.reset();
  CHECK(resolved_jl_crit(without) == jlc);
  CHECK(resolved_jl_crit(t) == 2.7e5);
}

TEST_CASE("sigma_thermal shifts the effective budget") {
  MaterialParams p = cu_dd_defaults().params;
  p.sigma_thermal = 11e6;
  DerivedConstants d = derive_constants(p);
  CHECK(d.effective_crit == 30e6);
  CHECK(d.beta == cu_dd_defaults().constants.beta);  // unaffected
}

TEST_CASE("invalid parameters are rejected by name") {
  MaterialParams p = cu_dd_defaults().params;
  p.temperature = 0.0;
  CHECK_THROWS_WITH_AS(derive_constants(p), "temperature must be positive",
                       Error);
  p = cu_dd_defaults().params;
  p.atomic_volume = -1.0;
  CHECK_THROWS_WITH_AS(derive_constants(p), "atomic_volume must be positive",
                       Error);
  p = cu_dd_defaults().params;
  p.rho = std::nan("");
  CHECK_THROWS_AS(derive_constants(p), Error);
}

TEST_CASE("technology file round trip") {
  std::string path = write_temp("tech_ok.tech",
                                "# comment\n"
                                "rho = 2.25e-8\n"
                                "bulk_modulus = 28e9   # inline comment\n"
                                "atomic_volume = 1.18e-29\n"
                                "diffusion_prefactor = 1.3e-9\n"
                                "activation_energy = 0.8\n"
                                "effective_charge = 1.0\n"
                                "temperature = 378\n"
                                "sigma_crit = 41e6\n");
  Technology t = load_technology(path);
  CHECK(t.params.bulk_modulus == 28e9);
  CHECK(t.params.sigma_thermal == 0.0);  // defaulted
  CHECK_FALSE(t.jl_crit.has_value());
  CHECK(t.constants.beta == doctest::Approx(305.4997819067796).epsilon(1e-14));
  std::remove(path.c_str());
}

TEST_CASE("technology file errors") {
  SUBCASE("missing key") {
    std::string path = write_temp("tech_missing.tech", "rho = 2.25e-8\n");
    CHECK_THROWS_WITH_AS(load_technology(path),
                         "technology file missing key: bulk_modulus", Error);
    std::remove(path.c_str());
  }
  SUBCASE("unknown key") {
    Technology base = cu_dd_defaults();
    std::string body;
    body += "rho = 2.25e-8\nbulk_modulus = 28e9\natomic_volume = 1.18e-29\n";
    body += "diffusion_prefactor = 1.3e-9\nactivation_energy = 0.8\n";
    body += "effective_charge = 1.0\ntemperature = 378\nsigma_crit = 41e6\n";
    body += "blech_length = 5\n";
    std::string path = write_temp("tech_unknown.tech", body);
    CHECK_THROWS_WITH_AS(load_technology(path),
                         "unknown key in technology file: blech_length", Error);
    std::remove(path.c_str());
  }
  SUBCASE("bad number carries the line") {
    std::string path = write_temp("tech_bad.tech", "rho = 2.25e-8\nbulk_modulus = elk\n");
    try {
      load_technology(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    std::remove(path.c_str());
  }
  SUBCASE("duplicate key") {
    std::string path = write_temp("tech_dup.tech", "rho = 1\nrho = 2\n");
    CHECK_THROWS_AS(load_technology(path), ParseError);
    std::remove(path.c_str());
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_technology("/nonexistent/a.tech"), Error);
  }
}
