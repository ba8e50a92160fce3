#include "emss/material.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "emss/common.hpp"

namespace emss {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(what);
}

}  // namespace

DerivedConstants derive_constants(const MaterialParams& p) {
  require(std::isfinite(p.rho) && p.rho > 0.0, "resistivity must be positive");
  require(std::isfinite(p.bulk_modulus) && p.bulk_modulus > 0.0,
          "bulk_modulus must be positive");
  require(std::isfinite(p.atomic_volume) && p.atomic_volume > 0.0,
          "atomic_volume must be positive");
  require(std::isfinite(p.diffusion_prefactor) && p.diffusion_prefactor > 0.0,
          "diffusion_prefactor must be positive");
  require(std::isfinite(p.activation_energy) && p.activation_energy >= 0.0,
          "activation_energy must be non-negative");
  require(std::isfinite(p.effective_charge) && p.effective_charge > 0.0,
          "effective_charge must be positive");
  require(std::isfinite(p.temperature) && p.temperature > 0.0,
          "temperature must be positive");
  require(std::isfinite(p.sigma_crit), "sigma_crit must be finite");
  require(std::isfinite(p.sigma_thermal), "sigma_thermal must be finite");

  DerivedConstants d;
  d.beta_over_rho = p.effective_charge * kElementaryCharge / p.atomic_volume;
  d.beta = d.beta_over_rho * p.rho;
  const double kT = kBoltzmann * p.temperature;
  const double da =
      p.diffusion_prefactor *
      std::exp(-p.activation_energy * kElementaryCharge / kT);
  d.kappa = da * p.bulk_modulus * p.atomic_volume / kT;
  d.effective_crit = p.sigma_crit - p.sigma_thermal;
  return d;
}

double default_jl_crit(const DerivedConstants& constants) {
  return 2.0 * constants.effective_crit / constants.beta;
}

double resolved_jl_crit(const Technology& tech) {
  return tech.jl_crit ? *tech.jl_crit : default_jl_crit(tech.constants);
}

Technology cu_dd_defaults() {
  Technology t;
  t.params.rho = 2.25e-8;
  t.params.bulk_modulus = 28e9;
  t.params.atomic_volume = 1.18e-29;
  t.params.diffusion_prefactor = 1.3e-9;
  t.params.activation_energy = 0.8;
  t.params.effective_charge = 1.0;
  t.params.temperature = 378.0;
  t.params.sigma_crit = 41e6;
  t.params.sigma_thermal = 0.0;
  t.constants = derive_constants(t.params);
  t.jl_crit = 2.7e5;  // 0.27 A/um, matches 2*crit/beta for these constants
  return t;
}

Technology load_technology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open technology file: " + path);

  std::map<std::string, double> values;
  std::string linebuf;
  int lineno = 0;
  while (std::getline(in, linebuf)) {
    ++lineno;
    std::string line = linebuf;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);

    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected `key = value` in technology file", lineno);
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      auto a = s.find_first_not_of(" \t");
      auto b = s.find_last_not_of(" \t");
      s = (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
    };
    trim(key);
    trim(val);
    if (key.empty()) throw ParseError("empty key in technology file", lineno);
    try {
      size_t used = 0;
      double v = std::stod(val, &used);
      if (used != val.size())
        throw ParseError("trailing characters after value for " + key, lineno);
      if (values.count(key))
        throw ParseError("duplicate key " + key, lineno);
      values[key] = v;
    } catch (const std::invalid_argument&) {
      throw ParseError("invalid number for key " + key, lineno);
    } catch (const std::out_of_range&) {
      throw ParseError("value out of range for key " + key, lineno);
    }
  }

  Technology t;
  auto take = [&](const char* key, double* dst, bool required,
                  double fallback = 0.0) {
    auto it = values.find(key);
    if (it == values.end()) {
      if (required)
        throw Error(std::string("technology file missing key: ") + key);
      *dst = fallback;
      return;
    }
    *dst = it->second;
    values.erase(it);
  };
  take("rho", &t.params.rho, true);
  take("bulk_modulus", &t.params.bulk_modulus, true);
  take("atomic_volume", &t.params.atomic_volume, true);
  take("diffusion_prefactor", &t.params.diffusion_prefactor, true);
  take("activation_energy", &t.params.activation_energy, true);
  take("effective_charge", &t.params.effective_charge, true);
  take("temperature", &t.params.temperature, true);
  take("sigma_crit", &t.params.sigma_crit, true);
  take("sigma_thermal", &t.params.sigma_thermal, false, 0.0);
  if (auto it = values.find("jl_crit"); it != values.end()) {
    t.jl_crit = it->second;
    values.erase(it);
  }
  if (!values.empty())
    throw Error("unknown key in technology file: " + values.begin()->first);

  t.constants = derive_constants(t.params);
  return t;
}

}  // namespace emss
