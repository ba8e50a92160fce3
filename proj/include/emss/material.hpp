#pragma once

#include <optional>
#include <string>

namespace emss {

// Technology constants in strict SI; activation energy in eV.
struct MaterialParams {
  double rho = 0.0;                  // resistivity, ohm*m
  double bulk_modulus = 0.0;         // Pa
  double atomic_volume = 0.0;        // m^3
  double diffusion_prefactor = 0.0;  // m^2/s
  double activation_energy = 0.0;    // eV
  double effective_charge = 0.0;     // dimensionless
  double temperature = 0.0;          // K
  double sigma_crit = 0.0;           // Pa
  double sigma_thermal = 0.0;        // Pa, offsets sigma_crit
};

struct DerivedConstants {
  double beta = 0.0;           // Z*.e.rho/Omega, (Pa/m) per (A/m^2) ... Pa*m/A... stress per (j*l)
  double beta_over_rho = 0.0;  // Z*.e/Omega; beta == beta_over_rho * rho bitwise
  double kappa = 0.0;          // Da.B.Omega/(kT), m^2/s
  double effective_crit = 0.0; // sigma_crit - sigma_thermal
};

// Throws Error naming the offending field if the params are invalid.
DerivedConstants derive_constants(const MaterialParams& params);

struct Technology {
  MaterialParams params;
  DerivedConstants constants;
  std::optional<double> jl_crit;  // A/m; derived from constants when absent
};

// Immortality threshold for a single segment: max stress beta*|j|*l/2 stays
// below the effective critical stress exactly when |j|*l <= 2*crit/beta.
double default_jl_crit(const DerivedConstants& constants);

double resolved_jl_crit(const Technology& tech);

// Copper dual-damascene defaults shipped with the tool.
Technology cu_dd_defaults();

// Flat `key = value` technology file, SI units, keys matching the
// MaterialParams field names. sigma_thermal defaults to 0, jl_crit optional.
Technology load_technology(const std::string& path);

}  // namespace emss
