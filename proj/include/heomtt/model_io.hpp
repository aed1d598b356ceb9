#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heomtt/system.hpp"

namespace heomtt::io {

struct BathConfig {
    CMat coupling;
    bath::SpectralDensity sd;
    std::string sd_unit = "au";     // "au" or "ev" for the spectral-density parameters
    double temperature_K = 298.0;
    int matsubara = 0;
    int discretize = 0;             // > 0: Makri modes replace the continuous density
    bool renormalize = false;       // add lambda * S to the Hamiltonian
};

struct InitialConfig {
    enum class Kind { Populations, Pure, Density, Eigenstate };
    Kind kind = Kind::Pure;
    std::vector<double> populations;
    int index = 0;
    CMat density;
};

struct PulseConfig {
    bool pi_pulse = false;
    double E0 = 0.0;                 // a.u.; derived for pi pulses
    double omega = 0.0;              // energy unit of the file
    double tau = 0.0;                // time unit of the file
    double t_start = 0.0;
    std::pair<int, int> transition{0, 1};
};

struct RunConfig {
    std::string backend = "dense";   // dense | tt
    int level = 4;                   // dense truncation L
    int n_max = 4;                   // tt per-mode cap; n_heom = n_max + 1
    std::string integrator = "rk4";  // rk4 | rk45 | ksl
    double dt = 0.01;                // time unit of the file
    double t_final = 100.0;
    int output_stride = 1;
    double eps = 1e-12;
    int rmax = 20;
    int rank_refresh = 10;
    int pad_rank = 0;
    std::string output = "out";
    unsigned seed = 1;
};

struct ModelFile {
    std::string name;
    std::string energy_unit = "au";  // au | ev
    std::string time_unit = "fs";    // fs | au
    std::vector<std::string> states;
    CMat hamiltonian;
    CMat renormalization;            // optional explicit H_ren
    CMat dipole;
    InitialConfig initial;
    std::optional<PulseConfig> pulse;
    std::vector<BathConfig> baths;
    std::string basis = "site";      // site | eigen
    std::vector<std::pair<int, int>> coherences;
    std::optional<RunConfig> run;
};

/// Throws ConfigError with the offending field path on malformed input.
ModelFile parse_model(const std::string& json_text);
ModelFile load_model(const std::string& path);
/// Range and backend/integrator compatibility checks; errors name p.
void validate_run(const RunConfig& rc, const std::string& p = "$.run");
std::string serialize_model(const ModelFile& m);

double energy_to_au(const ModelFile& m, double x);
double time_to_au(const ModelFile& m, double x);

/// Spectral density in atomic units, before any discretization.
bath::SpectralDensity sd_in_au(const BathConfig& b);
/// Spectral density actually fed to the expansion (Makri modes if requested).
bath::SpectralDensity effective_sd(const BathConfig& b);

/// Atomic-unit SystemModel with expanded baths.
SystemModel build_model(const ModelFile& m);
CMat initial_density(const ModelFile& m, const SystemModel& model);
/// Columns are the observation basis vectors (identity for the site basis;
/// eigenvectors of H + H_ren in ascending energy for the eigen basis).
CMat observation_basis(const ModelFile& m, const SystemModel& model);

} // namespace heomtt::io
