#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "igw/gibbs.hpp"
#include "igw/io.hpp"
#include "igw/tlmm.hpp"

namespace igw {

struct RunConfig {
    std::string command;
    std::string input;
    std::string output;
    std::uint64_t seed = 1;
    double tol = 1e-10;
    int max_iters = 500;
    int warmup = 1000;
    int kept = 5000;
    Index m = 20;
    Index n_per_group = 15;
    Design design = Design::InterceptSlope;
    TLMMHyper hyper;

    void validate() const;
};

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitValidation = 2, kExitNotConverged = 3 };

struct ParamComparison {
    std::string name;
    double vmp_mean = 0.0, vmp_sd = 0.0;
    double mcmc_mean = 0.0, mcmc_sd = 0.0;
    double accuracy = 0.0;
    std::vector<double> grid, q_vmp, q_mcmc;
};

// VMP marginal densities against Gibbs kernel density estimates on a shared grid.
std::vector<ParamComparison> compare_fits(const PosteriorSummary& vmp, const ChainOutput& chain, std::uint64_t seed = 1,
                                          int grid_points = 512);

FitOptions fit_options(const RunConfig& cfg);
GibbsConfig gibbs_config(const RunConfig& cfg);

// Each returns a process exit code; errors propagate as exceptions.
int cmd_simulate(const RunConfig& cfg);
int cmd_fit_vmp(const RunConfig& cfg);
int cmd_fit_mcmc(const RunConfig& cfg);
int cmd_compare(const RunConfig& cfg);

// Output path without a trailing ".json".
std::string output_stem(const std::string& path);

}  // namespace igw
