#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "igw/tlmm.hpp"

namespace igw {

struct ChainState {
    VectorXd beta_u;
    double sigma2 = 1.0;
    MatrixXd Sigma;
    double upsilon = 1.0;
};

struct GibbsConfig {
    int warmup = 1000;
    int kept = 5000;
    std::uint64_t seed = 1;
    int nu_grid_size = 2048;

    // Conditioning hooks: hold b at 1 (Gaussian errors), or hold sigma^2 / Sigma fixed.
    bool fix_b_one = false;
    std::optional<double> fixed_sigma2;
    std::optional<MatrixXd> fixed_Sigma;
    std::optional<ChainState> init;

    void validate() const;
};

struct ChainOutput {
    Index p = 0, m = 0, q = 0;
    MatrixXd beta_u;  // kept x (p + m q)
    VectorXd sigma2;
    VectorXd nu;
    std::vector<MatrixXd> Sigma;
    std::vector<MatrixXd> A;  // empty for single-level Sigma priors
    VectorXd a;               // empty for single-level sigma^2 priors
};

ChainOutput gibbs_fit(const TLMMData& data, const TLMMHyper& hyper, const GibbsConfig& cfg);

// Scalar parameters reported for comparison: beta0, beta1, u[i,k], sigma, nu,
// sigma_1.. (square roots of diag(Sigma)) and rho (q = 2).
std::vector<std::string> scalar_names(Index p, Index m, Index q);
MatrixXd scalar_draws(const ChainOutput& chain);

struct ScalarSummary {
    std::string name;
    double mean = 0.0;
    double sd = 0.0;
    std::vector<double> grid;
    std::vector<double> density;
};

struct ChainSummary {
    std::vector<ScalarSummary> params;
    // First and second halves agree in mean within 2 batch-means standard errors.
    bool split_half_ok = true;
    std::vector<std::string> split_half_failures;

    const ScalarSummary& get(const std::string& name) const;
};

ChainSummary summarize(const ChainOutput& chain, int grid_points = 512);

}  // namespace igw
