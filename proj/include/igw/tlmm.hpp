#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "igw/graph_engine.hpp"
#include "igw/prior_specs.hpp"

namespace igw {

// Random-effects design per group: (1, x) or intercept only.
enum class Design { InterceptSlope, Intercept };

std::string to_string(Design d);
Design design_from_string(const std::string& s);

struct TLMMData {
    VectorXd y;
    VectorXd x1;              // raw predictor
    std::vector<int> groups;  // 1..m, rows sorted by group
    MatrixXd X;               // N x p, columns (1, x1)
    MatrixXd Z;               // N x (m q), block diagonal
    MatrixXd C;               // [X Z]
    Index m = 0;
    Design design = Design::InterceptSlope;

    Index n() const { return y.size(); }
    Index p() const { return X.cols(); }
    Index q() const { return design == Design::InterceptSlope ? 2 : 1; }
};

// Assembles X, Z and C. Group labels are arbitrary integers; they are mapped to
// 1..m in increasing label order and rows are stably sorted by group.
TLMMData make_tlmm_data(const VectorXd& y, const VectorXd& x1, const std::vector<int>& group_labels,
                        Design design = Design::InterceptSlope);

// m groups and no observations; used for prior-only runs.
TLMMData make_empty_data(Index m, Design design = Design::InterceptSlope);

struct TLMMHyper {
    double sigma_beta = 1e5;
    double s_sigma = 1e5;
    VectorXd s_Sigma = VectorXd::Constant(2, 1e5);
    double lambda_nu = 0.01;
    // Overrides of the default Half-Cauchy(s_sigma) and Huang-Wand(s_Sigma) priors.
    std::optional<PriorSpec> sigma_prior;
    std::optional<PriorSpec> Sigma_prior;

    PriorSpec sigma_spec() const;
    PriorSpec Sigma_spec() const;
    void validate(Index q) const;
};

struct PosteriorSummary {
    bool converged = false;
    int iterations = 0;
    ConvergenceReport report;

    Index p = 0, m = 0, q = 0;
    VectorXd beta_u_mean;
    MatrixXd beta_u_cov;
    double sigma2_delta = 0.0, sigma2_lambda = 0.0;
    double Sigma_xi = 0.0, Sigma_kappa = 0.0;
    MatrixXd Sigma_Lambda;
    double upsilon_alpha = 0.0, upsilon_beta = 0.0;
    std::vector<double> nu_grid, nu_density;

    NaturalMVN q_beta_u;
    NaturalIGW q_sigma2;
    NaturalIGW q_Sigma;
    Eigen::Vector2d q_upsilon = Eigen::Vector2d::Zero();
};

struct FitOptions {
    double tol = 1e-10;
    int max_iters = 500;
    std::optional<std::vector<Index>> schedule;
};

class TLMMModel {
public:
    TLMMModel(const TLMMData& data, const TLMMHyper& hyper);

    FactorGraph& graph() { return graph_; }
    const FactorGraph& graph() const { return graph_; }
    const TLMMData& data() const { return data_; }

    // Factors in the order A, a, Sigma|A, sigma2|a, (beta,u)|Sigma, likelihood, upsilon;
    // single-level priors drop the auxiliary factors.
    Index factor_Sigma_prior() const { return f_Sigma_prior_; }
    Index factor_Sigma_iterated() const { return f_Sigma_iter_; }
    Index factor_penalization() const { return f_pen_; }
    Index factor_likelihood() const { return f_lik_; }

    Index node_Sigma() const { return n_Sigma_; }
    Index node_sigma2() const { return n_sigma2_; }
    Index node_beta_u() const { return n_theta_; }
    Index node_upsilon() const { return n_upsilon_; }

    void init_messages();
    ConvergenceReport run(const FitOptions& opt);
    void validate_q_star() const;
    PosteriorSummary summary(const ConvergenceReport& rep) const;

private:
    TLMMData data_;
    TLMMHyper hyper_;
    FactorGraph graph_;
    FragmentPlan Sigma_plan_, sigma_plan_;
    Index n_A_ = -1, n_a_ = -1, n_Sigma_ = -1, n_sigma2_ = -1, n_theta_ = -1, n_upsilon_ = -1;
    Index f_Sigma_prior_ = -1, f_sigma_prior_ = -1, f_Sigma_iter_ = -1, f_sigma_iter_ = -1;
    Index f_pen_ = -1, f_lik_ = -1, f_upsilon_ = -1;
};

TLMMModel build_graph(const TLMMData& data, const TLMMHyper& hyper);
PosteriorSummary fit(const TLMMData& data, const TLMMHyper& hyper, const FitOptions& opt = {});

struct TLMMTruth {
    VectorXd beta = (VectorXd(2) << -0.58, 1.89).finished();
    double sigma2 = 0.2;
    MatrixXd Sigma = (MatrixXd(2, 2) << 2.58, 0.22, 0.22, 1.73).finished();
    double nu = 1.5;
};

struct SimulatedData {
    TLMMData data;
    MatrixXd u;  // m x q
};

SimulatedData simulate(std::uint64_t seed, Index m = 20, Index n_per_group = 15, const TLMMTruth& truth = {},
                       Design design = Design::InterceptSlope);

// q*(nu) = q*(upsilon = nu/2) / 2 on a 401-point grid over [1e-3, nu_hi].
void nu_density_grid(const MoonRock& q_upsilon, std::vector<double>& grid, std::vector<double>& values,
                     int points = 401);

}  // namespace igw
