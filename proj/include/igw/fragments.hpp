#pragma once

#include "igw/distributions.hpp"

namespace igw {

// Strict: combined natural vectors must be proper densities.
// Deferred: only invertibility is required; used while an iteration is
// still moving away from its starting values.
enum class Properness { Strict, Deferred };

struct IGWPriorInputs {
    Graph graph_Theta = Graph::Full;
    double xi_Theta = 0.0;
    MatrixXd Lambda_Theta;
};

struct IGWPriorOutput {
    Graph graph;
    NaturalIGW eta;
};

IGWPriorOutput igw_prior_update(const IGWPriorInputs& in);

struct IteratedIGWState {
    Graph G = Graph::Full;
    double xi = 0.0;
    Graph G_A_to_f = Graph::Diag;
    NaturalIGW eta_Sigma_to_f;
    NaturalIGW eta_f_to_Sigma;
    NaturalIGW eta_A_to_f;
    NaturalIGW eta_f_to_A;
};

struct IteratedIGWOutput {
    Graph G_f_to_Sigma;
    Graph G_f_to_A;
    NaturalIGW eta_f_to_Sigma;
    NaturalIGW eta_f_to_A;
};

IteratedIGWOutput iterated_igw_update(const IteratedIGWState& st, Properness mode = Properness::Strict);

struct MoonRockPriorInputs {
    double alpha_theta = 0.0;
    double beta_theta = 1.0;
};

Eigen::Vector2d moonrock_prior_update(const MoonRockPriorInputs& in);

struct PenalizationDims {
    Index p = 0;
    Index m = 0;
    Index q = 0;
    Index total() const { return p + m * q; }
};

struct GaussianPenalizationOutput {
    NaturalMVN eta_f_to_thetau;
    NaturalIGW eta_f_to_Sigma;
};

// Factor p(beta, u | Sigma) with beta ~ N(0, sigma_beta^2 I_p) and u_i ~ N(0, Sigma).
GaussianPenalizationOutput gaussian_penalization_update(const NaturalMVN& eta_thetau_to_f,
                                                        const NaturalMVN& eta_f_to_thetau,
                                                        const NaturalIGW& eta_Sigma_to_f,
                                                        const NaturalIGW& eta_f_to_Sigma, double sigma_beta,
                                                        const PenalizationDims& dims,
                                                        Properness mode = Properness::Strict);

struct TLikelihoodOutput {
    NaturalMVN eta_f_to_thetau;
    NaturalIGW eta_f_to_sigma2;
    Eigen::Vector2d eta_f_to_upsilon;
};

// Factor p(y | beta, u, sigma^2, b) p(b | upsilon) with the b_l integrated inside.
// y_l | b_l ~ N((C theta)_l, b_l sigma^2), b_l | upsilon ~ Inverse-chi^2(2 upsilon, 2 upsilon).
TLikelihoodOutput t_likelihood_update(const VectorXd& y, const MatrixXd& C, const NaturalMVN& eta_thetau_to_f,
                                      const NaturalMVN& eta_f_to_thetau, const NaturalIGW& eta_sigma2_to_f,
                                      const NaturalIGW& eta_f_to_sigma2, const Eigen::Vector2d& eta_upsilon_to_f,
                                      const Eigen::Vector2d& eta_f_to_upsilon, Properness mode = Properness::Strict);

// E(X^{-1}) of the Inverse G-Wishart with natural vector n; in Deferred mode
// the implied scale only has to be invertible.
MatrixXd igw_expected_inverse(const NaturalIGW& n, Properness mode, const std::string& what);

// Moments of a Gaussian natural vector; in Deferred mode the precision only has to be invertible.
MVNMoments mvn_moments(const NaturalMVN& n, Properness mode, const std::string& what);

}  // namespace igw
