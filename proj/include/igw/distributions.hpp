#pragma once

#include <random>
#include <string>
#include <utility>

#include "igw/matops.hpp"
#include "igw/special.hpp"

namespace igw {

using Rng = std::mt19937_64;

enum class Graph { Full, Diag };

std::string to_string(Graph g);
Graph graph_from_string(const std::string& s);

// (d+1)/2 for the full graph, 1 for the diagonal graph.
inline double graph_omega(Graph g, Index d) { return g == Graph::Full ? (d + 1) / 2.0 : 1.0; }

// Inverse G-Wishart in shape/scale form.
struct CommonIGW {
    Graph graph = Graph::Full;
    double xi = 0.0;
    MatrixXd Lambda;

    Index dim() const { return Lambda.rows(); }
};

// Validates and canonicalizes (symmetrizes Lambda; zeroes off-diagonals for Diag).
CommonIGW make_common_igw(Graph graph, double xi, const MatrixXd& Lambda);

struct NaturalIGW {
    Graph graph = Graph::Full;
    double eta1 = 0.0;
    VectorXd eta2;  // vech-form, length d(d+1)/2

    Index dim() const { return dim_from_vech_length(eta2.size()); }
    VectorXd stacked() const;
    static NaturalIGW from_stacked(Graph graph, const VectorXd& eta);
};

NaturalIGW igw_to_natural(const CommonIGW& p);
CommonIGW igw_from_natural(const NaturalIGW& n);

// vec^{-1}(D^{+T} eta2); equals -Lambda/2.
MatrixXd igw_natural_matrix(const NaturalIGW& n);

// Throws ImproperMessage unless eta1 < -1 and the implied scale is positive definite
// (positive diagonal for Diag).
void require_proper(const NaturalIGW& n, const std::string& what);
bool is_proper(const NaturalIGW& n);

MatrixXd igw_mean_inverse(const NaturalIGW& n);
MatrixXd igw_mean_inverse(const CommonIGW& p);

double igw_log_density(const CommonIGW& p, const MatrixXd& X);
MatrixXd igw_sample(const CommonIGW& p, Rng& rng);

// Conventional Wishart(nu, S) with E(X) = nu * S, by the Bartlett decomposition.
MatrixXd wishart_sample(double nu, const MatrixXd& S, Rng& rng);

// Inverse Wishart(kappa, Lambda) with density prop. to |X|^{-(kappa+d+1)/2} exp(-tr(Lambda X^{-1})/2).
double inv_wishart_log_density(double kappa, const MatrixXd& Lambda, const MatrixXd& X);

// log of the multivariate gamma function Gamma_d(a).
double log_multigamma(double a, Index d);

double inv_chisq_log_density(double delta, double lambda, double x);
double inv_gamma_log_density(double alpha, double beta, double x);
double gamma_log_density(double shape, double rate, double x);
double half_t_log_density(double s, double nu, double x);

// Draws from Inverse-chi^2(delta, lambda).
double inv_chisq_sample(double delta, double lambda, Rng& rng);

struct NaturalMVN {
    VectorXd eta1;
    VectorXd eta2;  // vech-form

    Index dim() const { return eta1.size(); }
    VectorXd stacked() const;
    static NaturalMVN from_stacked(const VectorXd& eta);
};

struct MVNMoments {
    VectorXd mean;
    MatrixXd cov;
};

NaturalMVN mvn_to_natural(const VectorXd& mu, const MatrixXd& Sigma);
MVNMoments mvn_from_natural(const NaturalMVN& n);
MatrixXd mvn_precision(const NaturalMVN& n);

// vech-form <-> vec-form maps: blockdiag(I, D^T) and blockdiag(I, D^{+T}).
VectorXd mvn_vech_to_vec_form(const NaturalMVN& n);
NaturalMVN mvn_vec_form_to_vech(const VectorXd& eta_vec, Index k);

// Moon Rock: density prop. to {t^t / Gamma(t)}^alpha exp(-beta t) on t > 0.
struct MoonRockParams {
    double alpha = 0.0;
    double beta = 1.0;
};

class MoonRock {
public:
    // Throws InvalidHyperparameter for alpha < 0 or beta <= 0 and DivergentIntegral
    // when the normalizing integral is not finite.
    MoonRock(double alpha, double beta);
    explicit MoonRock(const MoonRockParams& p) : MoonRock(p.alpha, p.beta) {}

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

    double log_normalizer() const { return quad_.log_integral; }
    double normalizer() const;
    double mean() const;
    double mean_log() const;
    double log_density(double t) const;

    // Point t_hi with upper tail mass below `mass` (from the quadrature nodes).
    double upper_point(double mass) const;
    // Range of s = log t covered by the quadrature.
    std::pair<double, double> log_support() const;

    // Log kernel in s = log t, including the Jacobian.
    double log_kernel_s(double s) const;

private:
    double alpha_, beta_;
    LogQuadrature quad_;
};

double moonrock_normalizer(const MoonRockParams& p);
double moonrock_mean(const MoonRockParams& p);

// Inverse-CDF sampler on a uniform grid in s = log t.
class MoonRockSampler {
public:
    explicit MoonRockSampler(const MoonRock& mr, int grid_size = 2048);
    double operator()(Rng& rng) const;

private:
    std::vector<double> s_;
    std::vector<double> cdf_;
};

}  // namespace igw
