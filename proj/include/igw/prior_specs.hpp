#pragma once

#include <optional>
#include <string>
#include <variant>

#include "igw/fragments.hpp"

namespace igw {

// Priors on a variance sigma^2 (scalar families) or a covariance matrix Sigma.
struct InvChiSqPrior {
    double delta;
    double lambda;
};
struct InvGammaPrior {
    double alpha;
    double beta;
};
struct InvWishartPrior {
    double kappa;
    MatrixXd Lambda;
};
// Half-t / Half-Cauchy on the standard deviation sigma.
struct HalfTPrior {
    double s;
    double nu;
};
struct HalfCauchyPrior {
    double s;
};
// Half-t(s_j, nu) standard deviations; nu = 2 gives uniform correlations.
struct HuangWandPrior {
    VectorXd s;
    double nu = 2.0;
};
struct MatrixFPrior {
    double nu;
    double delta;
    MatrixXd B;
};

using PriorSpec = std::variant<InvChiSqPrior, InvGammaPrior, InvWishartPrior, HalfTPrior, HalfCauchyPrior,
                               HuangWandPrior, MatrixFPrior>;

// Huang-Wand with a general nu.
PriorSpec huang_wand(const VectorXd& s, double nu = 2.0);

struct IteratedIGWInputs {
    double xi;
    Graph G;
    Graph G_A_to_f;
};

struct FragmentPlan {
    IGWPriorInputs alg1;
    std::optional<IteratedIGWInputs> alg2;

    Index dim() const { return alg1.Lambda_Theta.rows(); }
};

std::string family_name(const PriorSpec& spec);
Index spec_dimension(const PriorSpec& spec);
void validate_spec(const PriorSpec& spec);

FragmentPlan plan_prior(const PriorSpec& spec, Index d);
bool equivalent_specs(const PriorSpec& a, const PriorSpec& b);

// One draw of the parameter from the construction the plan describes:
// a single Inverse G-Wishart, or A from the first level and then Theta | A.
MatrixXd sample_prior(const FragmentPlan& plan, Rng& rng);

}  // namespace igw
