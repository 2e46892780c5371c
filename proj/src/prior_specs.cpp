#include "igw/prior_specs.hpp"

#include <cmath>

namespace igw {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void positive(double v, const char* what)
{
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidHyperparameter(std::string(what) + " must be positive and finite");
}

void spd(const MatrixXd& M, const char* what)
{
    if (M.rows() == 0 || M.rows() != M.cols()) throw DimensionMismatch(std::string(what) + " must be square");
    if (!is_spd(M)) throw InvalidHyperparameter(std::string(what) + " must be positive definite");
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

bool close(const MatrixXd& a, const MatrixXd& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    const double scale = std::max({1e-300, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
    return (a - b).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

}  // namespace

PriorSpec huang_wand(const VectorXd& s, double nu) { return HuangWandPrior{s, nu}; }

std::string family_name(const PriorSpec& spec)
{
    return std::visit(overloaded{
                          [](const InvChiSqPrior&) { return std::string("Inverse-chi-squared"); },
                          [](const InvGammaPrior&) { return std::string("Inverse-Gamma"); },
                          [](const InvWishartPrior&) { return std::string("Inverse-Wishart"); },
                          [](const HalfTPrior&) { return std::string("Half-t"); },
                          [](const HalfCauchyPrior&) { return std::string("Half-Cauchy"); },
                          [](const HuangWandPrior&) { return std::string("Huang-Wand"); },
                          [](const MatrixFPrior&) { return std::string("Matrix-F"); },
                      },
                      spec);
}

Index spec_dimension(const PriorSpec& spec)
{
    return std::visit(overloaded{
                          [](const InvWishartPrior& p) { return p.Lambda.rows(); },
                          [](const HuangWandPrior& p) { return p.s.size(); },
                          [](const MatrixFPrior& p) { return p.B.rows(); },
                          [](const auto&) { return Index(1); },
                      },
                      spec);
}

void validate_spec(const PriorSpec& spec)
{
    std::visit(overloaded{
                   [](const InvChiSqPrior& p) {
                       positive(p.delta, "Inverse-chi-squared delta");
                       positive(p.lambda, "Inverse-chi-squared lambda");
                   },
                   [](const InvGammaPrior& p) {
                       positive(p.alpha, "Inverse-Gamma alpha");
                       positive(p.beta, "Inverse-Gamma beta");
                   },
                   [](const InvWishartPrior& p) {
                       spd(p.Lambda, "Inverse-Wishart scale");
                       if (!(p.kappa > p.Lambda.rows() - 1.0))
                           throw InvalidHyperparameter("Inverse-Wishart kappa must exceed d - 1");
                   },
                   [](const HalfTPrior& p) {
                       positive(p.s, "Half-t scale");
                       positive(p.nu, "Half-t degrees of freedom");
                   },
                   [](const HalfCauchyPrior& p) { positive(p.s, "Half-Cauchy scale"); },
                   [](const HuangWandPrior& p) {
                       if (p.s.size() == 0) throw DimensionMismatch("Huang-Wand needs at least one scale");
                       for (Index j = 0; j < p.s.size(); ++j) positive(p.s(j), "Huang-Wand scale");
                       positive(p.nu, "Huang-Wand nu");
                   },
                   [](const MatrixFPrior& p) {
                       spd(p.B, "Matrix-F scale");
                       if (!(p.nu > p.B.rows() - 1.0)) throw InvalidHyperparameter("Matrix-F nu must exceed d - 1");
                       positive(p.delta, "Matrix-F delta");
                   },
               },
               spec);
}

FragmentPlan plan_prior(const PriorSpec& spec, Index d)
{
    validate_spec(spec);
    if (spec_dimension(spec) != d)
        throw DimensionMismatch(family_name(spec) + " prior has dimension " + std::to_string(spec_dimension(spec)) +
                                ", expected " + std::to_string(d));
    const double dd = static_cast<double>(d);
    auto one = [](double v) { return MatrixXd::Constant(1, 1, v); };
    FragmentPlan plan = std::visit(
        overloaded{
            [&](const InvChiSqPrior& p) { return FragmentPlan{{Graph::Full, p.delta, one(p.lambda)}, std::nullopt}; },
            [&](const InvGammaPrior& p) {
                return FragmentPlan{{Graph::Full, 2.0 * p.alpha, one(2.0 * p.beta)}, std::nullopt};
            },
            [&](const InvWishartPrior& p) {
                return FragmentPlan{{Graph::Full, p.kappa + dd - 1.0, symmetrized(p.Lambda)}, std::nullopt};
            },
            [&](const HalfTPrior& p) {
                return FragmentPlan{{Graph::Diag, 1.0, one(1.0 / (p.nu * p.s * p.s))},
                                    IteratedIGWInputs{p.nu, Graph::Full, Graph::Diag}};
            },
            [&](const HalfCauchyPrior& p) {
                return FragmentPlan{{Graph::Diag, 1.0, one(1.0 / (p.s * p.s))},
                                    IteratedIGWInputs{1.0, Graph::Full, Graph::Diag}};
            },
            [&](const HuangWandPrior& p) {
                const VectorXd diag = (p.nu * p.s.array().square()).inverse().matrix();
                return FragmentPlan{{Graph::Diag, 1.0, MatrixXd(diag.asDiagonal())},
                                    IteratedIGWInputs{p.nu + 2.0 * dd - 2.0, Graph::Full, Graph::Diag}};
            },
            [&](const MatrixFPrior& p) {
                return FragmentPlan{{Graph::Full, p.nu + dd - 1.0, spd_inverse(symmetrized(p.B))},
                                    IteratedIGWInputs{p.delta + 2.0 * dd - 2.0, Graph::Full, Graph::Full}};
            },
        },
        spec);
    make_common_igw(plan.alg1.graph_Theta, plan.alg1.xi_Theta, plan.alg1.Lambda_Theta);
    return plan;
}

bool equivalent_specs(const PriorSpec& a, const PriorSpec& b)
{
    const Index d = spec_dimension(a);
    if (spec_dimension(b) != d) return false;
    const FragmentPlan pa = plan_prior(a, d), pb = plan_prior(b, d);
    if (pa.alg1.graph_Theta != pb.alg1.graph_Theta || !close(pa.alg1.xi_Theta, pb.alg1.xi_Theta) ||
        !close(pa.alg1.Lambda_Theta, pb.alg1.Lambda_Theta))
        return false;
    if (pa.alg2.has_value() != pb.alg2.has_value()) return false;
    if (!pa.alg2) return true;
    return close(pa.alg2->xi, pb.alg2->xi) && pa.alg2->G == pb.alg2->G && pa.alg2->G_A_to_f == pb.alg2->G_A_to_f;
}

MatrixXd sample_prior(const FragmentPlan& plan, Rng& rng)
{
    const CommonIGW first = make_common_igw(plan.alg1.graph_Theta, plan.alg1.xi_Theta, plan.alg1.Lambda_Theta);
    const MatrixXd A = igw_sample(first, rng);
    if (!plan.alg2) return A;
    return igw_sample(make_common_igw(plan.alg2->G, plan.alg2->xi, spd_inverse(A)), rng);
}

}  // namespace igw
