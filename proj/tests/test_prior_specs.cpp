#include "doctest.h"

#include "igw/prior_specs.hpp"
#include "igw/stats.hpp"
#include "oracles.hpp"

using namespace igw;

namespace {

// Marginal density of a scalar parameter x under a two-level plan, integrating out a on a fine log grid.
double two_level_marginal(const FragmentPlan& plan, double x)
{
    const CommonIGW first = make_common_igw(plan.alg1.graph_Theta, plan.alg1.xi_Theta, plan.alg1.Lambda_Theta);
    const double c = std::log(first.Lambda(0, 0));
    auto g = [&](double u) {
        const double a = std::exp(u);
        const CommonIGW second = make_common_igw(plan.alg2->G, plan.alg2->xi, MatrixXd::Constant(1, 1, 1.0 / a));
        return std::exp(igw_log_density(second, MatrixXd::Constant(1, 1, x)) +
                        igw_log_density(first, MatrixXd::Constant(1, 1, a)) + u);
    };
    // Composite Simpson over u in c +- 60.
    const int n = 24000;
    const double lo = c - 60.0, hi = c + 60.0, h = (hi - lo) / n;
    double s = g(lo) + g(hi);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * g(lo + i * h);
    return s * h / 3.0;
}

double density_of_sd(const FragmentPlan& plan, double sigma) { return 2.0 * sigma * two_level_marginal(plan, sigma * sigma); }

double inv_gamma_pdf(double alpha, double beta, double x)
{
    return std::exp(alpha * std::log(beta) - std::lgamma(alpha) - (alpha + 1.0) * std::log(x) - beta / x);
}

}  // namespace

TEST_CASE("plan_prior rows")
{
    const MatrixXd L = (MatrixXd(3, 3) << 2, 0.1, 0, 0.1, 1, 0.2, 0, 0.2, 3).finished();
    const FragmentPlan iw = plan_prior(InvWishartPrior{4.0, L}, 3);
    CHECK(iw.alg1.graph_Theta == Graph::Full);
    CHECK(iw.alg1.xi_Theta == 6.0);
    CHECK(iw.alg1.Lambda_Theta == L);
    CHECK_FALSE(iw.alg2.has_value());

    const FragmentPlan hc = plan_prior(HalfCauchyPrior{1.0}, 1);
    CHECK(hc.alg1.graph_Theta == Graph::Diag);
    CHECK(hc.alg1.xi_Theta == 1.0);
    CHECK(hc.alg1.Lambda_Theta(0, 0) == 1.0);
    REQUIRE(hc.alg2.has_value());
    CHECK(hc.alg2->xi == 1.0);
    CHECK(hc.alg2->G == Graph::Full);
    CHECK(hc.alg2->G_A_to_f == Graph::Diag);

    const FragmentPlan hw = plan_prior(HuangWandPrior{VectorXd::Constant(2, 1e5)}, 2);
    CHECK(hw.alg1.graph_Theta == Graph::Diag);
    CHECK(hw.alg1.xi_Theta == 1.0);
    CHECK(hw.alg1.Lambda_Theta(0, 0) == doctest::Approx(1.0 / 2e10).epsilon(1e-15));
    CHECK(hw.alg1.Lambda_Theta(1, 1) == doctest::Approx(1.0 / 2e10).epsilon(1e-15));
    CHECK(hw.alg1.Lambda_Theta(0, 1) == 0.0);
    REQUIRE(hw.alg2.has_value());
    CHECK(hw.alg2->xi == 4.0);
    CHECK(hw.alg2->G == Graph::Full);
    CHECK(hw.alg2->G_A_to_f == Graph::Diag);

    const FragmentPlan ig = plan_prior(InvGammaPrior{2.0, 3.0}, 1);
    CHECK(ig.alg1.xi_Theta == 4.0);
    CHECK(ig.alg1.Lambda_Theta(0, 0) == 6.0);

    const FragmentPlan ht = plan_prior(HalfTPrior{2.0, 3.0}, 1);
    CHECK(ht.alg1.Lambda_Theta(0, 0) == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
    CHECK(ht.alg2->xi == 3.0);

    const MatrixXd B = (MatrixXd(2, 2) << 2.0, 0.5, 0.5, 1.0).finished();
    const FragmentPlan mf = plan_prior(MatrixFPrior{3.0, 2.0, B}, 2);
    CHECK(mf.alg1.graph_Theta == Graph::Full);
    CHECK(mf.alg1.xi_Theta == 4.0);
    CHECK((mf.alg1.Lambda_Theta - B.inverse()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(mf.alg2->xi == 4.0);
    CHECK(mf.alg2->G_A_to_f == Graph::Full);
}

TEST_CASE("plan_prior rejects invalid specs")
{
    CHECK_THROWS_AS(plan_prior(HalfCauchyPrior{-1.0}, 1), InvalidHyperparameter);
    CHECK_THROWS_AS(plan_prior(HalfCauchyPrior{1.0}, 2), DimensionMismatch);
    CHECK_THROWS_AS(plan_prior(InvWishartPrior{0.5, MatrixXd::Identity(2, 2)}, 2), ValidationError);
    CHECK_THROWS_AS(plan_prior(InvChiSqPrior{1.0, 0.0}, 1), ValidationError);
}

TEST_CASE("plan_prior is deterministic")
{
    const PriorSpec s = HuangWandPrior{(VectorXd(2) << 3.0, 0.5).finished(), 2.0};
    const FragmentPlan a = plan_prior(s, 2), b = plan_prior(s, 2);
    CHECK(a.alg1.Lambda_Theta == b.alg1.Lambda_Theta);
    CHECK(a.alg1.xi_Theta == b.alg1.xi_Theta);
    CHECK(a.alg2->xi == b.alg2->xi);
}

TEST_CASE("equivalent_specs")
{
    CHECK(equivalent_specs(InvChiSqPrior{4.0, 6.0}, InvGammaPrior{2.0, 3.0}));
    CHECK_FALSE(equivalent_specs(InvChiSqPrior{4.0, 6.0}, InvGammaPrior{2.0, 4.0}));
    CHECK(equivalent_specs(HalfCauchyPrior{2.5}, HalfTPrior{2.5, 1.0}));
    CHECK_FALSE(equivalent_specs(HalfCauchyPrior{2.5}, HalfTPrior{2.5, 2.0}));
    CHECK(equivalent_specs(HuangWandPrior{VectorXd::Constant(1, 3.0), 4.0}, HalfTPrior{3.0, 4.0}));
}

TEST_CASE("family names")
{
    CHECK(family_name(InvChiSqPrior{1, 1}) == "Inverse-chi-squared");
    CHECK(family_name(HalfCauchyPrior{1}) == "Half-Cauchy");
    CHECK(family_name(huang_wand(VectorXd::Ones(2))) == "Huang-Wand");
    CHECK(family_name(MatrixFPrior{2, 1, MatrixXd::Identity(2, 2)}) == "Matrix-F");
}

TEST_CASE("single-level rows: the prior message is the declared density")
{
    const std::vector<double> grid = linspace(0.05, 6.0, 50);
    auto check_row = [&](const PriorSpec& spec, const std::function<double(double)>& pdf) {
        const FragmentPlan plan = plan_prior(spec, 1);
        const CommonIGW q = igw_from_natural(igw_prior_update(plan.alg1).eta);
        for (double x : grid)
            CHECK(std::abs(std::exp(igw_log_density(q, MatrixXd::Constant(1, 1, x))) - pdf(x)) < 1e-6);
    };
    check_row(InvChiSqPrior{3.0, 2.0}, [](double x) { return oracle::inv_chisq_pdf(3.0, 2.0, x); });
    check_row(InvGammaPrior{1.5, 0.7}, [](double x) { return inv_gamma_pdf(1.5, 0.7, x); });
    check_row(InvWishartPrior{2.5, MatrixXd::Constant(1, 1, 1.3)}, [](double x) { return oracle::inv_chisq_pdf(2.5, 1.3, x); });

    // d = 2 Inverse-Wishart: message density equals the IW(kappa, Lambda) density.
    std::mt19937_64 rng(4);
    const MatrixXd L = oracle::random_spd(2, rng);
    const FragmentPlan plan = plan_prior(InvWishartPrior{5.0, L}, 2);
    const CommonIGW q = igw_from_natural(igw_prior_update(plan.alg1).eta);
    for (int r = 0; r < 50; ++r) {
        const MatrixXd X = oracle::random_spd(2, rng);
        CHECK(std::abs(std::exp(igw_log_density(q, X)) - std::exp(inv_wishart_log_density(5.0, L, X))) < 1e-6);
    }
}

TEST_CASE("two-level rows reproduce the declared prior after integrating out the auxiliary variable")
{
    for (auto [s, nu] : {std::pair{1.0, 1.0}, std::pair{2.0, 3.0}, std::pair{0.7, 6.0}}) {
        const FragmentPlan plan = plan_prior(HalfTPrior{s, nu}, 1);
        for (double sig : linspace(0.02 * s, 5.0 * s, 50))
            CHECK(std::abs(density_of_sd(plan, sig) - oracle::half_t_pdf(s, nu, sig)) < 1e-6);
    }
    const FragmentPlan hc = plan_prior(HalfCauchyPrior{1.5}, 1);
    for (double sig : linspace(0.03, 7.5, 50)) CHECK(std::abs(density_of_sd(hc, sig) - oracle::half_t_pdf(1.5, 1.0, sig)) < 1e-6);

    const FragmentPlan hw = plan_prior(HuangWandPrior{VectorXd::Constant(1, 2.0), 2.0}, 1);
    for (double sig : linspace(0.04, 10.0, 50)) CHECK(std::abs(density_of_sd(hw, sig) - oracle::half_t_pdf(2.0, 2.0, sig)) < 1e-6);

    // Matrix-F at d = 1: p(x) proportional to x^{(nu-2)/2} (1 + x/B)^{-(nu+delta)/2}.
    const double nu = 3.0, delta = 2.5, B = 1.7;
    const FragmentPlan mf = plan_prior(MatrixFPrior{nu, delta, MatrixXd::Constant(1, 1, B)}, 1);
    auto kernel = [&](double x) { return std::pow(x, (nu - 2.0) / 2.0) * std::pow(1.0 + x / B, -(nu + delta) / 2.0); };
    const double z = oracle::integrate_positive(kernel, -40.0, 200.0, 1e-14);
    for (double x : linspace(0.05, 8.0, 50)) CHECK(std::abs(two_level_marginal(mf, x) - kernel(x) / z) < 1e-6);
}

TEST_CASE("Huang-Wand construction: uniform correlation and Half-t standard deviations")
{
    Rng rng(8);
    const FragmentPlan plan = plan_prior(HuangWandPrior{(VectorXd(2) << 1.0, 3.0).finished(), 2.0}, 2);
    const int n = 50000;
    VectorXd rho(n), s1(n), s2(n);
    for (int i = 0; i < n; ++i) {
        const MatrixXd S = sample_prior(plan, rng);
        rho(i) = S(0, 1) / std::sqrt(S(0, 0) * S(1, 1));
        s1(i) = std::sqrt(S(0, 0));
        s2(i) = std::sqrt(S(1, 1)) / 3.0;
    }
    CHECK(ks_distance(rho, [](double r) { return std::clamp((r + 1.0) / 2.0, 0.0, 1.0); }) < 0.012);
    // |t_2| has CDF x / sqrt(2 + x^2).
    auto abs_t2 = [](double x) { return x / std::sqrt(2.0 + x * x); };
    CHECK(ks_distance(s1, abs_t2) < 0.012);
    CHECK(ks_distance(s2, abs_t2) < 0.012);
}
