#include <cstdio>
#include <sstream>

#include "CLI11.hpp"

#include "igw/cli.hpp"

namespace {

Eigen::VectorXd parse_list(const std::string& s)
{
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw igw::ValidationError("--s-Sigma: '" + item + "' is not a number");
        }
    }
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Variational message passing and Gibbs sampling for t-response linear mixed models"};
    app.require_subcommand(1);

    igw::RunConfig cfg;
    std::string s_Sigma, design = "full", config;
    double sigma_beta = cfg.hyper.sigma_beta, s_sigma = cfg.hyper.s_sigma, lambda_nu = cfg.hyper.lambda_nu;
    long long m = cfg.m, n = cfg.n_per_group;

    auto common = [&](CLI::App* sub, bool needs_input) {
        if (needs_input) sub->add_option("--input", cfg.input, "Input CSV (group,y,x1)")->required();
        sub->add_option("--output", cfg.output, "Output path")->required();
        sub->add_option("--seed", cfg.seed, "Random seed");
        sub->add_option("--design", design, "Random-effects design: full or intercept");
    };
    auto model = [&](CLI::App* sub) {
        sub->add_option("--sigma-beta", sigma_beta, "Prior sd of the fixed effects");
        sub->add_option("--s-sigma", s_sigma, "Half-Cauchy scale for sigma");
        sub->add_option("--s-Sigma", s_Sigma, "Comma list of Huang-Wand scales");
        sub->add_option("--lambda-nu", lambda_nu, "Rate of the exponential prior on nu");
        sub->add_option("--config", config, "JSON file with prior families and hyperparameters");
    };
    auto vmp = [&](CLI::App* sub) {
        sub->add_option("--tol", cfg.tol, "Relative convergence tolerance");
        sub->add_option("--max-iters", cfg.max_iters, "Maximum number of sweeps");
    };
    auto mcmc = [&](CLI::App* sub) {
        sub->add_option("--warmup", cfg.warmup, "Gibbs warmup iterations");
        sub->add_option("--kept", cfg.kept, "Gibbs iterations kept");
    };

    CLI::App* sim = app.add_subcommand("simulate", "Simulate a data set from the default true values");
    common(sim, false);
    sim->add_option("--groups", m, "Number of groups");
    sim->add_option("--per-group", n, "Observations per group");
    CLI::App* fv = app.add_subcommand("fit-vmp", "Fit by variational message passing");
    common(fv, true);
    model(fv);
    vmp(fv);
    CLI::App* fm = app.add_subcommand("fit-mcmc", "Fit by Gibbs sampling");
    common(fm, true);
    model(fm);
    mcmc(fm);
    CLI::App* cmp = app.add_subcommand("compare", "Fit both ways and compare marginal posteriors");
    common(cmp, true);
    model(cmp);
    vmp(cmp);
    mcmc(cmp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : igw::kExitValidation;
    }

    try {
        cfg.command = app.get_subcommands().front()->get_name();
        cfg.design = igw::design_from_string(design);
        cfg.m = m;
        cfg.n_per_group = n;
        cfg.hyper.sigma_beta = sigma_beta;
        cfg.hyper.s_sigma = s_sigma;
        cfg.hyper.lambda_nu = lambda_nu;
        const Eigen::Index q = cfg.design == igw::Design::InterceptSlope ? 2 : 1;
        cfg.hyper.s_Sigma = s_Sigma.empty() ? Eigen::VectorXd::Constant(q, cfg.hyper.s_Sigma(0)) : parse_list(s_Sigma);
        if (!config.empty()) igw::apply_config(igw::read_json(config), cfg.hyper);

        if (cfg.command == "simulate") return igw::cmd_simulate(cfg);
        if (cfg.command == "fit-vmp") return igw::cmd_fit_vmp(cfg);
        if (cfg.command == "fit-mcmc") return igw::cmd_fit_mcmc(cfg);
        return igw::cmd_compare(cfg);
    } catch (const igw::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return igw::kExitValidation;
    } catch (const igw::NotConverged& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return igw::kExitNotConverged;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return igw::kExitError;
    }
}
