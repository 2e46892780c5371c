#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "igw/cli.hpp"
#include "igw/stats.hpp"

using namespace igw;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "igwvmp_tests";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("simulate command writes deterministic CSV")
{
    RunConfig cfg;
    cfg.command = "simulate";
    cfg.seed = 4;
    cfg.output = scratch("sim_a.csv").string();
    CHECK(cmd_simulate(cfg) == kExitOk);
    const std::string a = slurp(cfg.output);
    CHECK(a.rfind("group,y,x1\n", 0) == 0);
    CHECK(std::count(a.begin(), a.end(), '\n') == 301);
    cfg.output = scratch("sim_b.csv").string();
    cmd_simulate(cfg);
    CHECK(slurp(cfg.output) == a);

    cfg.m = 1;
    cfg.n_per_group = 2;
    cfg.output = scratch("sim_small.csv").string();
    cmd_simulate(cfg);
    CHECK(read_csv(cfg.output).n() == 2);
}

TEST_CASE("CSV round trip")
{
    const SimulatedData sim = simulate(6, 5, 4);
    const TLMMData back = parse_csv(format_csv(sim.data));
    CHECK(back.y == sim.data.y);
    CHECK(back.x1 == sim.data.x1);
    CHECK(back.groups == sim.data.groups);
    CHECK(back.C == sim.data.C);
    CHECK(back.m == sim.data.m);
}

TEST_CASE("malformed CSV rows name the line")
{
    auto message = [](const std::string& text) {
        try {
            parse_csv(text);
        } catch (const ParseError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("group,y,x1\n1,0.5,0.2\n1,abc,0.3\n").find("line 3") != std::string::npos);
    CHECK(message("group,y,x1\n1,0.5\n").find("line 2") != std::string::npos);
    CHECK(message("g,y,x\n").find("line 1") != std::string::npos);
    CHECK(message("group,y,x1\n1.5,0.5,0.2\n").find("line 2") != std::string::npos);
    CHECK_THROWS_AS(read_csv(scratch("does_not_exist.csv").string()), IOError);
}

TEST_CASE("fit-vmp command output")
{
    RunConfig sim;
    sim.command = "simulate";
    sim.output = scratch("fit_in.csv").string();
    cmd_simulate(sim);

    RunConfig cfg;
    cfg.command = "fit-vmp";
    CHECK(cfg.tol == 1e-10);
    CHECK(cfg.hyper.sigma_beta == 1e5);
    CHECK(cfg.hyper.s_sigma == 1e5);
    CHECK(cfg.hyper.s_Sigma == VectorXd::Constant(2, 1e5));
    CHECK(cfg.hyper.lambda_nu == 0.01);
    cfg.input = sim.output;
    cfg.output = scratch("fit_out.json").string();
    CHECK(cmd_fit_vmp(cfg) == kExitOk);
    const json j = read_json(cfg.output);
    for (const char* k : {"method", "converged", "iterations", "beta_u", "sigma2", "Sigma", "upsilon", "nu_density"})
        CHECK(j.contains(k));
    CHECK(j["method"] == "vmp");
    CHECK(j["beta_u"].contains("mean"));
    CHECK(j["beta_u"].contains("cov"));
    CHECK(j["Sigma"].contains("kappa"));
    CHECK(j["nu_density"]["grid"].size() == j["nu_density"]["values"].size());
    CHECK(fs::exists(cfg.output + ".log"));

    // At least 12 significant digits in the text.
    const std::string text = slurp(cfg.output);
    const std::size_t pos = text.find("\"lambda\": ");
    REQUIRE(pos != std::string::npos);
    std::string num = text.substr(pos + 10, text.find_first_of(",\n}", pos + 10) - pos - 10);
    std::size_t digits = 0;
    for (char ch : num.substr(0, num.find_first_of("eE")))
        if (std::isdigit(static_cast<unsigned char>(ch))) ++digits;
    CHECK(digits >= 12);

    // Natural parameters regenerate the reported common parameters.
    const PosteriorSummary s = posterior_from_json(j);
    const CommonIGW cS = igw_from_natural(s.q_Sigma);
    CHECK(std::abs(cS.xi - s.Sigma_xi) < 1e-10 * s.Sigma_xi);
    CHECK((cS.Lambda - s.Sigma_Lambda).cwiseAbs().maxCoeff() < 1e-10 * s.Sigma_Lambda.cwiseAbs().maxCoeff());
    const CommonIGW cs2 = igw_from_natural(s.q_sigma2);
    CHECK(std::abs(cs2.xi - s.sigma2_delta) < 1e-10 * s.sigma2_delta);
    CHECK(std::abs(cs2.Lambda(0, 0) - s.sigma2_lambda) < 1e-10 * s.sigma2_lambda);
    const MVNMoments th = mvn_from_natural(s.q_beta_u);
    CHECK((th.mean - s.beta_u_mean).cwiseAbs().maxCoeff() < 1e-10 * s.beta_u_mean.cwiseAbs().maxCoeff());
    CHECK((th.cov - s.beta_u_cov).cwiseAbs().maxCoeff() < 1e-10 * s.beta_u_cov.cwiseAbs().maxCoeff());
    CHECK(s.q_upsilon(0) == s.upsilon_alpha);
    CHECK(-s.q_upsilon(1) == s.upsilon_beta);

    cfg.max_iters = 3;
    cfg.output = scratch("fit_short.json").string();
    CHECK(cmd_fit_vmp(cfg) == kExitNotConverged);
    CHECK(read_json(cfg.output)["converged"] == false);
}

TEST_CASE("prior configuration")
{
    TLMMHyper h;
    apply_config(json::parse(R"({"sigma_prior": {"family": "Half-t", "s": 2, "nu": 3},
                                 "Sigma_prior": {"family": "Inverse-Wishart", "kappa": 3, "Lambda": [[1, 0], [0, 2]]},
                                 "lambda_nu": 0.1})"),
                 h);
    CHECK(equivalent_specs(h.sigma_spec(), HalfTPrior{2.0, 3.0}));
    CHECK(equivalent_specs(h.Sigma_spec(), InvWishartPrior{3.0, (MatrixXd(2, 2) << 1, 0, 0, 2).finished()}));
    CHECK(h.lambda_nu == 0.1);
    for (const PriorSpec& p : {PriorSpec(InvChiSqPrior{2, 3}), PriorSpec(InvGammaPrior{1, 2}), PriorSpec(HalfCauchyPrior{4}),
                               PriorSpec(HuangWandPrior{VectorXd::Ones(2), 3.0}),
                               PriorSpec(MatrixFPrior{3, 2, MatrixXd::Identity(2, 2)})})
        CHECK(equivalent_specs(parse_prior(prior_to_json(p)), p));
    CHECK_THROWS_AS(apply_config(json::parse(R"({"bogus": 1})"), h), ParseError);
    CHECK_THROWS_AS(parse_prior(json::parse(R"({"family": "Lognormal"})")), ParseError);
    CHECK_THROWS_AS(parse_prior(json::parse(R"({"family": "Half-t", "s": 2})")), ParseError);
}

TEST_CASE("accuracy score")
{
    const std::vector<double> g = linspace(-6.0, 6.0, 801);
    std::vector<double> f(g.size()), h(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        f[i] = std::exp(-0.5 * g[i] * g[i]) / std::sqrt(2.0 * M_PI);
        h[i] = std::exp(-0.5 * (g[i] - 1.0) * (g[i] - 1.0)) / std::sqrt(2.0 * M_PI);
    }
    CHECK(accuracy_score(g, f, f) == 100.0);
    // Two unit normals one apart overlap by 2 Phi(-1/2).
    CHECK(accuracy_score(g, f, h) == doctest::Approx(100.0 * 2.0 * 0.3085375387259869).epsilon(1e-4));
}

TEST_CASE("compare on a Gaussian-limit data set")
{
    TLMMTruth t;
    t.nu = 1e4;
    const SimulatedData sim = simulate(8, 20, 15, t);
    // Near the Gaussian limit the degrees-of-freedom update contracts slowly.
    const PosteriorSummary v = fit(sim.data, TLMMHyper{}, {1e-10, 5000, std::nullopt});
    REQUIRE(v.converged);
    GibbsConfig cfg;
    cfg.seed = 8;
    const ChainOutput c = gibbs_fit(sim.data, TLMMHyper{}, cfg);
    const std::vector<ParamComparison> rows = compare_fits(v, c);
    bool has_s1 = false, has_s2 = false, has_rho = false;
    for (const auto& r : rows) {
        if (r.name == "beta0" || r.name == "beta1") CHECK(r.accuracy > 95.0);
        has_s1 |= r.name == "sigma_1";
        has_s2 |= r.name == "sigma_2";
        has_rho |= r.name == "rho";
        CHECK(r.grid.size() == r.q_vmp.size());
        CHECK(r.grid.size() == r.q_mcmc.size());
    }
    CHECK(has_s1);
    CHECK(has_s2);
    CHECK(has_rho);
}

TEST_CASE("compare command writes density grids")
{
    RunConfig sim;
    sim.command = "simulate";
    sim.m = 6;
    sim.n_per_group = 10;
    sim.output = scratch("cmp_in.csv").string();
    cmd_simulate(sim);
    RunConfig cfg;
    cfg.command = "compare";
    cfg.input = sim.output;
    cfg.output = scratch("cmp_out.json").string();
    cfg.warmup = 200;
    cfg.kept = 500;
    CHECK(cmd_compare(cfg) == kExitOk);
    const json j = read_json(cfg.output);
    CHECK(j["method"] == "compare");
    CHECK(j["mcmc"]["method"] == "mcmc");
    CHECK(j["parameters"].size() == scalar_names(2, 6, 2).size());
    const std::string stem = output_stem(cfg.output);
    for (const char* p : {"beta0", "u1_0", "sigma", "nu", "sigma_1", "rho"}) {
        const std::string csv = slurp(stem + "_" + p + ".csv");
        CHECK(csv.rfind("value,q_vmp,q_mcmc\n", 0) == 0);
    }
}

TEST_CASE("run configuration validation")
{
    RunConfig cfg;
    cfg.command = "fit-vmp";
    cfg.output = "x.json";
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.input = "x.csv";
    cfg.tol = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    CHECK(output_stem("a/b.json") == "a/b");
    CHECK(output_stem("a/b") == "a/b");
}
