#include "igw/cli.hpp"

#include <cmath>
#include <numbers>

#include "igw/stats.hpp"

namespace igw {

void RunConfig::validate() const
{
    if (output.empty()) throw ValidationError("--output is required");
    if (command != "simulate" && input.empty()) throw ValidationError("--input is required");
    if (!(tol > 0.0)) throw ValidationError("--tol must be positive");
    if (max_iters < 1) throw ValidationError("--max-iters must be >= 1");
    if (warmup < 0) throw ValidationError("--warmup must be >= 0");
    if (kept < 1) throw ValidationError("--kept must be >= 1");
    if (m < 1 || n_per_group < 1) throw ValidationError("group count and group size must be >= 1");
    hyper.validate(design == Design::InterceptSlope ? 2 : 1);
}

FitOptions fit_options(const RunConfig& cfg)
{
    FitOptions o;
    o.tol = cfg.tol;
    o.max_iters = cfg.max_iters;
    return o;
}

GibbsConfig gibbs_config(const RunConfig& cfg)
{
    GibbsConfig g;
    g.warmup = cfg.warmup;
    g.kept = cfg.kept;
    g.seed = cfg.seed;
    return g;
}

std::string output_stem(const std::string& path)
{
    const std::string ext = ".json";
    if (path.size() > ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0)
        return path.substr(0, path.size() - ext.size());
    return path;
}

int cmd_simulate(const RunConfig& cfg)
{
    cfg.validate();
    const SimulatedData sim = simulate(cfg.seed, cfg.m, cfg.n_per_group, TLMMTruth{}, cfg.design);
    write_csv(cfg.output, sim.data);
    return kExitOk;
}

int cmd_fit_vmp(const RunConfig& cfg)
{
    cfg.validate();
    const TLMMData data = read_csv(cfg.input, cfg.design);
    const PosteriorSummary s = fit(data, cfg.hyper, fit_options(cfg));
    write_json(cfg.output, to_json(s));
    write_text(cfg.output + ".log", s.report.log());
    return s.converged ? kExitOk : kExitNotConverged;
}

namespace {

json chain_json(const RunConfig& cfg, const ChainOutput& chain, const ChainSummary& cs)
{
    json j = to_json(cs);
    j["method"] = "mcmc";
    j["warmup"] = cfg.warmup;
    j["kept"] = cfg.kept;
    j["seed"] = cfg.seed;
    j["p"] = chain.p;
    j["m"] = chain.m;
    j["q"] = chain.q;
    return j;
}

std::string file_safe(const std::string& name)
{
    std::string out;
    for (char c : name) {
        if (c == '[' || c == ']') continue;
        out += c == ',' ? '_' : c;
    }
    return out;
}

// Mean and sd of a density tabulated on a grid.
void grid_moments(const std::vector<double>& x, const std::vector<double>& f, double& mean, double& sd)
{
    std::vector<double> xf(x.size()), x2f(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        xf[i] = x[i] * f[i];
        x2f[i] = x[i] * x[i] * f[i];
    }
    const double z = trapezoid(x, f);
    mean = trapezoid(x, xf) / z;
    sd = std::sqrt(std::max(0.0, trapezoid(x, x2f) / z - mean * mean));
}

// Moments of sqrt(X) for X ~ Inv-chi^2(delta, lambda).
void sqrt_inv_chisq_moments(double delta, double lambda, double& mean, double& sd)
{
    mean = std::sqrt(lambda / 2.0) * std::exp(std::lgamma((delta - 1.0) / 2.0) - std::lgamma(delta / 2.0));
    const double second = delta > 2.0 ? lambda / (delta - 2.0) : std::numeric_limits<double>::infinity();
    sd = std::sqrt(std::max(0.0, second - mean * mean));
}

double sqrt_inv_chisq_density(double delta, double lambda, double s)
{
    if (!(s > 0.0)) return 0.0;
    return 2.0 * s * std::exp(inv_chisq_log_density(delta, lambda, s * s));
}

}  // namespace

int cmd_fit_mcmc(const RunConfig& cfg)
{
    cfg.validate();
    const TLMMData data = read_csv(cfg.input, cfg.design);
    const ChainOutput chain = gibbs_fit(data, cfg.hyper, gibbs_config(cfg));
    write_json(cfg.output, chain_json(cfg, chain, summarize(chain)));
    return kExitOk;
}

std::vector<ParamComparison> compare_fits(const PosteriorSummary& vmp, const ChainOutput& chain, std::uint64_t seed,
                                          int grid_points)
{
    const Index p = chain.p, m = chain.m, q = chain.q, P = p + m * q;
    if (vmp.p != p || vmp.m != m || vmp.q != q) throw DimensionMismatch("compare: VMP and MCMC fits differ in shape");
    const std::vector<std::string> names = scalar_names(p, m, q);
    const MatrixXd D = scalar_draws(chain);

    // Monte Carlo draws of rho from q*(Sigma).
    VectorXd rho_draws;
    if (q == 2) {
        Rng rng(seed);
        const CommonIGW qS = make_common_igw(Graph::Full, vmp.Sigma_xi, vmp.Sigma_Lambda);
        rho_draws.resize(200000);
        for (Index t = 0; t < rho_draws.size(); ++t) {
            const MatrixXd S = igw_sample(qS, rng);
            rho_draws(t) = S(0, 1) / std::sqrt(S(0, 0) * S(1, 1));
        }
    }
    const double sig_delta = vmp.Sigma_xi - 2.0 * static_cast<double>(q) + 2.0;

    std::vector<ParamComparison> out;
    for (std::size_t k = 0; k < names.size(); ++k) {
        const Index col = static_cast<Index>(k);
        const VectorXd x = D.col(col);
        ParamComparison c;
        c.name = names[k];
        c.mcmc_mean = sample_mean(x);
        c.mcmc_sd = sample_sd(x);

        std::function<double(double)> dens;
        double lo_bound = -std::numeric_limits<double>::infinity(), hi_bound = std::numeric_limits<double>::infinity();
        if (col < P) {
            c.vmp_mean = vmp.beta_u_mean(col);
            c.vmp_sd = std::sqrt(vmp.beta_u_cov(col, col));
            const double mu = c.vmp_mean, sd = c.vmp_sd;
            dens = [mu, sd](double v) {
                const double z = (v - mu) / sd;
                return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
            };
        } else if (c.name == "sigma") {
            const double d = vmp.sigma2_delta, l = vmp.sigma2_lambda;
            sqrt_inv_chisq_moments(d, l, c.vmp_mean, c.vmp_sd);
            dens = [d, l](double v) { return sqrt_inv_chisq_density(d, l, v); };
            lo_bound = 0.0;
        } else if (c.name == "nu") {
            grid_moments(vmp.nu_grid, vmp.nu_density, c.vmp_mean, c.vmp_sd);
            const MoonRock mr(vmp.upsilon_alpha, vmp.upsilon_beta);
            dens = [mr](double v) { return v > 0.0 ? 0.5 * std::exp(mr.log_density(v / 2.0)) : 0.0; };
            lo_bound = 0.0;
        } else if (c.name.rfind("sigma_", 0) == 0) {
            const Index j = std::stol(c.name.substr(6)) - 1;
            const double l = vmp.Sigma_Lambda(j, j);
            sqrt_inv_chisq_moments(sig_delta, l, c.vmp_mean, c.vmp_sd);
            dens = [sig_delta, l](double v) { return sqrt_inv_chisq_density(sig_delta, l, v); };
            lo_bound = 0.0;
        } else {
            c.vmp_mean = sample_mean(rho_draws);
            c.vmp_sd = sample_sd(rho_draws);
            lo_bound = -1.0;
            hi_bound = 1.0;
        }

        const double h = silverman_bandwidth(x);
        double lo = std::min(x.minCoeff() - 3.0 * h, c.vmp_mean - 6.0 * c.vmp_sd);
        double hi = std::max(x.maxCoeff() + 3.0 * h, c.vmp_mean + 6.0 * c.vmp_sd);
        lo = std::max(lo, lo_bound);
        hi = std::min(hi, hi_bound);
        c.grid = linspace(lo, hi, grid_points);
        c.q_mcmc = h > 0.0 ? kde(x, c.grid, h) : std::vector<double>(c.grid.size(), 0.0);
        if (dens) {
            c.q_vmp.resize(c.grid.size());
            for (std::size_t i = 0; i < c.grid.size(); ++i) c.q_vmp[i] = dens(c.grid[i]);
        } else {
            c.q_vmp = kde(rho_draws, c.grid, silverman_bandwidth(rho_draws));
        }
        c.accuracy = accuracy_score(c.grid, c.q_vmp, c.q_mcmc);
        out.push_back(std::move(c));
    }
    return out;
}

int cmd_compare(const RunConfig& cfg)
{
    cfg.validate();
    const TLMMData data = read_csv(cfg.input, cfg.design);
    const PosteriorSummary s = fit(data, cfg.hyper, fit_options(cfg));
    const ChainOutput chain = gibbs_fit(data, cfg.hyper, gibbs_config(cfg));
    const ChainSummary cs = summarize(chain);
    const std::vector<ParamComparison> cmp = compare_fits(s, chain, cfg.seed);

    const std::string stem = output_stem(cfg.output);
    json rows = json::array();
    char buf[128];
    for (const auto& c : cmp) {
        rows.push_back({{"name", c.name},
                        {"vmp_mean", c.vmp_mean},
                        {"vmp_sd", c.vmp_sd},
                        {"mcmc_mean", c.mcmc_mean},
                        {"mcmc_sd", c.mcmc_sd},
                        {"accuracy", c.accuracy}});
        std::string csv = "value,q_vmp,q_mcmc\n";
        for (std::size_t i = 0; i < c.grid.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.15g,%.15g,%.15g\n", c.grid[i], c.q_vmp[i], c.q_mcmc[i]);
            csv += buf;
        }
        write_text(stem + "_" + file_safe(c.name) + ".csv", csv);
    }
    json report;
    report["method"] = "compare";
    report["parameters"] = rows;
    report["vmp"] = to_json(s);
    report["mcmc"] = chain_json(cfg, chain, cs);
    write_json(cfg.output, report);
    write_text(cfg.output + ".log", s.report.log());
    return s.converged ? kExitOk : kExitNotConverged;
}

}  // namespace igw
