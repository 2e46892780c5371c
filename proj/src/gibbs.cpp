#include "igw/gibbs.hpp"

#include <cmath>

#include "igw/stats.hpp"

namespace igw {

void GibbsConfig::validate() const
{
    if (warmup < 0) throw ValidationError("warmup must be >= 0");
    if (kept < 1) throw ValidationError("kept must be >= 1");
    if (nu_grid_size < 2) throw ValidationError("nu grid size must be >= 2");
    if (fixed_sigma2 && !(*fixed_sigma2 > 0.0)) throw ValidationError("fixed sigma2 must be positive");
}

namespace {

// Conditional draw for a parameter with an Inverse G-Wishart prior (single or
// two-level) given `count` Gaussian observations with scatter S.
struct IGWBlock {
    FragmentPlan plan;
    MatrixXd value;
    MatrixXd aux;  // A, two-level plans only

    IGWBlock(FragmentPlan p, MatrixXd start) : plan(std::move(p)), value(std::move(start))
    {
        if (plan.alg2) aux = MatrixXd::Identity(value.rows(), value.rows());
    }

    void draw_value(double count, const MatrixXd& S, Rng& rng)
    {
        CommonIGW post;
        if (plan.alg2)
            post = make_common_igw(plan.alg2->G, plan.alg2->xi + count, spd_inverse(aux) + S);
        else
            post = make_common_igw(plan.alg1.graph_Theta, plan.alg1.xi_Theta + count, plan.alg1.Lambda_Theta + S);
        value = igw_sample(post, rng);
        if (!is_spd(value)) throw NumericalFailure("Gibbs: non-positive-definite draw");
    }

    void draw_aux(Rng& rng)
    {
        if (!plan.alg2) return;
        const Index d = value.rows();
        const double w2 = graph_omega(plan.alg2->G, d);
        const double xi = plan.alg1.xi_Theta + plan.alg2->xi + 2.0 - 2.0 * w2;
        const CommonIGW post = make_common_igw(plan.alg1.graph_Theta, xi, plan.alg1.Lambda_Theta + spd_inverse(value));
        aux = igw_sample(post, rng);
    }
};

}  // namespace

ChainOutput gibbs_fit(const TLMMData& data, const TLMMHyper& hyper, const GibbsConfig& cfg)
{
    cfg.validate();
    const Index N = data.n(), p = data.p(), q = data.q(), m = data.m, P = data.C.cols();
    hyper.validate(q);
    Rng rng(cfg.seed);
    std::normal_distribution<double> z01(0.0, 1.0);

    IGWBlock Sig(plan_prior(hyper.Sigma_spec(), q), MatrixXd::Identity(q, q));
    double var_y = N > 1 ? sample_sd(data.y) * sample_sd(data.y) : 1.0;
    if (!(var_y > 0.0)) var_y = 1.0;
    IGWBlock sig2(plan_prior(hyper.sigma_spec(), 1), MatrixXd::Constant(1, 1, var_y));
    VectorXd theta = VectorXd::Zero(P);
    double upsilon = 1.0;
    if (cfg.init) {
        if (cfg.init->beta_u.size() == P) theta = cfg.init->beta_u;
        if (cfg.init->Sigma.rows() == q) Sig.value = cfg.init->Sigma;
        sig2.value(0, 0) = cfg.init->sigma2;
        upsilon = cfg.init->upsilon;
    }
    if (cfg.fixed_Sigma) {
        if (cfg.fixed_Sigma->rows() != q || !is_spd(*cfg.fixed_Sigma))
            throw ValidationError("fixed Sigma must be a positive definite q x q matrix");
        Sig.value = *cfg.fixed_Sigma;
    }
    if (cfg.fixed_sigma2) sig2.value(0, 0) = *cfg.fixed_sigma2;
    VectorXd b = VectorXd::Ones(N);

    ChainOutput out;
    out.p = p;
    out.m = m;
    out.q = q;
    out.beta_u.resize(cfg.kept, P);
    out.sigma2.resize(cfg.kept);
    out.nu.resize(cfg.kept);
    out.Sigma.reserve(cfg.kept);
    if (Sig.plan.alg2) out.A.reserve(cfg.kept);
    if (sig2.plan.alg2) out.a.resize(cfg.kept);

    const double prior_beta = 1.0 / (hyper.sigma_beta * hyper.sigma_beta);
    for (int it = 0; it < cfg.warmup + cfg.kept; ++it) {
        // (beta, u)
        const double s2 = sig2.value(0, 0);
        const VectorXd w = b.cwiseInverse();
        MatrixXd prec = data.C.transpose() * w.asDiagonal() * data.C / s2;
        prec.topLeftCorner(p, p).diagonal().array() += prior_beta;
        const MatrixXd Sinv = spd_inverse(Sig.value);
        for (Index i = 0; i < m; ++i) prec.block(p + i * q, p + i * q, q, q) += Sinv;
        const VectorXd rhs = data.C.transpose() * w.cwiseProduct(data.y) / s2;
        Eigen::LLT<MatrixXd> llt(prec);
        if (llt.info() != Eigen::Success) throw NumericalFailure("Gibbs: coefficient precision is not positive definite");
        VectorXd zz(P);
        for (Index k = 0; k < P; ++k) zz(k) = z01(rng);
        theta = llt.solve(rhs) + llt.matrixU().solve(zz);

        const VectorXd resid2 = (data.y - data.C * theta).array().square().matrix();

        // b
        if (!cfg.fix_b_one)
            for (Index l = 0; l < N; ++l)
                b(l) = inv_chisq_sample(2.0 * upsilon + 1.0, 2.0 * upsilon + resid2(l) / s2, rng);

        // sigma^2 and its auxiliary variable
        if (!cfg.fixed_sigma2) {
            sig2.draw_value(static_cast<double>(N), MatrixXd::Constant(1, 1, resid2.dot(b.cwiseInverse())), rng);
            sig2.draw_aux(rng);
            if (!(sig2.value(0, 0) > 0.0)) throw NumericalFailure("Gibbs: non-positive variance draw");
        }

        // Sigma and A
        if (!cfg.fixed_Sigma) {
            MatrixXd S = MatrixXd::Zero(q, q);
            for (Index i = 0; i < m; ++i) {
                const VectorXd u = theta.segment(p + i * q, q);
                S += u * u.transpose();
            }
            Sig.draw_value(static_cast<double>(m), S, rng);
            Sig.draw_aux(rng);
        }

        // upsilon
        if (!cfg.fix_b_one) {
            double stat = hyper.lambda_nu;
            for (Index l = 0; l < N; ++l) stat += std::log(b(l)) + 1.0 / b(l);
            const MoonRock mr(static_cast<double>(N), stat);
            upsilon = MoonRockSampler(mr, cfg.nu_grid_size)(rng);
        }

        if (it >= cfg.warmup) {
            const int k = it - cfg.warmup;
            out.beta_u.row(k) = theta.transpose();
            out.sigma2(k) = sig2.value(0, 0);
            out.nu(k) = 2.0 * upsilon;
            out.Sigma.push_back(Sig.value);
            if (Sig.plan.alg2) out.A.push_back(Sig.aux);
            if (sig2.plan.alg2) out.a(k) = sig2.aux(0, 0);
        }
    }
    return out;
}

std::vector<std::string> scalar_names(Index p, Index m, Index q)
{
    std::vector<std::string> names;
    for (Index j = 0; j < p; ++j) names.push_back("beta" + std::to_string(j));
    for (Index i = 0; i < m; ++i)
        for (Index k = 0; k < q; ++k) names.push_back("u[" + std::to_string(i + 1) + "," + std::to_string(k) + "]");
    names.push_back("sigma");
    names.push_back("nu");
    for (Index k = 0; k < q; ++k) names.push_back("sigma_" + std::to_string(k + 1));
    if (q == 2) names.push_back("rho");
    return names;
}

MatrixXd scalar_draws(const ChainOutput& c)
{
    const Index P = c.p + c.m * c.q;
    const Index K = static_cast<Index>(scalar_names(c.p, c.m, c.q).size());
    const Index n = c.beta_u.rows();
    MatrixXd D(n, K);
    D.leftCols(P) = c.beta_u;
    D.col(P) = c.sigma2.array().sqrt().matrix();
    D.col(P + 1) = c.nu;
    for (Index t = 0; t < n; ++t) {
        const MatrixXd& S = c.Sigma[t];
        for (Index k = 0; k < c.q; ++k) D(t, P + 2 + k) = std::sqrt(S(k, k));
        if (c.q == 2) D(t, P + 4) = S(0, 1) / std::sqrt(S(0, 0) * S(1, 1));
    }
    return D;
}

const ScalarSummary& ChainSummary::get(const std::string& name) const
{
    for (const auto& s : params)
        if (s.name == name) return s;
    throw DimensionMismatch("no summarized parameter named '" + name + "'");
}

namespace {

// Standard error of the mean from non-overlapping batch means.
double batch_se(const VectorXd& x)
{
    const Index n = x.size();
    const Index batches = std::min<Index>(20, n / 5);
    if (batches < 2) return sample_sd(x) / std::sqrt(std::max<double>(1.0, static_cast<double>(n)));
    const Index len = n / batches;
    VectorXd means(batches);
    for (Index k = 0; k < batches; ++k) means(k) = x.segment(k * len, len).mean();
    return sample_sd(means) / std::sqrt(static_cast<double>(batches));
}

}  // namespace

ChainSummary summarize(const ChainOutput& chain, int grid_points)
{
    const std::vector<std::string> names = scalar_names(chain.p, chain.m, chain.q);
    const MatrixXd D = scalar_draws(chain);
    ChainSummary out;
    const Index n = D.rows(), half = n / 2;
    for (std::size_t k = 0; k < names.size(); ++k) {
        const VectorXd x = D.col(static_cast<Index>(k));
        ScalarSummary s;
        s.name = names[k];
        s.mean = sample_mean(x);
        s.sd = sample_sd(x);
        const double h = silverman_bandwidth(x);
        if (h > 0.0) {
            s.grid = linspace(x.minCoeff() - 4.0 * h, x.maxCoeff() + 4.0 * h, grid_points);
            s.density = kde(x, s.grid, h);
        } else {
            s.grid = {s.mean};
            s.density = {0.0};
        }
        if (half >= 10) {
            const VectorXd a = x.head(half), b = x.tail(n - half);
            const double se = std::hypot(batch_se(a), batch_se(b));
            if (std::abs(a.mean() - b.mean()) > 2.0 * se && se > 0.0) {
                out.split_half_ok = false;
                out.split_half_failures.push_back(s.name);
            }
        }
        out.params.push_back(std::move(s));
    }
    return out;
}

}  // namespace igw
