#include "igw/tlmm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace igw {

std::string to_string(Design d) { return d == Design::InterceptSlope ? "full" : "intercept"; }

Design design_from_string(const std::string& s)
{
    if (s == "full" || s == "intercept-slope") return Design::InterceptSlope;
    if (s == "intercept") return Design::Intercept;
    throw ValidationError("unknown design '" + s + "' (expected full or intercept)");
}

namespace {

void build_designs(TLMMData& d)
{
    const Index N = d.y.size(), q = d.q();
    d.X.resize(N, 2);
    d.X.col(0).setOnes();
    d.X.col(1) = d.x1;
    d.Z = MatrixXd::Zero(N, d.m * q);
    for (Index l = 0; l < N; ++l) {
        const Index o = (d.groups[l] - 1) * q;
        d.Z(l, o) = 1.0;
        if (q == 2) d.Z(l, o + 1) = d.x1(l);
    }
    d.C.resize(N, d.X.cols() + d.Z.cols());
    d.C << d.X, d.Z;
}

}  // namespace

TLMMData make_tlmm_data(const VectorXd& y, const VectorXd& x1, const std::vector<int>& group_labels, Design design)
{
    const Index N = y.size();
    if (x1.size() != N || static_cast<Index>(group_labels.size()) != N)
        throw DimensionMismatch("response, predictor and group vectors must have equal length");
    if (!y.allFinite() || !x1.allFinite()) throw ValidationError("data contain non-finite values");

    std::map<int, int> index;
    for (int g : group_labels) index.emplace(g, 0);
    int next = 0;
    for (auto& [label, idx] : index) idx = ++next;

    std::vector<Index> order(N);
    std::iota(order.begin(), order.end(), Index(0));
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return index[group_labels[a]] < index[group_labels[b]]; });

    TLMMData d;
    d.design = design;
    d.m = static_cast<Index>(index.size());
    d.y.resize(N);
    d.x1.resize(N);
    d.groups.resize(N);
    for (Index l = 0; l < N; ++l) {
        d.y(l) = y(order[l]);
        d.x1(l) = x1(order[l]);
        d.groups[l] = index[group_labels[order[l]]];
    }
    build_designs(d);
    return d;
}

TLMMData make_empty_data(Index m, Design design)
{
    if (m < 1) throw DimensionMismatch("need at least one group");
    TLMMData d;
    d.design = design;
    d.m = m;
    d.y.resize(0);
    d.x1.resize(0);
    build_designs(d);
    return d;
}

PriorSpec TLMMHyper::sigma_spec() const { return sigma_prior ? *sigma_prior : PriorSpec(HalfCauchyPrior{s_sigma}); }

PriorSpec TLMMHyper::Sigma_spec() const { return Sigma_prior ? *Sigma_prior : huang_wand(s_Sigma, 2.0); }

void TLMMHyper::validate(Index q) const
{
    if (!(sigma_beta > 0.0) || !std::isfinite(sigma_beta)) throw InvalidHyperparameter("sigma_beta must be positive");
    if (!(lambda_nu > 0.0) || !std::isfinite(lambda_nu)) throw InvalidHyperparameter("lambda_nu must be positive");
    if (!sigma_prior && !(s_sigma > 0.0)) throw InvalidHyperparameter("s_sigma must be positive");
    if (!Sigma_prior && s_Sigma.size() != q)
        throw DimensionMismatch("s_Sigma has " + std::to_string(s_Sigma.size()) + " entries, expected q = " +
                                std::to_string(q));
    validate_spec(sigma_spec());
    validate_spec(Sigma_spec());
    if (spec_dimension(sigma_spec()) != 1) throw DimensionMismatch("the error variance prior must be scalar");
    if (spec_dimension(Sigma_spec()) != q) throw DimensionMismatch("the random-effects prior must have dimension q");
}

namespace {

NaturalIGW start_message(Graph g, Index d)
{
    NaturalIGW n;
    n.graph = g;
    if (d == 1) {
        n.eta1 = -2.0;
        n.eta2 = VectorXd::Constant(1, -1.0);
    } else {
        n.eta1 = -0.5;
        n.eta2 = -0.5 * vech(MatrixXd::Identity(d, d));
    }
    return n;
}

NaturalMVN unit_gaussian(Index k) { return {VectorXd::Zero(k), -0.5 * vech(MatrixXd::Identity(k, k))}; }

}  // namespace

TLMMModel::TLMMModel(const TLMMData& data, const TLMMHyper& hyper) : data_(data), hyper_(hyper)
{
    const Index q = data_.q(), P = data_.C.cols();
    if (data_.C.rows() != data_.y.size() || P != data_.p() + data_.m * q)
        throw DimensionMismatch("design matrix does not match the data dimensions");
    hyper_.validate(q);
    Sigma_plan_ = plan_prior(hyper_.Sigma_spec(), q);
    sigma_plan_ = plan_prior(hyper_.sigma_spec(), 1);

    const Graph Sigma_graph = Sigma_plan_.alg2 ? Sigma_plan_.alg2->G : Sigma_plan_.alg1.graph_Theta;
    const Graph sigma_graph = sigma_plan_.alg2 ? sigma_plan_.alg2->G : sigma_plan_.alg1.graph_Theta;
    if (Sigma_plan_.alg2) n_A_ = graph_.add_node("A", Family::InverseGWishart, q, Sigma_plan_.alg2->G_A_to_f);
    if (sigma_plan_.alg2) n_a_ = graph_.add_node("a", Family::InverseGWishart, 1, sigma_plan_.alg2->G_A_to_f);
    n_Sigma_ = graph_.add_node("Sigma", Family::InverseGWishart, q, Sigma_graph);
    n_sigma2_ = graph_.add_node("sigma2", Family::InverseGWishart, 1, sigma_graph);
    n_theta_ = graph_.add_node("beta_u", Family::Gaussian, P);
    n_upsilon_ = graph_.add_node("upsilon", Family::MoonRock, 1);

    auto prior = [](const FragmentPlan& plan) { return std::make_shared<const IGWPriorFragment>(plan.alg1); };
    if (Sigma_plan_.alg2)
        f_Sigma_prior_ = graph_.add_factor("p(A)", {n_A_}, prior(Sigma_plan_));
    else
        f_Sigma_prior_ = graph_.add_factor("p(Sigma)", {n_Sigma_}, prior(Sigma_plan_));
    if (sigma_plan_.alg2)
        f_sigma_prior_ = graph_.add_factor("p(a)", {n_a_}, prior(sigma_plan_));
    else
        f_sigma_prior_ = graph_.add_factor("p(sigma2)", {n_sigma2_}, prior(sigma_plan_));
    if (Sigma_plan_.alg2)
        f_Sigma_iter_ = graph_.add_factor("p(Sigma|A)", {n_Sigma_, n_A_},
                                          std::make_shared<const IteratedIGWFragment>(Sigma_plan_.alg2->xi,
                                                                                      Sigma_plan_.alg2->G));
    if (sigma_plan_.alg2)
        f_sigma_iter_ = graph_.add_factor("p(sigma2|a)", {n_sigma2_, n_a_},
                                          std::make_shared<const IteratedIGWFragment>(sigma_plan_.alg2->xi,
                                                                                      sigma_plan_.alg2->G));
    f_pen_ = graph_.add_factor(
        "p(beta,u|Sigma)", {n_theta_, n_Sigma_},
        std::make_shared<const GaussianPenalizationFragment>(hyper_.sigma_beta,
                                                             PenalizationDims{data_.p(), data_.m, q}));
    f_lik_ = graph_.add_factor("p(y|beta,u,sigma2,b)p(b|upsilon)", {n_theta_, n_sigma2_, n_upsilon_},
                               std::make_shared<const TLikelihoodFragment>(data_.y, data_.C));
    f_upsilon_ = graph_.add_factor("p(upsilon)", {n_upsilon_},
                                   std::make_shared<const MoonRockPriorFragment>(
                                       MoonRockPriorInputs{0.0, hyper_.lambda_nu}));
}

void TLMMModel::init_messages()
{
    const Index q = data_.q(), P = data_.C.cols();
    auto& g = graph_;
    g.set_f2n(f_Sigma_prior_, n_A_ >= 0 ? n_A_ : n_Sigma_, to_message(igw_prior_update(Sigma_plan_.alg1).eta));
    g.set_f2n(f_sigma_prior_, n_a_ >= 0 ? n_a_ : n_sigma2_, to_message(igw_prior_update(sigma_plan_.alg1).eta));
    if (f_Sigma_iter_ >= 0) {
        g.set_f2n(f_Sigma_iter_, n_Sigma_, to_message(start_message(*g.node(n_Sigma_).graph, q)));
        g.set_f2n(f_Sigma_iter_, n_A_, to_message(start_message(*g.node(n_A_).graph, q)));
    }
    if (f_sigma_iter_ >= 0) {
        g.set_f2n(f_sigma_iter_, n_sigma2_, to_message(start_message(*g.node(n_sigma2_).graph, 1)));
        g.set_f2n(f_sigma_iter_, n_a_, to_message(start_message(*g.node(n_a_).graph, 1)));
    }
    g.set_f2n(f_pen_, n_theta_, to_message(unit_gaussian(P)));
    NaturalIGW pen_Sigma;
    pen_Sigma.graph = *g.node(n_Sigma_).graph;
    pen_Sigma.eta1 = -0.5;
    pen_Sigma.eta2 = -0.5 * vech(MatrixXd::Identity(q, q));
    g.set_f2n(f_pen_, n_Sigma_, to_message(pen_Sigma));
    g.set_f2n(f_lik_, n_theta_, to_message(unit_gaussian(P)));
    g.set_f2n(f_lik_, n_sigma2_, to_message(start_message(*g.node(n_sigma2_).graph, 1)));
    g.set_f2n(f_lik_, n_upsilon_, moonrock_message(Eigen::Vector2d(1.0, -1.1)));
    g.set_f2n(f_upsilon_, n_upsilon_, moonrock_message(moonrock_prior_update({0.0, hyper_.lambda_nu})));
}

ConvergenceReport TLMMModel::run(const FitOptions& opt)
{
    RunOptions ro;
    ro.tol = opt.tol;
    ro.max_iters = opt.max_iters;
    ro.mode = Properness::Deferred;
    return opt.schedule ? graph_.run(*opt.schedule, ro) : graph_.run(ro);
}

void TLMMModel::validate_q_star() const
{
    for (Index n : {n_A_, n_a_, n_Sigma_, n_sigma2_}) {
        if (n < 0) continue;
        require_proper(as_igw(graph_.q_star(n)), "q*(" + graph_.node(n).name + ")");
    }
    if (!is_spd(mvn_precision(as_mvn(graph_.q_star(n_theta_)))))
        throw ImproperMessage("q*(beta_u): precision is not positive definite");
    const VectorXd u = graph_.q_star(n_upsilon_).eta;
    if (!(u(0) >= 0.0) || !(-u(1) > 0.0)) throw ImproperMessage("q*(upsilon) is not a proper Moon Rock density");
    MoonRock(u(0), -u(1));
}

PosteriorSummary TLMMModel::summary(const ConvergenceReport& rep) const
{
    validate_q_star();
    PosteriorSummary s;
    s.converged = rep.converged;
    s.iterations = rep.iterations;
    s.report = rep;
    s.p = data_.p();
    s.m = data_.m;
    s.q = data_.q();

    s.q_beta_u = as_mvn(graph_.q_star(n_theta_));
    const MVNMoments th = mvn_from_natural(s.q_beta_u);
    s.beta_u_mean = th.mean;
    s.beta_u_cov = th.cov;

    s.q_sigma2 = as_igw(graph_.q_star(n_sigma2_));
    s.sigma2_delta = -2.0 * s.q_sigma2.eta1 - 2.0;
    s.sigma2_lambda = -2.0 * s.q_sigma2.eta2(0);

    s.q_Sigma = as_igw(graph_.q_star(n_Sigma_));
    const CommonIGW cs = igw_from_natural(s.q_Sigma);
    s.Sigma_xi = cs.xi;
    s.Sigma_Lambda = cs.Lambda;
    s.Sigma_kappa = cs.xi - static_cast<double>(s.q) + 1.0;

    s.q_upsilon = graph_.q_star(n_upsilon_).eta;
    s.upsilon_alpha = s.q_upsilon(0);
    s.upsilon_beta = -s.q_upsilon(1);
    nu_density_grid(MoonRock(s.upsilon_alpha, s.upsilon_beta), s.nu_grid, s.nu_density);
    return s;
}

TLMMModel build_graph(const TLMMData& data, const TLMMHyper& hyper) { return TLMMModel(data, hyper); }

PosteriorSummary fit(const TLMMData& data, const TLMMHyper& hyper, const FitOptions& opt)
{
    TLMMModel model(data, hyper);
    model.init_messages();
    const ConvergenceReport rep = model.run(opt);
    return model.summary(rep);
}

void nu_density_grid(const MoonRock& q_upsilon, std::vector<double>& grid, std::vector<double>& values, int points)
{
    const double lo = 1e-3;
    const double hi = std::max(2.0 * q_upsilon.upper_point(1e-10), 10.0 * lo);
    grid.resize(points);
    values.resize(points);
    for (int i = 0; i < points; ++i) {
        grid[i] = lo + (hi - lo) * i / (points - 1);
        values[i] = 0.5 * std::exp(q_upsilon.log_density(grid[i] / 2.0));
    }
}

SimulatedData simulate(std::uint64_t seed, Index m, Index n_per_group, const TLMMTruth& truth, Design design)
{
    const Index q = design == Design::InterceptSlope ? 2 : 1;
    if (m < 1 || n_per_group < 1) throw DimensionMismatch("simulate: m and n_per_group must be positive");
    if (truth.beta.size() != 2) throw DimensionMismatch("simulate: beta must have two entries");
    if (truth.Sigma.rows() != q || !is_spd(truth.Sigma))
        throw InvalidHyperparameter("simulate: Sigma must be a positive definite q x q matrix");
    if (!(truth.sigma2 >= 0.0) || !(truth.nu > 0.0)) throw InvalidHyperparameter("simulate: need sigma2 >= 0, nu > 0");

    Rng rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::student_t_distribution<double> tdist(truth.nu);
    const MatrixXd L = Eigen::LLT<MatrixXd>(truth.Sigma).matrixL();
    const double sigma = std::sqrt(truth.sigma2);

    const Index N = m * n_per_group;
    VectorXd y(N), x(N);
    std::vector<int> groups(N);
    SimulatedData out;
    out.u.resize(m, q);
    for (Index i = 0; i < m; ++i) {
        VectorXd e(q);
        for (Index k = 0; k < q; ++k) e(k) = z(rng);
        const VectorXd u = L * e;
        out.u.row(i) = u.transpose();
        for (Index j = 0; j < n_per_group; ++j) {
            const Index l = i * n_per_group + j;
            x(l) = unif(rng);
            const double noise = tdist(rng);
            double mean = truth.beta(0) + truth.beta(1) * x(l) + u(0);
            if (q == 2) mean += u(1) * x(l);
            y(l) = mean + sigma * noise;
            groups[l] = static_cast<int>(i + 1);
        }
    }
    out.data = make_tlmm_data(y, x, groups, design);
    return out;
}

}  // namespace igw
