// Acceptance checks. Prints one PASS/FAIL line per criterion; exits nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "igw/cli.hpp"
#include "igw/graph_engine.hpp"
#include "igw/prior_specs.hpp"
#include "igw/stats.hpp"
#include "oracles.hpp"

using namespace igw;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

CommonIGW random_igw(Graph g, Index d, Rng& rng)
{
    std::uniform_real_distribution<double> U(0.1, 6.0);
    const double xi = (g == Graph::Full ? 2.0 * d - 2.0 : 0.0) + U(rng);
    MatrixXd L = oracle::random_spd(d, rng);
    if (g == Graph::Diag) L = MatrixXd(L.diagonal().asDiagonal());
    return make_common_igw(g, xi, L);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double rel(const MatrixXd& a, const MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff(); }

// 1. Natural-parameter round trip.
Outcome criterion1()
{
    Rng rng(101);
    double worst = 0.0;
    int count = 0;
    for (Graph g : {Graph::Full, Graph::Diag})
        for (Index d : {1, 2, 3, 5})
            for (int r = 0; r < 25; ++r, ++count) {
                const CommonIGW p = random_igw(g, d, rng);
                const NaturalIGW n = igw_to_natural(p);
                const CommonIGW back = igw_from_natural(n);
                const NaturalIGW n2 = igw_to_natural(back);
                worst = std::max({worst, rel(back.xi, p.xi), rel(back.Lambda, p.Lambda), rel(n2.stacked(), n.stacked())});
                if (back.graph != g) return {false, "graph tag lost"};
            }
    return {count == 200 && worst < 1e-12, fmt("200 instances, max relative error %.3g (bound 1e-12)", worst)};
}

// 2. Mean-inverse identities and sampler moments.
Outcome criterion2()
{
    Rng rng(202);
    double worst = 0.0;
    for (Graph g : {Graph::Full, Graph::Diag})
        for (Index d : {1, 2, 3, 5})
            for (int r = 0; r < 20; ++r) {
                const CommonIGW p = random_igw(g, d, rng);
                const MatrixXd ref = g == Graph::Full ? MatrixXd((p.xi - d + 1.0) * p.Lambda.inverse())
                                                      : MatrixXd(p.xi * p.Lambda.diagonal().cwiseInverse().asDiagonal());
                worst = std::max(worst, rel(igw_mean_inverse(igw_to_natural(p)), ref));
            }

    // Monte Carlo: every entry of E(X^{-1}) within 3 standard errors.
    const int n = 200000;
    double worst_z = 0.0;
    const std::vector<CommonIGW> cases = {
        make_common_igw(Graph::Full, 7.0, (MatrixXd(2, 2) << 2.0, 0.4, 0.4, 1.0).finished()),
        make_common_igw(Graph::Full, 9.0, (MatrixXd(3, 3) << 3, 0.5, 0.2, 0.5, 2, -0.3, 0.2, -0.3, 1).finished()),
        make_common_igw(Graph::Diag, 5.0, MatrixXd((VectorXd(3) << 1.0, 2.0, 0.5).finished().asDiagonal())),
        make_common_igw(Graph::Full, 3.5, MatrixXd::Constant(1, 1, 1.7)),
    };
    Rng srng(203);
    for (const CommonIGW& p : cases) {
        const Index d = p.Lambda.rows();
        MatrixXd s1 = MatrixXd::Zero(d, d), s2 = MatrixXd::Zero(d, d);
        for (int i = 0; i < n; ++i) {
            const MatrixXd W = igw_sample(p, srng).inverse();
            s1 += W;
            s2 += W.cwiseProduct(W);
        }
        const MatrixXd mean = s1 / n;
        const MatrixXd var = s2 / n - mean.cwiseProduct(mean);
        const MatrixXd ref = igw_mean_inverse(p);
        for (Index i = 0; i < d; ++i)
            for (Index j = 0; j < d; ++j) {
                if (var(i, j) <= 0.0) {
                    if (mean(i, j) != ref(i, j)) return {false, "zero-variance entry disagrees"};
                    continue;
                }
                worst_z = std::max(worst_z, std::abs(mean(i, j) - ref(i, j)) / std::sqrt(var(i, j) / n));
            }
    }
    return {worst < 1e-12 && worst_z < 3.0,
            fmt("closed forms max relative error %.3g (bound 1e-12); sampler max |z| %.3f (bound 3)", worst, worst_z)};
}

// Marginal density of sigma under the two-level Half-t construction.
double half_t_marginal(const FragmentPlan& plan, double sigma)
{
    const CommonIGW first = make_common_igw(plan.alg1.graph_Theta, plan.alg1.xi_Theta, plan.alg1.Lambda_Theta);
    const double x = sigma * sigma, c = std::log(first.Lambda(0, 0));
    auto g = [&](double u) {
        const double a = std::exp(u);
        const CommonIGW second = make_common_igw(plan.alg2->G, plan.alg2->xi, MatrixXd::Constant(1, 1, 1.0 / a));
        return std::exp(igw_log_density(second, MatrixXd::Constant(1, 1, x)) +
                        igw_log_density(first, MatrixXd::Constant(1, 1, a)) + u);
    };
    const int n = 24000;
    const double lo = c - 60.0, hi = c + 60.0, h = (hi - lo) / n;
    double s = g(lo) + g(hi);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * g(lo + i * h);
    return 2.0 * sigma * s * h / 3.0;
}

// 3. Half-t equivalence.
Outcome criterion3()
{
    double worst = 0.0, worst_rel = 0.0;
    for (auto [s, nu] : {std::pair{1.0, 1.0}, std::pair{2.0, 3.0}, std::pair{1e5, 1.0}}) {
        const FragmentPlan plan = plan_prior(HalfTPrior{s, nu}, 1);
        for (double sig : linspace(0.02 * s, 5.0 * s, 50)) {
            const double a = half_t_marginal(plan, sig), b = oracle::half_t_pdf(s, nu, sig);
            worst = std::max(worst, std::abs(a - b));
            worst_rel = std::max(worst_rel, rel(a, b));
        }
    }
    return {worst < 1e-6, fmt("max |diff| %.3g (bound 1e-6), max relative %.3g", worst, worst_rel)};
}

// 4. Huang-Wand uniform correlation.
Outcome criterion4()
{
    Rng rng(404);
    const FragmentPlan plan = plan_prior(HuangWandPrior{VectorXd::Ones(2), 2.0}, 2);
    const int n = 50000;
    VectorXd rho(n);
    for (int i = 0; i < n; ++i) {
        const MatrixXd S = sample_prior(plan, rng);
        rho(i) = S(0, 1) / std::sqrt(S(0, 0) * S(1, 1));
    }
    const double ks = ks_distance(rho, [](double r) { return std::clamp((r + 1.0) / 2.0, 0.0, 1.0); });
    return {ks < 0.012, fmt("KS distance %.4f at 5e4 draws (bound 0.012)", ks)};
}

class KnownMeanLikelihood : public Fragment {
public:
    KnownMeanLikelihood(VectorXd y, double mu) : y_(std::move(y)), mu_(mu) {}
    std::vector<Message> update(const std::vector<Message>& to_factor, const std::vector<Message>&, Properness) const override
    {
        const double ss = (y_.array() - mu_).square().sum();
        return {Message{(VectorXd(2) << -0.5 * y_.size(), -0.5 * ss).finished(), to_factor[0].graph}};
    }
    Index arity() const override { return 1; }

private:
    VectorXd y_;
    double mu_;
};

// 5. Conjugate exactness in one sweep.
Outcome criterion5()
{
    const VectorXd y = (VectorXd(6) << 0.3, -1.1, 2.4, 0.9, -0.2, 1.6).finished();
    const double mu = 0.4, delta = 3.0, lambda = 2.0;
    FactorGraph g;
    const Index s2 = g.add_node("sigma2", Family::InverseGWishart, 1, Graph::Full);
    const FragmentPlan plan = plan_prior(InvChiSqPrior{delta, lambda}, 1);
    const Index fp = g.add_factor("p(sigma2)", {s2}, std::make_shared<IGWPriorFragment>(plan.alg1));
    const Index fl = g.add_factor("p(y|sigma2)", {s2}, std::make_shared<KnownMeanLikelihood>(y, mu));
    const Message start{(VectorXd(2) << -1.0, -1.0).finished(), Graph::Full};
    g.set_f2n(fp, s2, start);
    g.set_f2n(fl, s2, start);
    g.sweep(g.default_schedule(), Properness::Strict);
    const double ss = (y.array() - mu).square().sum();
    const NaturalIGW exact = igw_to_natural(make_common_igw(Graph::Full, delta + y.size(), MatrixXd::Constant(1, 1, lambda + ss)));
    const double err = rel(g.q_star(s2).eta, exact.stacked());
    return {err < 1e-12, fmt("relative error after one sweep %.3g (bound 1e-12)", err)};
}

// 6. Iterated fragment hand-worked cases.
Outcome criterion6()
{
    auto nat = [](Graph g, double e1, VectorXd e2) { return NaturalIGW{g, e1, std::move(e2)}; };
    IteratedIGWState st;
    st.G = Graph::Full;
    st.xi = 1.0;
    st.G_A_to_f = Graph::Diag;
    st.eta_A_to_f = nat(Graph::Diag, -1.5, VectorXd::Constant(1, -0.5));
    st.eta_f_to_A = nat(Graph::Diag, 0.0, VectorXd::Zero(1));
    st.eta_Sigma_to_f = nat(Graph::Full, -2.0, VectorXd::Constant(1, -3.0));
    st.eta_f_to_Sigma = nat(Graph::Full, 0.0, VectorXd::Zero(1));
    const IteratedIGWOutput o = iterated_igw_update(st);
    double worst = std::max({std::abs(o.eta_f_to_Sigma.eta1 + 1.5), std::abs(o.eta_f_to_Sigma.eta2(0) + 0.5),
                             std::abs(o.eta_f_to_A.eta1 + 0.5), std::abs(o.eta_f_to_A.eta2(0) + 1.0 / 6.0)});

    IteratedIGWState s2;
    s2.G = Graph::Full;
    s2.xi = 4.0;
    s2.G_A_to_f = Graph::Diag;
    s2.eta_A_to_f = nat(Graph::Diag, -2.5, (VectorXd(3) << -1.0, 0.0, -2.0).finished());
    s2.eta_f_to_A = nat(Graph::Diag, 0.0, VectorXd::Zero(3));
    s2.eta_Sigma_to_f = igw_to_natural(make_common_igw(Graph::Full, 7.0, (MatrixXd(2, 2) << 2, 0.5, 0.5, 1).finished()));
    s2.eta_f_to_Sigma = nat(Graph::Full, 0.0, VectorXd::Zero(3));
    worst = std::max(worst, std::abs(iterated_igw_update(s2).eta_f_to_A.eta1 + 1.5));
    const bool graphs = o.G_f_to_Sigma == Graph::Full && o.G_f_to_A == Graph::Diag;
    return {graphs && worst < 1e-14, fmt("3 cases, max |diff| %.3g (bound 1e-14)", worst)};
}

// 7. Full pipeline against the Gibbs oracle.
Outcome criterion7()
{
    const SimulatedData sim = simulate(1);
    const PosteriorSummary v = fit(sim.data, TLMMHyper{});
    if (!v.converged) return {false, "VMP did not converge"};
    GibbsConfig cfg;
    cfg.seed = 1;
    const ChainOutput c = gibbs_fit(sim.data, TLMMHyper{}, cfg);
    const std::vector<ParamComparison> rows = compare_fits(v, c);
    bool ok = true;
    std::string detail = fmt("VMP converged in %.0f sweeps;", v.iterations);
    for (const ParamComparison& r : rows) {
        const bool gated = r.name == "beta0" || r.name == "beta1" || r.name == "u[1,0]" || r.name == "u[1,1]" ||
                           r.name == "u[2,0]" || r.name == "u[2,1]";
        const bool loose = r.name == "sigma" || r.name == "nu";
        if (!gated && !loose) continue;
        const double z = std::abs(r.vmp_mean - r.mcmc_mean) / r.mcmc_sd;
        const bool pass = gated ? (z < 0.5 && r.accuracy > 80.0) : z < 2.0;
        ok = ok && pass;
        detail += " " + r.name + fmt(" z=%.3f acc=%.1f", z, r.accuracy) + (pass ? "" : "(!)") + ";";
    }
    return {ok, detail};
}

// 8. Fixed-point stability and schedule permutation.
Outcome criterion8()
{
    const SimulatedData sim = simulate(1);
    auto converged_q = [&](const std::optional<std::vector<Index>>& schedule, double* extra) {
        TLMMModel m = build_graph(sim.data, TLMMHyper{});
        m.init_messages();
        FitOptions opt;
        opt.schedule = schedule;
        const ConvergenceReport rep = m.run(opt);
        auto& g = m.graph();
        if (extra) {
            const VectorXd before = g.f2n_snapshot();
            g.sweep(schedule ? *schedule : g.default_schedule(), Properness::Strict);
            *extra = max_relative_change(before, g.f2n_snapshot());
        }
        std::vector<double> all;
        for (Index n = 0; n < g.num_nodes(); ++n) {
            const VectorXd q = g.q_star(n).eta;
            all.insert(all.end(), q.data(), q.data() + q.size());
        }
        return std::pair{rep.converged, VectorXd(Eigen::Map<VectorXd>(all.data(), static_cast<Index>(all.size())))};
    };
    double extra = 0.0;
    const auto [ok0, q0] = converged_q(std::nullopt, &extra);
    TLMMModel probe = build_graph(sim.data, TLMMHyper{});
    std::vector<Index> rev = probe.graph().default_schedule();
    std::reverse(rev.begin(), rev.end());
    std::vector<Index> shuffled = probe.graph().default_schedule();
    Rng rng(808);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    double worst = 0.0;
    bool all_conv = ok0;
    for (const auto& s : {rev, shuffled}) {
        const auto [ok, q] = converged_q(s, nullptr);
        all_conv = all_conv && ok;
        worst = std::max(worst, max_relative_change(q0, q));
    }
    return {all_conv && extra < 1e-10 && worst < 1e-8,
            fmt("extra sweep change %.3g (bound 1e-10); permuted schedules max q* change %.3g (bound 1e-8)", extra, worst)};
}

}  // namespace

int main()
{
    struct Criterion {
        const char* name;
        std::function<Outcome()> fn;
        double max_seconds;
    };
    const std::vector<Criterion> criteria = {
        {"1 natural-parameter round trip", criterion1, 1.0},
        {"2 moment identities", criterion2, 30.0},
        {"3 Half-t equivalence", criterion3, 10.0},
        {"4 Huang-Wand uniform correlation", criterion4, 20.0},
        {"5 conjugate exactness", criterion5, 1.0},
        {"6 iterated fragment hand cases", criterion6, 1.0},
        {"7 full pipeline vs Gibbs oracle", criterion7, 300.0},
        {"8 fixed-point stability", criterion8, 300.0},
    };
    int failures = 0;
    for (const auto& [name, fn, max_seconds] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (sec >= max_seconds) {
            o.pass = false;
            o.detail += fmt(" runtime over %.0f s", max_seconds);
        }
        std::printf("%s criterion %s [%.2f s]: %s\n", o.pass ? "PASS" : "FAIL", name, sec, o.detail.c_str());
        std::fflush(stdout);
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
