#include "igw/fragments.hpp"

#include <cmath>

namespace igw {

IGWPriorOutput igw_prior_update(const IGWPriorInputs& in)
{
    const CommonIGW p = make_common_igw(in.graph_Theta, in.xi_Theta, in.Lambda_Theta);
    return {p.graph, igw_to_natural(p)};
}

MatrixXd igw_expected_inverse(const NaturalIGW& n, Properness mode, const std::string& what)
{
    if (mode == Properness::Strict) require_proper(n, what);
    const MatrixXd M = igw_natural_matrix(n);
    MatrixXd Minv;
    try {
        Minv = sym_inverse(M);
    } catch (const NumericalFailure&) {
        throw ImproperMessage(what + ": natural parameter matrix is singular");
    }
    return (n.eta1 + graph_omega(n.graph, n.dim())) * Minv;
}

MVNMoments mvn_moments(const NaturalMVN& n, Properness mode, const std::string& what)
{
    const MatrixXd P = mvn_precision(n);
    MVNMoments out;
    if (mode == Properness::Strict) {
        if (!is_spd(P)) throw ImproperMessage(what + ": implied precision is not positive definite");
        out.cov = spd_inverse(P);
    } else {
        try {
            out.cov = sym_inverse(P);
        } catch (const NumericalFailure&) {
            throw ImproperMessage(what + ": implied precision is singular");
        }
    }
    out.mean = out.cov * n.eta1;
    return out;
}

namespace {

NaturalIGW add(const NaturalIGW& a, const NaturalIGW& b)
{
    if (a.eta2.size() != b.eta2.size()) throw DimensionMismatch("Inverse G-Wishart messages differ in dimension");
    NaturalIGW c;
    c.graph = a.graph;
    c.eta1 = a.eta1 + b.eta1;
    c.eta2 = a.eta2 + b.eta2;
    return c;
}

NaturalMVN add(const NaturalMVN& a, const NaturalMVN& b)
{
    if (a.eta1.size() != b.eta1.size() || a.eta2.size() != b.eta2.size())
        throw DimensionMismatch("Gaussian messages differ in dimension");
    return {a.eta1 + b.eta1, a.eta2 + b.eta2};
}

MatrixXd diagonal_part(const MatrixXd& M) { return MatrixXd(M.diagonal().asDiagonal()); }

}  // namespace

IteratedIGWOutput iterated_igw_update(const IteratedIGWState& st, Properness mode)
{
    const Index d = st.eta_Sigma_to_f.dim();
    if (st.eta_f_to_Sigma.dim() != d || st.eta_A_to_f.dim() != d || st.eta_f_to_A.dim() != d)
        throw DimensionMismatch("iterated_igw_update: messages have different dimensions");
    if (!(st.xi > 0.0)) throw InvalidShape("iterated_igw_update: xi must be positive");

    IteratedIGWOutput out;
    out.G_f_to_Sigma = st.G;
    out.G_f_to_A = st.G_A_to_f;

    NaturalIGW cS = add(st.eta_f_to_Sigma, st.eta_Sigma_to_f);
    cS.graph = out.G_f_to_Sigma;
    NaturalIGW cA = add(st.eta_f_to_A, st.eta_A_to_f);
    cA.graph = out.G_f_to_A;

    const double w1 = graph_omega(out.G_f_to_A, d);
    if (mode == Properness::Strict) require_proper(cA, "iterated fragment, combined auxiliary message");
    MatrixXd EAinv;
    try {
        EAinv = (cA.eta1 + w1) * sym_inverse(pinv_t_unvec(cA.eta2));
    } catch (const NumericalFailure&) {
        throw ImproperMessage("iterated fragment: combined auxiliary natural matrix is singular");
    }
    if (out.G_f_to_Sigma == Graph::Diag) EAinv = diagonal_part(EAinv);
    out.eta_f_to_Sigma.graph = out.G_f_to_Sigma;
    out.eta_f_to_Sigma.eta1 = -(st.xi + 2.0) / 2.0;
    out.eta_f_to_Sigma.eta2 = -0.5 * dup_t_vec(EAinv);

    const double w2 = graph_omega(out.G_f_to_Sigma, d);
    if (mode == Properness::Strict) require_proper(cS, "iterated fragment, combined matrix message");
    MatrixXd ESinv;
    try {
        ESinv = (cS.eta1 + w2) * sym_inverse(pinv_t_unvec(cS.eta2));
    } catch (const NumericalFailure&) {
        throw ImproperMessage("iterated fragment: combined matrix natural matrix is singular");
    }
    if (out.G_f_to_A == Graph::Diag) ESinv = diagonal_part(ESinv);
    out.eta_f_to_A.graph = out.G_f_to_A;
    out.eta_f_to_A.eta1 = -(st.xi + 2.0 - 2.0 * w2) / 2.0;
    out.eta_f_to_A.eta2 = -0.5 * dup_t_vec(ESinv);
    return out;
}

Eigen::Vector2d moonrock_prior_update(const MoonRockPriorInputs& in)
{
    if (!(in.alpha_theta >= 0.0)) throw InvalidHyperparameter("Moon Rock prior alpha must be >= 0");
    if (!(in.beta_theta > 0.0)) throw InvalidHyperparameter("Moon Rock prior beta must be > 0");
    return {in.alpha_theta, -in.beta_theta};
}

GaussianPenalizationOutput gaussian_penalization_update(const NaturalMVN& eta_thetau_to_f,
                                                        const NaturalMVN& eta_f_to_thetau,
                                                        const NaturalIGW& eta_Sigma_to_f,
                                                        const NaturalIGW& eta_f_to_Sigma, double sigma_beta,
                                                        const PenalizationDims& dims, Properness mode)
{
    const Index P = dims.total();
    if (eta_thetau_to_f.dim() != P || eta_f_to_thetau.dim() != P)
        throw DimensionMismatch("gaussian_penalization_update: coefficient messages must have length p + m q");
    if (eta_Sigma_to_f.dim() != dims.q || eta_f_to_Sigma.dim() != dims.q)
        throw DimensionMismatch("gaussian_penalization_update: covariance messages must have dimension q");
    if (!(sigma_beta > 0.0)) throw InvalidHyperparameter("sigma_beta must be positive");

    NaturalIGW cS = add(eta_f_to_Sigma, eta_Sigma_to_f);
    cS.graph = eta_Sigma_to_f.graph;
    const MatrixXd ESinv = igw_expected_inverse(cS, mode, "penalization fragment, combined covariance message");

    MatrixXd prec = MatrixXd::Zero(P, P);
    prec.topLeftCorner(dims.p, dims.p).diagonal().setConstant(1.0 / (sigma_beta * sigma_beta));
    for (Index i = 0; i < dims.m; ++i) prec.block(dims.p + i * dims.q, dims.p + i * dims.q, dims.q, dims.q) = ESinv;

    GaussianPenalizationOutput out;
    out.eta_f_to_thetau.eta1 = VectorXd::Zero(P);
    out.eta_f_to_thetau.eta2 = -0.5 * dup_t_vec(prec);

    const MVNMoments th = mvn_moments(add(eta_f_to_thetau, eta_thetau_to_f), mode,
                                      "penalization fragment, combined coefficient message");
    MatrixXd S = MatrixXd::Zero(dims.q, dims.q);
    for (Index i = 0; i < dims.m; ++i) {
        const Index o = dims.p + i * dims.q;
        const VectorXd mu = th.mean.segment(o, dims.q);
        S += mu * mu.transpose() + th.cov.block(o, o, dims.q, dims.q);
    }
    out.eta_f_to_Sigma.graph = eta_Sigma_to_f.graph;
    out.eta_f_to_Sigma.eta1 = -static_cast<double>(dims.m) / 2.0;
    out.eta_f_to_Sigma.eta2 = -0.5 * dup_t_vec(S);
    return out;
}

TLikelihoodOutput t_likelihood_update(const VectorXd& y, const MatrixXd& C, const NaturalMVN& eta_thetau_to_f,
                                      const NaturalMVN& eta_f_to_thetau, const NaturalIGW& eta_sigma2_to_f,
                                      const NaturalIGW& eta_f_to_sigma2, const Eigen::Vector2d& eta_upsilon_to_f,
                                      const Eigen::Vector2d& eta_f_to_upsilon, Properness mode)
{
    const Index N = y.size();
    if (C.rows() != N) throw DimensionMismatch("t_likelihood_update: design rows do not match response length");
    if (eta_thetau_to_f.dim() != C.cols() || eta_f_to_thetau.dim() != C.cols())
        throw DimensionMismatch("t_likelihood_update: coefficient messages do not match design columns");
    if (eta_sigma2_to_f.dim() != 1 || eta_f_to_sigma2.dim() != 1)
        throw DimensionMismatch("t_likelihood_update: variance messages must be scalar");

    const MVNMoments th = mvn_moments(add(eta_f_to_thetau, eta_thetau_to_f), mode,
                                      "t-likelihood fragment, combined coefficient message");
    NaturalIGW cs = add(eta_f_to_sigma2, eta_sigma2_to_f);
    const double e_recip_sigma2 = igw_expected_inverse(cs, mode, "t-likelihood fragment, combined variance message")(0, 0);

    const Eigen::Vector2d cu = eta_f_to_upsilon + eta_upsilon_to_f;
    if (!(cu(0) >= 0.0) || !(-cu(1) > 0.0))
        throw ImproperMessage("t-likelihood fragment: combined Moon Rock message (" + std::to_string(cu(0)) + ", " +
                              std::to_string(cu(1)) + ") is not a proper density");
    const double e_upsilon = MoonRock(cu(0), -cu(1)).mean();

    const VectorXd resid = y - C * th.mean;
    const VectorXd r = resid.array().square().matrix() + (C * th.cov).cwiseProduct(C).rowwise().sum();

    const double delta = 2.0 * e_upsilon + 1.0;
    VectorXd w(N);
    double sum_log_plus_recip = 0.0;
    const double psi = digamma(delta / 2.0);
    for (Index l = 0; l < N; ++l) {
        const double lambda = 2.0 * e_upsilon + e_recip_sigma2 * r(l);
        if (!(lambda > 0.0)) throw ImproperMessage("t-likelihood fragment: auxiliary scale is not positive");
        w(l) = delta / lambda;
        sum_log_plus_recip += std::log(lambda / 2.0) - psi + w(l);
    }

    TLikelihoodOutput out;
    const MatrixXd CtW = C.transpose() * w.asDiagonal();
    out.eta_f_to_thetau.eta1 = e_recip_sigma2 * (CtW * y);
    out.eta_f_to_thetau.eta2 = -0.5 * dup_t_vec(MatrixXd(e_recip_sigma2 * (CtW * C)));
    out.eta_f_to_sigma2.graph = eta_sigma2_to_f.graph;
    out.eta_f_to_sigma2.eta1 = -static_cast<double>(N) / 2.0;
    out.eta_f_to_sigma2.eta2 = VectorXd::Constant(1, -0.5 * w.dot(r));
    out.eta_f_to_upsilon = Eigen::Vector2d(static_cast<double>(N), -sum_log_plus_recip);
    return out;
}

}  // namespace igw
