#include "igw/distributions.hpp"

#include <cmath>
#include <numbers>

namespace igw {

std::string to_string(Graph g) { return g == Graph::Full ? "full" : "diag"; }

Graph graph_from_string(const std::string& s)
{
    if (s == "full" || s == "FULL") return Graph::Full;
    if (s == "diag" || s == "DIAG") return Graph::Diag;
    throw InvalidShape("unsupported graph '" + s + "' (expected full or diag)");
}

CommonIGW make_common_igw(Graph graph, double xi, const MatrixXd& Lambda)
{
    if (Lambda.rows() != Lambda.cols() || Lambda.rows() == 0)
        throw DimensionMismatch("Inverse G-Wishart scale must be a non-empty square matrix");
    if (!Lambda.allFinite()) throw NonSPDScale("Inverse G-Wishart scale has non-finite entries");
    const Index d = Lambda.rows();
    if (!std::isfinite(xi)) throw InvalidShape("shape xi must be finite");
    CommonIGW p;
    p.graph = graph;
    p.xi = xi;
    if (graph == Graph::Full) {
        if (!(xi > 2.0 * d - 2.0))
            throw InvalidShape("full-graph shape xi = " + std::to_string(xi) + " must exceed 2d - 2 = " +
                               std::to_string(2 * d - 2));
        p.Lambda = symmetrized(Lambda);
        if (!is_spd(p.Lambda)) throw NonSPDScale("full-graph scale is not positive definite");
    } else {
        if (!(xi > 0.0)) throw InvalidShape("diagonal-graph shape xi must be positive");
        p.Lambda = MatrixXd::Zero(d, d);
        for (Index j = 0; j < d; ++j) {
            if (!(Lambda(j, j) > 0.0)) throw NonSPDScale("diagonal-graph scale has a non-positive diagonal entry");
            p.Lambda(j, j) = Lambda(j, j);
        }
    }
    return p;
}

VectorXd NaturalIGW::stacked() const
{
    VectorXd out(1 + eta2.size());
    out(0) = eta1;
    out.tail(eta2.size()) = eta2;
    return out;
}

NaturalIGW NaturalIGW::from_stacked(Graph graph, const VectorXd& eta)
{
    if (eta.size() < 2) throw DimensionMismatch("Inverse G-Wishart natural vector too short");
    NaturalIGW n;
    n.graph = graph;
    n.eta1 = eta(0);
    n.eta2 = eta.tail(eta.size() - 1);
    dim_from_vech_length(n.eta2.size());
    return n;
}

NaturalIGW igw_to_natural(const CommonIGW& p)
{
    const CommonIGW q = make_common_igw(p.graph, p.xi, p.Lambda);
    NaturalIGW n;
    n.graph = q.graph;
    n.eta1 = -(q.xi + 2.0) / 2.0;
    n.eta2 = -0.5 * dup_t_vec(q.Lambda);
    return n;
}

MatrixXd igw_natural_matrix(const NaturalIGW& n)
{
    MatrixXd M = pinv_t_unvec(n.eta2);
    if (n.graph == Graph::Diag) M = MatrixXd(M.diagonal().asDiagonal());
    return M;
}

CommonIGW igw_from_natural(const NaturalIGW& n)
{
    return make_common_igw(n.graph, -2.0 * n.eta1 - 2.0, -2.0 * igw_natural_matrix(n));
}

bool is_proper(const NaturalIGW& n)
{
    if (!(n.eta1 < -1.0) || !n.eta2.allFinite()) return false;
    const MatrixXd L = -2.0 * igw_natural_matrix(n);
    if (n.graph == Graph::Diag) return (L.diagonal().array() > 0.0).all();
    return is_spd(L);
}

void require_proper(const NaturalIGW& n, const std::string& what)
{
    if (!(n.eta1 < -1.0))
        throw ImproperMessage(what + ": first natural parameter " + std::to_string(n.eta1) + " is not below -1");
    if (!is_proper(n)) throw ImproperMessage(what + ": implied scale matrix is not positive definite");
}

MatrixXd igw_mean_inverse(const NaturalIGW& n)
{
    const Index d = n.dim();
    const MatrixXd M = igw_natural_matrix(n);
    const MatrixXd L = -2.0 * M;
    if (n.graph == Graph::Full ? !is_spd(L) : !(L.diagonal().array() > 0.0).all())
        throw NonSPDScale("igw_mean_inverse: implied scale is not positive definite");
    const double c = n.eta1 + graph_omega(n.graph, d);
    if (n.graph == Graph::Diag) return MatrixXd((c * M.diagonal().cwiseInverse()).asDiagonal());
    return c * spd_inverse(-M) * -1.0;
}

MatrixXd igw_mean_inverse(const CommonIGW& p) { return igw_mean_inverse(igw_to_natural(p)); }

double log_multigamma(double a, Index d)
{
    double out = d * (d - 1) / 4.0 * std::log(std::numbers::pi);
    for (Index j = 1; j <= d; ++j) out += std::lgamma(a + (1.0 - j) / 2.0);
    return out;
}

double igw_log_density(const CommonIGW& pin, const MatrixXd& X)
{
    const CommonIGW p = make_common_igw(pin.graph, pin.xi, pin.Lambda);
    const Index d = p.dim();
    if (X.rows() != d || X.cols() != d) throw DimensionMismatch("igw_log_density: X has the wrong dimension");
    if (p.graph == Graph::Diag) {
        const double scale = X.cwiseAbs().maxCoeff();
        MatrixXd off = X;
        off.diagonal().setZero();
        if (off.cwiseAbs().maxCoeff() > kSymmetryTol * scale)
            throw DomainError("igw_log_density: diagonal-graph argument must be diagonal");
        double out = 0.0;
        for (Index j = 0; j < d; ++j) out += inv_chisq_log_density(p.xi, p.Lambda(j, j), X(j, j));
        return out;
    }
    if (!is_spd(X)) throw DomainError("igw_log_density: argument is not positive definite");
    const MatrixXd Xs = symmetrized(X);
    Eigen::LLT<MatrixXd> lx(Xs), ll(p.Lambda);
    const double logdet_x = 2.0 * lx.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double logdet_l = 2.0 * ll.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double k = p.xi - d + 1.0;
    double out = k / 2.0 * logdet_l - d * k / 2.0 * std::log(2.0) - d * (d - 1) / 4.0 * std::log(std::numbers::pi);
    for (Index j = 1; j <= d; ++j) out -= std::lgamma((p.xi - d - j) / 2.0 + 1.0);
    out -= (p.xi + 2.0) / 2.0 * logdet_x;
    out -= 0.5 * (p.Lambda * lx.solve(MatrixXd::Identity(d, d))).trace();
    return out;
}

double inv_wishart_log_density(double kappa, const MatrixXd& Lambda, const MatrixXd& X)
{
    const Index d = Lambda.rows();
    if (!(kappa > d - 1.0)) throw InvalidShape("inverse Wishart degrees of freedom must exceed d - 1");
    if (!is_spd(Lambda)) throw NonSPDScale("inverse Wishart scale is not positive definite");
    if (!is_spd(X)) throw DomainError("inv_wishart_log_density: argument is not positive definite");
    const double ld_l = std::log(Lambda.determinant());
    const double ld_x = std::log(X.determinant());
    return kappa / 2.0 * ld_l - kappa * d / 2.0 * std::log(2.0) - log_multigamma(kappa / 2.0, d) -
           (kappa + d + 1.0) / 2.0 * ld_x - 0.5 * (Lambda * X.inverse()).trace();
}

MatrixXd wishart_sample(double nu, const MatrixXd& S, Rng& rng)
{
    const Index d = S.rows();
    if (!(nu > d - 1.0)) throw InvalidShape("Wishart degrees of freedom must exceed d - 1");
    Eigen::LLT<MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) throw NonSPDScale("Wishart scale is not positive definite");
    std::normal_distribution<double> z(0.0, 1.0);
    MatrixXd A = MatrixXd::Zero(d, d);
    for (Index i = 0; i < d; ++i) {
        std::chi_squared_distribution<double> chi(nu - static_cast<double>(i));
        A(i, i) = std::sqrt(chi(rng));
        for (Index j = 0; j < i; ++j) A(i, j) = z(rng);
    }
    const MatrixXd LA = llt.matrixL() * A;
    MatrixXd W = LA * LA.transpose();
    return (W + W.transpose()) / 2.0;
}

double inv_chisq_sample(double delta, double lambda, Rng& rng)
{
    std::gamma_distribution<double> g(delta / 2.0, 2.0 / lambda);
    return 1.0 / g(rng);
}

MatrixXd igw_sample(const CommonIGW& pin, Rng& rng)
{
    const CommonIGW p = make_common_igw(pin.graph, pin.xi, pin.Lambda);
    const Index d = p.dim();
    if (p.graph == Graph::Diag) {
        MatrixXd X = MatrixXd::Zero(d, d);
        for (Index j = 0; j < d; ++j) X(j, j) = inv_chisq_sample(p.xi, p.Lambda(j, j), rng);
        return X;
    }
    const MatrixXd W = wishart_sample(p.xi - d + 1.0, spd_inverse(p.Lambda), rng);
    return spd_inverse(W);
}

double inv_chisq_log_density(double delta, double lambda, double x)
{
    if (!(delta > 0.0) || !(lambda > 0.0)) throw InvalidHyperparameter("inverse chi-squared parameters must be positive");
    if (!(x > 0.0)) throw DomainError("inverse chi-squared density requires x > 0");
    return delta / 2.0 * std::log(lambda / 2.0) - std::lgamma(delta / 2.0) - (delta + 2.0) / 2.0 * std::log(x) -
           lambda / (2.0 * x);
}

double inv_gamma_log_density(double alpha, double beta, double x)
{
    if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidHyperparameter("inverse gamma parameters must be positive");
    if (!(x > 0.0)) throw DomainError("inverse gamma density requires x > 0");
    return alpha * std::log(beta) - std::lgamma(alpha) - (alpha + 1.0) * std::log(x) - beta / x;
}

double gamma_log_density(double shape, double rate, double x)
{
    if (!(shape > 0.0) || !(rate > 0.0)) throw InvalidHyperparameter("gamma parameters must be positive");
    if (!(x > 0.0)) throw DomainError("gamma density requires x > 0");
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double half_t_log_density(double s, double nu, double x)
{
    if (!(s > 0.0) || !(nu > 0.0)) throw InvalidHyperparameter("half-t parameters must be positive");
    if (x < 0.0) throw DomainError("half-t density requires x >= 0");
    const double z = x / s;
    return std::log(2.0) + std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
           0.5 * std::log(nu * std::numbers::pi) - std::log(s) - (nu + 1.0) / 2.0 * std::log1p(z * z / nu);
}

VectorXd NaturalMVN::stacked() const
{
    VectorXd out(eta1.size() + eta2.size());
    out << eta1, eta2;
    return out;
}

NaturalMVN NaturalMVN::from_stacked(const VectorXd& eta)
{
    // n = k + k(k+1)/2 = k(k+3)/2
    const Index k = static_cast<Index>(std::llround((std::sqrt(9.0 + 8.0 * eta.size()) - 3.0) / 2.0));
    if (k < 1 || k * (k + 3) / 2 != eta.size()) throw DimensionMismatch("Gaussian natural vector has invalid length");
    NaturalMVN n;
    n.eta1 = eta.head(k);
    n.eta2 = eta.tail(vech_length(k));
    return n;
}

NaturalMVN mvn_to_natural(const VectorXd& mu, const MatrixXd& Sigma)
{
    if (Sigma.rows() != mu.size() || Sigma.cols() != mu.size())
        throw DimensionMismatch("mvn_to_natural: covariance does not match mean length");
    if (!is_spd(Sigma)) throw NonSPDPrecision("mvn_to_natural: covariance is not positive definite");
    const MatrixXd P = spd_inverse(symmetrized(Sigma));
    NaturalMVN n;
    n.eta1 = P * mu;
    n.eta2 = -0.5 * dup_t_vec(P);
    return n;
}

MatrixXd mvn_precision(const NaturalMVN& n)
{
    if (n.eta2.size() != vech_length(n.eta1.size()))
        throw DimensionMismatch("Gaussian natural vector parts have inconsistent lengths");
    return -2.0 * pinv_t_unvec(n.eta2);
}

MVNMoments mvn_from_natural(const NaturalMVN& n)
{
    const MatrixXd P = mvn_precision(n);
    if (!is_spd(P)) throw NonSPDPrecision("mvn_from_natural: implied precision is not positive definite");
    MVNMoments m;
    m.cov = spd_inverse(P);
    m.mean = m.cov * n.eta1;
    return m;
}

VectorXd mvn_vech_to_vec_form(const NaturalMVN& n)
{
    const Index k = n.dim();
    VectorXd out(k + k * k);
    out << n.eta1, duplication_pinv(k).transpose() * n.eta2;
    return out;
}

NaturalMVN mvn_vec_form_to_vech(const VectorXd& eta_vec, Index k)
{
    if (eta_vec.size() != k + k * k) throw DimensionMismatch("vec-form Gaussian natural vector has invalid length");
    NaturalMVN n;
    n.eta1 = eta_vec.head(k);
    n.eta2 = duplication(k).transpose() * eta_vec.tail(k * k);
    return n;
}

}  // namespace igw
