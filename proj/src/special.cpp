#include "igw/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "igw/errors.hpp"

namespace igw {

double digamma(double x)
{
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("digamma: argument must be positive and finite");
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double r = 1.0 / (x * x);
    const double series =
        r * (1.0 / 12 - r * (1.0 / 120 - r * (1.0 / 252 - r * (1.0 / 240 - r * (1.0 / 132 - r * (691.0 / 32760 - r / 12))))));
    return result + std::log(x) - 0.5 / x - series;
}

double trigamma(double x)
{
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("trigamma: argument must be positive and finite");
    double result = 0.0;
    while (x < 10.0) {
        result += 1.0 / (x * x);
        x += 1.0;
    }
    const double r = 1.0 / (x * x);
    const double series =
        1.0 / x + r / 2.0 +
        r / x * (1.0 / 6 - r * (1.0 / 30 - r * (1.0 / 42 - r * (1.0 / 30 - r * (5.0 / 66 - r * (691.0 / 2730 - r * 7.0 / 6))))));
    return result + series;
}

double log_minus_digamma(double x)
{
    if (x < 10.0) return std::log(x) - digamma(x);
    const double r = 1.0 / (x * x);
    return 0.5 / x +
           r * (1.0 / 12 - r * (1.0 / 120 - r * (1.0 / 252 - r * (1.0 / 240 - r * (1.0 / 132 - r * (691.0 / 32760 - r / 12))))));
}

double xlogx_minus_lgamma(double x)
{
    if (!(x > 0.0)) throw DomainError("xlogx_minus_lgamma: argument must be positive");
    if (x < 20.0) return x * std::log(x) - std::lgamma(x);
    const double r = 1.0 / (x * x);
    return x + 0.5 * std::log(x) - 0.5 * std::log(2.0 * std::numbers::pi) -
           (1.0 / 12 - r * (1.0 / 360 - r * (1.0 / 1260 - r / 1680))) / x;
}

namespace {

GaussLegendre build_gauss_legendre(int n)
{
    GaussLegendre g;
    g.x.resize(n);
    g.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        g.x[n - 1 - i] = z;
        g.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return g;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n)
{
    static std::mutex mu;
    static std::map<int, std::unique_ptr<const GaussLegendre>> cache;
    if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<const GaussLegendre>(build_gauss_legendre(n));
    return *slot;
}

double log_sum_exp(const std::vector<double>& v)
{
    if (v.empty()) return -std::numeric_limits<double>::infinity();
    const double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

double LogQuadrature::expectation(const std::function<double(double)>& g) const
{
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const double w = std::exp(log_terms[k] - log_integral);
        num += w * g(nodes[k]);
        den += w;
    }
    return num / den;
}

namespace {

struct Panel {
    std::vector<double> s;
    std::vector<double> lt;
    double log_mass;
};

Panel eval_panel(const std::function<double(double)>& f, double a, double b)
{
    const auto& gl = gauss_legendre(32);
    Panel p;
    p.s.resize(gl.x.size());
    p.lt.resize(gl.x.size());
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
        p.s[i] = mid + half * gl.x[i];
        const double v = f(p.s[i]);
        p.lt[i] = std::log(gl.w[i] * half) + (std::isnan(v) ? -std::numeric_limits<double>::infinity() : v);
    }
    p.log_mass = log_sum_exp(p.lt);
    return p;
}

}  // namespace

LogQuadrature integrate_exp(const std::function<double(double)>& f, double mode, double width,
                            const QuadOptions& opt)
{
    if (!(width > 0.0) || !std::isfinite(mode)) throw DomainError("integrate_exp: bad mode or width");
    std::vector<Panel> left, right;
    right.push_back(eval_panel(f, mode - width / 2, mode + width / 2));
    double log_total = right.back().log_mass;
    if (!std::isfinite(log_total)) throw NumericalFailure("integrate_exp: integrand vanishes at the mode");

    // Expand one side at a time; side = +1 (right) or -1 (left).
    auto expand = [&](int side) {
        double edge = mode + side * width / 2;
        double w = width;
        for (int k = 0;; ++k) {
            if (k >= opt.max_panels || edge > opt.s_max || edge < opt.s_min) {
                throw DivergentIntegral("integrand does not decay in the " +
                                        std::string(side > 0 ? "upper" : "lower") + " tail");
            }
            const double a = side > 0 ? edge : edge - w;
            const double b = side > 0 ? edge + w : edge;
            Panel p = eval_panel(f, a, b);
            const double f_in = f(edge), f_out = f(edge + side * w);
            edge += side * w;
            const double lm = p.log_mass;
            if (side > 0) right.push_back(std::move(p)); else left.push_back(std::move(p));
            if (std::isfinite(lm)) log_total = log_sum_exp({log_total, lm});
            if (!std::isfinite(log_total)) throw DivergentIntegral("integral overflows");
            const bool decaying = std::isfinite(f_out) ? f_out <= f_in
                                                       : f_out == -std::numeric_limits<double>::infinity();
            if (decaying && (!std::isfinite(lm) || lm - log_total < std::log(opt.rel_tail))) break;
            w = std::min(w * opt.growth, width * opt.max_width_factor);
        }
    };
    expand(+1);
    expand(-1);

    LogQuadrature q;
    for (auto it = left.rbegin(); it != left.rend(); ++it) {
        q.nodes.insert(q.nodes.end(), it->s.begin(), it->s.end());
        q.log_terms.insert(q.log_terms.end(), it->lt.begin(), it->lt.end());
    }
    for (const auto& p : right) {
        q.nodes.insert(q.nodes.end(), p.s.begin(), p.s.end());
        q.log_terms.insert(q.log_terms.end(), p.lt.begin(), p.lt.end());
    }
    q.log_integral = log_sum_exp(q.log_terms);
    return q;
}

double locate_mode(const std::function<double(double)>& f, double lo, double hi, double step)
{
    double best = lo, fbest = -std::numeric_limits<double>::infinity();
    for (double s = lo; s <= hi; s += step) {
        const double v = f(s);
        if (v > fbest) {
            fbest = v;
            best = s;
        }
    }
    double a = best - step, b = best + step;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && b - a > 1e-12 * (1.0 + std::abs(best)); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

double curvature_width(const std::function<double(double)>& f, double s)
{
    const double h = 1e-3;
    const double f2 = (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h);
    if (!(f2 < 0.0) || !std::isfinite(f2)) return 1.0;
    return std::clamp(1.0 / std::sqrt(-f2), 1e-6, 1.0);
}

}  // namespace igw
