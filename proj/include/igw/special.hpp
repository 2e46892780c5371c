#pragma once

#include <functional>
#include <vector>

namespace igw {

double digamma(double x);
double trigamma(double x);

// log(x) - digamma(x), accurate for large x.
double log_minus_digamma(double x);

// x log(x) - lgamma(x), accurate for large x.
double xlogx_minus_lgamma(double x);

// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;
};

const GaussLegendre& gauss_legendre(int n);

struct QuadOptions {
    double rel_tail = 1e-12;  // stop once a panel adds less than this fraction of the total
    double growth = 1.5;      // panel width multiplier moving into the tails
    double max_width_factor = 16.0;
    int max_panels = 4000;    // per side
    double s_min = -700.0;
    double s_max = 700.0;
};

// Composite Gauss-Legendre evaluation of int exp(f(s)) ds over the real line.
struct LogQuadrature {
    std::vector<double> nodes;      // ascending
    std::vector<double> log_terms;  // log(weight) + f(node)
    double log_integral = 0.0;

    // int g(s) exp(f(s)) ds / int exp(f(s)) ds on the same nodes.
    double expectation(const std::function<double(double)>& g) const;
};

// Panels start at width `width` around `mode` and grow outward until tail
// contributions fall below rel_tail. Throws DivergentIntegral when the
// integrand fails to decay before the s_min/s_max bounds.
LogQuadrature integrate_exp(const std::function<double(double)>& f, double mode, double width,
                            const QuadOptions& opt = {});

// Coarse scan on [lo, hi] followed by golden-section refinement.
double locate_mode(const std::function<double(double)>& f, double lo, double hi, double step = 0.25);

// 1 / sqrt(-f''(s)) by central differences, clamped to [1e-6, 1].
double curvature_width(const std::function<double(double)>& f, double s);

// log(sum(exp(v))).
double log_sum_exp(const std::vector<double>& v);

}  // namespace igw
