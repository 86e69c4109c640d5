#pragma once

#include <string>
#include <vector>

#include "nbf/rng.hpp"
#include "nbf/sample.hpp"

namespace nbf {

// ---------------------------------------------------------------------------
// Probability kernels (no external numerical library; everything below is
// unit-tested against frozen reference values and round-trip identities).
// ---------------------------------------------------------------------------

double normal_cdf(double x);
// p in (0,1); AS241-style rational approximation plus one Newton polish.
double normal_quantile(double p);

// Regularized incomplete beta I_x(a,b) via Lentz continued fraction.
double reg_inc_beta(double a, double b, double x);
double beta_cdf(double x, double a, double b);

// Student t with real df > 0 (fractional df appears via Satterthwaite).
double t_cdf(double x, double df);
double t_quantile(double p, double df);

// Chi-square with one degree of freedom, built on the normal kernel so that
// the quantile satisfies c_{1-a} = z_{1-a/2}^2 exactly.
double chi2_1_cdf(double x);
double chi2_1_quantile(double p);

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

double draw_standard_normal(RngStream& g);
double draw_gamma(RngStream& g, double shape);  // scale 1, Marsaglia-Tsang
double draw_beta(RngStream& g, double a, double b);
long draw_poisson(RngStream& g, double lambda);     // inversion, lambda <= 30
double draw_exponential(RngStream& g, double rate);  // rate parametrization
double draw_laplace(RngStream& g, double location, double scale);

struct Distribution {
    enum class Family { Normal, Beta, Poisson, Exponential, Laplace };

    Family family = Family::Normal;
    double a = 0.0;  // mean / alpha / lambda / rate / location
    double b = 1.0;  // variance / beta / (unused) / (unused) / scale

    // Note: normal is parametrized by variance, not standard deviation.
    static Distribution normal(double mean, double variance);
    static Distribution beta(double alpha, double beta);
    static Distribution poisson(double lambda);
    static Distribution exponential(double rate);
    static Distribution laplace(double location, double scale);

    double draw(RngStream& g) const;
    double cdf(double x) const;
    std::string name() const;
};

std::vector<double> draw_many(const Distribution& dist, int n, RngStream& g);
Sample draw_sample(const Distribution& dist, int n, RngStream& g, const std::string& label);

}  // namespace nbf
