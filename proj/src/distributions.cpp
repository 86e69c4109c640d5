#include "nbf/distributions.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nbf {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kInvSqrt2 = 0.707106781186547524400844362104849039;
constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;

double normal_pdf(double x) {
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

// Wichura's PPND16 rational approximations (relative error ~1e-16 in the
// central region; the caller adds one Newton step for the tails).
double ppnd16(double p) {
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        const double num =
            q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                       6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                     1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                   1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        const double den =
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                  3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
              4.2313330701600911252e1) * r + 1.0);
        return num / den;
    }
    r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
        x = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        x = num / den;
    }
    return (q < 0.0) ? -x : x;
}

// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 3.0e-16;
    constexpr double kFpMin = 1.0e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("reg_inc_beta: continued fraction did not converge");
}

double t_pdf(double x, double df) {
    const double lg = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                      0.5 * std::log(df * kPi);
    return std::exp(lg - 0.5 * (df + 1.0) * std::log1p(x * x / df));
}

}  // namespace

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * kInvSqrt2);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("normal_quantile: p must lie in (0,1)");
    }
    double x = ppnd16(p);
    const double pdf = normal_pdf(x);
    if (pdf > 1e-280) {
        x -= (normal_cdf(x) - p) / pdf;
    }
    return x;
}

double reg_inc_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument("reg_inc_beta: shape parameters must be positive");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::invalid_argument("reg_inc_beta: x must lie in [0,1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double lnbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                        a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(lnbt);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * betacf(a, b, x) / a;
    }
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double beta_cdf(double x, double a, double b) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return reg_inc_beta(a, b, x);
}

double t_cdf(double x, double df) {
    if (!(df > 0.0)) {
        throw std::invalid_argument("t_cdf: df must be positive");
    }
    if (std::isnan(x)) {
        throw std::invalid_argument("t_cdf: x must not be NaN");
    }
    if (x == 0.0) return 0.5;
    const double ib = reg_inc_beta(0.5 * df, 0.5, df / (df + x * x));
    return (x > 0.0) ? 1.0 - 0.5 * ib : 0.5 * ib;
}

double t_quantile(double p, double df) {
    if (!(df > 0.0)) {
        throw std::invalid_argument("t_quantile: df must be positive");
    }
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("t_quantile: p must lie in (0,1)");
    }
    if (p == 0.5) return 0.0;
    if (p < 0.5) return -t_quantile(1.0 - p, df);

    // Bracket the root, then safeguarded Newton on the CDF.
    double lo = 0.0;
    double hi = 2.0;
    for (int i = 0; i < 400 && t_cdf(hi, df) < p; ++i) {
        lo = hi;
        hi *= 8.0;
        if (hi > 1e305) break;
    }
    double x = normal_quantile(p);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = t_cdf(x, df) - p;
        if (f > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        if (std::fabs(f) < 1e-13) break;
        const double pdf = t_pdf(x, df);
        double next = (pdf > 0.0) ? x - f / pdf : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x) break;
        x = next;
    }
    return x;
}

double chi2_1_cdf(double x) {
    if (x < 0.0) {
        throw std::invalid_argument("chi2_1_cdf: x must be nonnegative");
    }
    return std::erf(std::sqrt(0.5 * x));
}

double chi2_1_quantile(double p) {
    if (!(p >= 0.0 && p < 1.0)) {
        throw std::invalid_argument("chi2_1_quantile: p must lie in [0,1)");
    }
    if (p == 0.0) return 0.0;
    const double z = normal_quantile(0.5 * (1.0 + p));
    return z * z;
}

double draw_standard_normal(RngStream& g) {
    return normal_quantile(g.next_uniform());
}

double draw_gamma(RngStream& g, double shape) {
    if (!(shape > 0.0)) {
        throw std::invalid_argument("draw_gamma: shape must be positive");
    }
    if (shape < 1.0) {
        // Boost a shape+1 draw down by a uniform power.
        const double u = g.next_uniform();
        return draw_gamma(g, shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
        double x;
        double v;
        do {
            x = draw_standard_normal(g);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = g.next_uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double draw_beta(RngStream& g, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument("draw_beta: shape parameters must be positive");
    }
    const double x = draw_gamma(g, a);
    const double y = draw_gamma(g, b);
    const double s = x + y;
    return (s > 0.0) ? x / s : 0.5;
}

long draw_poisson(RngStream& g, double lambda) {
    if (!(lambda > 0.0 && lambda <= 30.0)) {
        throw std::invalid_argument("draw_poisson: lambda must lie in (0,30]");
    }
    const double u = g.next_uniform();
    double term = std::exp(-lambda);
    double cum = term;
    long k = 0;
    while (u > cum && k < 1000) {
        ++k;
        term *= lambda / static_cast<double>(k);
        cum += term;
    }
    return k;
}

double draw_exponential(RngStream& g, double rate) {
    if (!(rate > 0.0)) {
        throw std::invalid_argument("draw_exponential: rate must be positive");
    }
    return -std::log(g.next_uniform()) / rate;
}

double draw_laplace(RngStream& g, double location, double scale) {
    if (!(scale > 0.0)) {
        throw std::invalid_argument("draw_laplace: scale must be positive");
    }
    const double v = g.next_uniform() - 0.5;
    const double mag = -std::log(1.0 - 2.0 * std::fabs(v));
    return location + ((v < 0.0) ? -scale * mag : scale * mag);
}

Distribution Distribution::normal(double mean, double variance) {
    if (!(variance > 0.0)) {
        throw std::invalid_argument("Distribution::normal: variance must be positive");
    }
    return {Family::Normal, mean, variance};
}

Distribution Distribution::beta(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0)) {
        throw std::invalid_argument("Distribution::beta: shape parameters must be positive");
    }
    return {Family::Beta, alpha, beta};
}

Distribution Distribution::poisson(double lambda) {
    if (!(lambda > 0.0 && lambda <= 30.0)) {
        throw std::invalid_argument("Distribution::poisson: lambda must lie in (0,30]");
    }
    return {Family::Poisson, lambda, 0.0};
}

Distribution Distribution::exponential(double rate) {
    if (!(rate > 0.0)) {
        throw std::invalid_argument("Distribution::exponential: rate must be positive");
    }
    return {Family::Exponential, rate, 0.0};
}

Distribution Distribution::laplace(double location, double scale) {
    if (!(scale > 0.0)) {
        throw std::invalid_argument("Distribution::laplace: scale must be positive");
    }
    return {Family::Laplace, location, scale};
}

double Distribution::draw(RngStream& g) const {
    switch (family) {
        case Family::Normal:
            return a + std::sqrt(b) * draw_standard_normal(g);
        case Family::Beta:
            return draw_beta(g, a, b);
        case Family::Poisson:
            return static_cast<double>(draw_poisson(g, a));
        case Family::Exponential:
            return draw_exponential(g, a);
        case Family::Laplace:
            return draw_laplace(g, a, b);
    }
    throw std::logic_error("Distribution::draw: unknown family");
}

double Distribution::cdf(double x) const {
    switch (family) {
        case Family::Normal:
            return normal_cdf((x - a) / std::sqrt(b));
        case Family::Beta:
            return beta_cdf(x, a, b);
        case Family::Poisson: {
            if (x < 0.0) return 0.0;
            const long k = static_cast<long>(std::floor(x));
            double term = std::exp(-a);
            double cum = term;
            for (long i = 1; i <= k; ++i) {
                term *= a / static_cast<double>(i);
                cum += term;
            }
            return std::min(cum, 1.0);
        }
        case Family::Exponential:
            return (x <= 0.0) ? 0.0 : -std::expm1(-a * x);
        case Family::Laplace: {
            const double z = (x - a) / b;
            return (z < 0.0) ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
        }
    }
    throw std::logic_error("Distribution::cdf: unknown family");
}

std::string Distribution::name() const {
    std::ostringstream out;
    switch (family) {
        case Family::Normal:
            out << "normal(" << a << "," << b << ")";
            break;
        case Family::Beta:
            out << "beta(" << a << "," << b << ")";
            break;
        case Family::Poisson:
            out << "poisson(" << a << ")";
            break;
        case Family::Exponential:
            out << "exponential(" << a << ")";
            break;
        case Family::Laplace:
            out << "laplace(" << a << "," << b << ")";
            break;
    }
    return out.str();
}

std::vector<double> draw_many(const Distribution& dist, int n, RngStream& g) {
    if (n < 1) {
        throw std::invalid_argument("draw_many: n must be at least 1");
    }
    std::vector<double> out(static_cast<std::size_t>(n));
    for (double& v : out) v = dist.draw(g);
    return out;
}

Sample draw_sample(const Distribution& dist, int n, RngStream& g, const std::string& label) {
    return Sample{draw_many(dist, n, g), label};
}

}  // namespace nbf
