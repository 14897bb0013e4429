#include "ke/stats/distributions.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ke/errors.hpp"

namespace ke::stats {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
    constexpr int max_iter = 500;
    constexpr double eps = 1e-15;
    constexpr double fpmin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) return h;
    }
    throw Error(ErrorKind::insufficient_data, "incomplete beta continued fraction failed to converge");
}

// 20-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; mirror).
constexpr std::array<double, 10> kGlNodes = {
    0.07652652113349733, 0.22778585114164507, 0.37370608871541955, 0.5108670019508271,
    0.636053680726515,   0.7463319064601508,  0.8391169718222188,  0.912234428251326,
    0.9639719272779138,  0.9931285991850949};
constexpr std::array<double, 10> kGlWeights = {
    0.15275338713072584, 0.14917298647260374, 0.1420961093183821,  0.13168863844917664,
    0.11819453196151841, 0.10193011981724044, 0.08327674157670475, 0.06267204833410906,
    0.04060142980038694, 0.017614007139152118};

// Integrates f over [lo, hi] with `panels` composite 20-point Gauss-Legendre panels.
template <typename F>
double integrate(F&& f, double lo, double hi, int panels) {
    const double width = (hi - lo) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * width;
        const double half = 0.5 * width;
        double acc = 0.0;
        for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
            const double dx = half * kGlNodes[i];
            acc += kGlWeights[i] * (f(mid + dx) + f(mid - dx));
        }
        total += acc * half;
    }
    return total;
}

// P(range of k iid standard normals < w).
double normal_range_cdf(double w, int k) {
    if (w <= 0.0) return 0.0;
    const auto integrand = [w, k](double z) {
        const double span = normal_cdf(z) - normal_cdf(z - w);
        if (span <= 0.0) return 0.0;
        return normal_pdf(z) * std::pow(span, k - 1);
    };
    const double value = k * integrate(integrand, -8.5, 8.5, 12);
    return std::clamp(value, 0.0, 1.0);
}

// log density of sqrt(chi^2_df / df), the scale factor of the studentized range.
double log_chi_scale_density(double u, double df) {
    if (u <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(2.0) + 0.5 * df * std::log(df / 2.0) - ln_gamma(df / 2.0) +
           (df - 1.0) * std::log(u) - df * u * u / 2.0;
}

}  // namespace

double ln_gamma(double x) {
    // Lanczos approximation, good to ~1e-15 for x > 0.
    static const double cof[6] = {76.18009172947146,  -86.50532032941677, 24.01409824083091,
                                  -1.231739572450155, 0.1208650973866179e-2, -0.5395239384953e-5};
    double y = x;
    double tmp = x + 5.5;
    tmp -= (x + 0.5) * std::log(tmp);
    double ser = 1.000000000190015;
    for (int j = 0; j <= 5; ++j) ser += cof[j] / ++y;
    return -tmp + std::log(2.5066282746310005 * ser / x);
}

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw Error(ErrorKind::insufficient_data, "incomplete beta requires positive shape parameters");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double bt = std::exp(ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) +
                               a * std::log(x) + b * std::log(1.0 - x));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
    return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) throw Error(ErrorKind::insufficient_data, "t distribution needs positive df");
    if (std::isinf(t)) return 0.0;
    return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double student_t_cdf(double t, double df) {
    const double half_p = 0.5 * student_t_two_sided_p(t, df);
    return t >= 0.0 ? 1.0 - half_p : half_p;
}

double student_t_quantile(double p, double df) {
    if (!(df > 0.0)) throw Error(ErrorKind::insufficient_data, "t distribution needs positive df");
    if (!(p > 0.0 && p < 1.0))
        throw Error(ErrorKind::insufficient_data, "t quantile requires p in (0, 1)");
    if (p == 0.5) return 0.0;
    double lo = -1.0, hi = 1.0;
    while (student_t_cdf(lo, df) > p) lo *= 2.0;
    while (student_t_cdf(hi, df) < p) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, std::fabs(lo)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (student_t_cdf(mid, df) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double f_upper_tail(double f, double df1, double df2) {
    if (!(df1 > 0.0) || !(df2 > 0.0))
        throw Error(ErrorKind::insufficient_data, "F distribution needs positive df");
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    return incomplete_beta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f));
}

double studentized_range_cdf(double q, int k, double df) {
    if (k < 2)
        throw Error(ErrorKind::insufficient_data, "studentized range requires at least 2 groups");
    if (!(df > 0.0))
        throw Error(ErrorKind::insufficient_data, "studentized range requires positive df");
    if (q <= 0.0) return 0.0;
    if (std::isinf(df) || df > 1e6) return normal_range_cdf(q, k);

    // Outer integral over the scale estimate u ~ sqrt(chi^2_df / df). The
    // density peaks near 1 with spread ~ 1/sqrt(2 df); widen the window for
    // small df where the tail is heavy.
    double lo, hi;
    int panels;
    if (df < 12.0) {
        lo = 0.0;
        hi = 10.0;
        panels = 32;
    } else {
        const double sigma = 1.0 / std::sqrt(2.0 * df);
        lo = std::max(0.0, 1.0 - 14.0 * sigma);
        hi = 1.0 + 14.0 * sigma;
        panels = 24;
    }
    const auto integrand = [&](double u) {
        const double log_density = log_chi_scale_density(u, df);
        if (log_density < -745.0) return 0.0;
        return std::exp(log_density) * normal_range_cdf(q * u, k);
    };
    return std::clamp(integrate(integrand, lo, hi, panels), 0.0, 1.0);
}

double studentized_range_quantile(double p, int k, double df) {
    if (!(p > 0.0 && p < 1.0))
        throw Error(ErrorKind::insufficient_data, "studentized range quantile requires p in (0, 1)");
    double lo = 0.0, hi = 16.0;
    while (studentized_range_cdf(hi, k, df) < p) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6)
            throw Error(ErrorKind::insufficient_data, "studentized range quantile out of range");
    }
    for (int i = 0; i < 80 && hi - lo > 1e-8; ++i) {
        const double mid = 0.5 * (lo + hi);
        (studentized_range_cdf(mid, k, df) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace ke::stats
