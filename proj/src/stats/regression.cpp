#include "ke/stats/regression.hpp"

#include <cmath>
#include <cstddef>

#include "ke/errors.hpp"
#include "ke/stats/distributions.hpp"
#include "ke/stats/tests.hpp"

namespace ke::stats {

namespace {

// Row-major dense matrix, sized once.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct QrFit {
    std::vector<double> beta;      // p+1 coefficients, intercept first
    std::vector<double> xtx_inv_diag;
    double rss = 0.0;
};

// In-place Householder QR solve of min ||X b - y||. Also returns the
// diagonal of (X'X)^-1 = R^-1 R^-T needed for standard errors.
QrFit qr_solve(Matrix x, std::vector<double> y) {
    const std::size_t n = x.rows, p = x.cols;

    double max_norm = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) ss += x.at(i, j) * x.at(i, j);
        max_norm = std::max(max_norm, std::sqrt(ss));
    }
    const double tol = std::max(1e-300, max_norm * static_cast<double>(n) * 1e-13);

    for (std::size_t j = 0; j < p; ++j) {
        double ss = 0.0;
        for (std::size_t i = j; i < n; ++i) ss += x.at(i, j) * x.at(i, j);
        double alpha = std::sqrt(ss);
        if (alpha < tol)
            throw Error(ErrorKind::singular_design,
                        "design matrix is rank deficient (collinear or constant column)");
        if (x.at(j, j) > 0) alpha = -alpha;

        // Householder vector stored in column j below the diagonal.
        const double vjj = x.at(j, j) - alpha;
        std::vector<double> v(n - j, 0.0);
        v[0] = vjj;
        for (std::size_t i = j + 1; i < n; ++i) v[i - j] = x.at(i, j);
        const double vnorm2 = alpha * alpha - 2.0 * alpha * x.at(j, j) + ss;
        if (vnorm2 <= 0.0)
            throw Error(ErrorKind::singular_design, "design matrix is numerically singular");

        x.at(j, j) = alpha;
        for (std::size_t i = j + 1; i < n; ++i) x.at(i, j) = 0.0;

        for (std::size_t c = j + 1; c < p; ++c) {
            double dot = 0.0;
            for (std::size_t i = j; i < n; ++i) dot += v[i - j] * x.at(i, c);
            const double scale = 2.0 * dot / vnorm2;
            for (std::size_t i = j; i < n; ++i) x.at(i, c) -= scale * v[i - j];
        }
        double dot_y = 0.0;
        for (std::size_t i = j; i < n; ++i) dot_y += v[i - j] * y[i];
        const double scale_y = 2.0 * dot_y / vnorm2;
        for (std::size_t i = j; i < n; ++i) y[i] -= scale_y * v[i - j];
    }

    QrFit fit;
    fit.beta.assign(p, 0.0);
    for (std::size_t step = p; step-- > 0;) {
        double acc = y[step];
        for (std::size_t c = step + 1; c < p; ++c) acc -= x.at(step, c) * fit.beta[c];
        fit.beta[step] = acc / x.at(step, step);
    }

    for (std::size_t i = p; i < n; ++i) fit.rss += y[i] * y[i];

    // R^{-1}, column by column; diag of (X'X)^{-1} is the squared row norms.
    Matrix rinv(p, p);
    for (std::size_t c = 0; c < p; ++c) {
        for (std::size_t step = c + 1; step-- > 0;) {
            double acc = (step == c) ? 1.0 : 0.0;
            for (std::size_t k = step + 1; k <= c; ++k) acc -= x.at(step, k) * rinv.at(k, c);
            rinv.at(step, c) = acc / x.at(step, step);
        }
    }
    fit.xtx_inv_diag.assign(p, 0.0);
    for (std::size_t r = 0; r < p; ++r) {
        double acc = 0.0;
        for (std::size_t c = r; c < p; ++c) acc += rinv.at(r, c) * rinv.at(r, c);
        fit.xtx_inv_diag[r] = acc;
    }
    return fit;
}

std::vector<double> zscore(const std::vector<double>& values) {
    const double m = mean(values);
    const double sd = std::sqrt(sample_variance(values));
    if (sd <= 0.0)
        throw Error(ErrorKind::singular_design, "cannot standardize a constant predictor");
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back((v - m) / sd);
    return out;
}

Matrix build_design(const std::vector<Column>& predictors, std::size_t n, bool standardize) {
    Matrix x(n, predictors.size() + 1);
    for (std::size_t i = 0; i < n; ++i) x.at(i, 0) = 1.0;
    for (std::size_t j = 0; j < predictors.size(); ++j) {
        const auto& raw = predictors[j].values;
        if (raw.size() != n)
            throw Error(ErrorKind::insufficient_data,
                        "predictor '" + predictors[j].name + "' length mismatch");
        const std::vector<double> col = standardize ? zscore(raw) : raw;
        for (std::size_t i = 0; i < n; ++i) x.at(i, j + 1) = col[i];
    }
    return x;
}

double aux_r_squared(const std::vector<Column>& others, const std::vector<double>& target) {
    const std::size_t n = target.size();
    Matrix x = build_design(others, n, false);
    QrFit fit = qr_solve(std::move(x), target);
    const double m = mean(target);
    double tss = 0.0;
    for (double v : target) tss += (v - m) * (v - m);
    if (tss <= 0.0)
        throw Error(ErrorKind::singular_design, "constant predictor in collinearity check");
    return 1.0 - fit.rss / tss;
}

}  // namespace

const Coefficient& RegressionResult::coef(const std::string& name) const {
    for (const auto& c : coefficients)
        if (c.name == name) return c;
    throw Error(ErrorKind::insufficient_data, "no coefficient named '" + name + "'");
}

RegressionResult ols_fit(const std::vector<Column>& predictors,
                         const std::vector<double>& outcome, bool standardize) {
    if (predictors.empty())
        throw Error(ErrorKind::insufficient_data, "regression needs at least one predictor");
    const std::size_t n = outcome.size();
    const std::size_t p = predictors.size();
    if (n <= p + 1)
        throw Error(ErrorKind::insufficient_data,
                    "regression needs more observations than parameters");

    Matrix x = build_design(predictors, n, standardize);
    QrFit fit = qr_solve(std::move(x), outcome);

    const double df_resid = static_cast<double>(n - p - 1);
    const double s2 = fit.rss / df_resid;

    const double ym = mean(outcome);
    double tss = 0.0;
    for (double v : outcome) tss += (v - ym) * (v - ym);
    if (tss <= 0.0)
        throw Error(ErrorKind::insufficient_variance, "outcome is constant");

    RegressionResult result;
    result.n = static_cast<std::int64_t>(n);
    result.r_squared = 1.0 - fit.rss / tss;
    result.adj_r_squared =
        1.0 - (1.0 - result.r_squared) * static_cast<double>(n - 1) / df_resid;

    auto make_coef = [&](std::size_t idx, const std::string& name) {
        Coefficient c;
        c.name = name;
        c.beta = fit.beta[idx];
        c.std_err = std::sqrt(s2 * fit.xtx_inv_diag[idx]);
        c.p_value = c.std_err > 0.0
                        ? student_t_two_sided_p(c.beta / c.std_err, df_resid)
                        : 0.0;
        return c;
    };
    result.intercept = make_coef(0, "intercept");
    for (std::size_t j = 0; j < p; ++j)
        result.coefficients.push_back(make_coef(j + 1, predictors[j].name));

    if (p >= 2) result.vif = variance_inflation_factors(predictors);
    return result;
}

std::vector<std::pair<std::string, double>> variance_inflation_factors(
    const std::vector<Column>& predictors) {
    if (predictors.size() < 2)
        throw Error(ErrorKind::insufficient_data,
                    "collinearity diagnostics need at least 2 predictors");
    std::vector<std::pair<std::string, double>> out;
    out.reserve(predictors.size());
    for (std::size_t j = 0; j < predictors.size(); ++j) {
        std::vector<Column> others;
        others.reserve(predictors.size() - 1);
        for (std::size_t k = 0; k < predictors.size(); ++k)
            if (k != j) others.push_back(predictors[k]);
        const double r2 = aux_r_squared(others, predictors[j].values);
        if (r2 >= 1.0 - 1e-12)
            throw Error(ErrorKind::singular_design,
                        "predictor '" + predictors[j].name +
                            "' is perfectly collinear with the others (VIF -> inf)");
        out.emplace_back(predictors[j].name, 1.0 / (1.0 - r2));
    }
    return out;
}

}  // namespace ke::stats
