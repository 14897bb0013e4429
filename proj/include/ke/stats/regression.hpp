#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ke::stats {

struct Column {
    std::string name;
    std::vector<double> values;
};

struct Coefficient {
    std::string name;
    double beta = 0.0;
    double std_err = 0.0;
    double p_value = 1.0;
};

struct RegressionResult {
    Coefficient intercept;
    std::vector<Coefficient> coefficients;           // predictor input order
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    std::vector<std::pair<std::string, double>> vif;  // filled when >= 2 predictors
    std::int64_t n = 0;

    const Coefficient& coef(const std::string& name) const;
};

// Least-squares fit with intercept via Householder QR. With standardize,
// every predictor is z-scored (mean 0, sample sd 1) before fitting, so the
// betas are invariant to positive rescaling of the raw columns. Standard
// errors use the unbiased residual variance; p-values are two-sided t with
// df = n - p - 1. Throws singular_design on rank deficiency.
RegressionResult ols_fit(const std::vector<Column>& predictors,
                         const std::vector<double>& outcome, bool standardize);

// VIF_j = 1 / (1 - R_j^2), R_j^2 from regressing predictor j on the others
// (with intercept). Throws singular_design on perfect collinearity.
std::vector<std::pair<std::string, double>> variance_inflation_factors(
    const std::vector<Column>& predictors);

}  // namespace ke::stats
