#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fsci::stats {

// Moments and order statistics -------------------------------------------------

/// Σ wᵢxᵢ / Σ wᵢ, summed in input order.
/// Throws LengthMismatch, EmptyInput, InvalidArgument (negative or non-finite weight), ZeroTotalWeight.
double weighted_mean(std::span<const double> values, std::span<const double> weights);

/// Analytic-weight SD: weights rescaled to sum to n, then
/// sqrt(Σ w̃ᵢ(xᵢ − x̄_w)² / (n − 1)). Throws NeedTwoPoints for n < 2.
double weighted_sd(std::span<const double> values, std::span<const double> weights);

/// Unweighted linear-interpolation quantile (h = (n−1)p).
double quantile(std::span<const double> values, double prob);
std::vector<double> quantiles(std::span<const double> values, std::span<const double> probs);

// Dummy-design weighted least squares ------------------------------------------

/// "***" for p < 0.001, "**" for p < 0.01, "*" for p < 0.05, else "".
std::string_view significance_stars(double p_value) noexcept;

struct GroupEstimate {
    std::string group;
    double coefficient = 0.0; // weighted group mean of the response
    double se = 0.0;          // HC1
    double t = 0.0;
    double p_value = 1.0;
    std::string star;
    std::size_t n = 0; // observations with positive weight
    double weight_total = 0.0;
};

struct GroupFit {
    std::vector<GroupEstimate> groups; // level order
    std::size_t n_obs = 0;
    std::size_t residual_dof = 0;

    const GroupEstimate* find(std::string_view group) const;
};

/// Regression of y on a full set of group dummies (no intercept) with weights,
/// HC1 standard errors and Student-t p-values on n − k degrees of freedom.
///
/// Observations with zero weight carry no information and are left out of n.
/// `levels` fixes the group order; when empty, groups appear in first-seen order.
/// Throws LengthMismatch, EmptyInput, EmptyGroup, ZeroGroupWeight, DegenerateDof (n ≤ k).
GroupFit wls_group_fit(std::span<const double> y, std::span<const std::string> group,
                       std::span<const double> weights, std::span<const std::string> levels = {});

/// HC1 sandwich (X'WX)⁻¹ X'W diag(e²) W X (X'WX)⁻¹ · n/(n−k), group order as in wls_group_fit.
Eigen::MatrixXd hc1_covariance(std::span<const double> y, std::span<const std::string> group,
                               std::span<const double> weights, std::span<const std::string> levels = {});

/// CR1 sandwich with the given cluster labels, scaled by G/(G−1)·(n−1)/(n−k).
/// When the clusters are the groups themselves the meat vanishes identically:
/// every cluster score is a within-group weighted residual sum, which is zero.
Eigen::MatrixXd cr1_covariance(std::span<const double> y, std::span<const std::string> group,
                               std::span<const double> weights, std::span<const std::string> clusters,
                               std::span<const std::string> levels = {});

enum class FTestStatus { Computed, Insufficient };

struct FTestResult {
    double statistic = 0.0;
    double df_num = 0.0;
    double df_den = 0.0;
    double p_value = 1.0;
    FTestStatus status = FTestStatus::Insufficient;
};

/// Joint Wald test that every group coefficient is zero, using the CR1 covariance
/// clustered on `clusters`, reported as F = W / rank on (rank, G − 1) degrees of freedom.
///
/// Insufficient when any group has fewer than two observations or fewer than two
/// clusters exist. The covariance is pseudo-inverted on its numerically nonzero
/// eigenspace: a coefficient vector with a component outside that space yields an
/// infinite statistic (p = 0); an all-zero response yields statistic 0, p = 1.
FTestResult cluster_robust_f(std::span<const double> y, std::span<const std::string> group,
                             std::span<const double> weights, std::span<const std::string> clusters);

/// Clusters are the groups themselves.
FTestResult cluster_robust_f(std::span<const double> y, std::span<const std::string> group,
                             std::span<const double> weights);

// Distributions ----------------------------------------------------------------

struct StudentT {
    double df;
};

struct FDist {
    double df1;
    double df2;
};

/// Regularized incomplete beta I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided P(|T| ≥ |t|). Throws InvalidDof.
double tail_probability(StudentT dist, double t);
/// P(F ≥ f) for f ≥ 0. Throws InvalidDof, InvalidArgument for negative f.
double tail_probability(FDist dist, double f);

// Smoothing --------------------------------------------------------------------

struct LoessOptions {
    double span = 0.75;
    int degree = 2;
};

struct LoessFit {
    std::vector<double> fitted;          // at the input x, input order
    std::size_t degenerate_points = 0;   // neighborhoods with a single distinct x (weighted-mean fallback)
    std::size_t reduced_degree_points = 0;
};

/// Local polynomial regression without robustness iterations. Each target uses its
/// ⌈span·n⌉ nearest x-neighbours with tricube weights (1 − (d/h)³)³, h being the
/// distance to the farthest of them. Throws TooFewPoints (n < 3), InvalidSpan,
/// InvalidArgument (degree not 1 or 2), LengthMismatch.
LoessFit loess(std::span<const double> x, std::span<const double> y, const LoessOptions& options = {});

// Composite-index helpers ------------------------------------------------------

/// (vᵢ − center) / (max − min). Throws EmptyInput, ZeroRange.
std::vector<double> min_max_normalize(std::span<const double> values, double center);

/// (∏ cᵢ)^(1/n); zero if any component is zero. Throws EmptyInput, NegativeComponent.
double geometric_mean(std::span<const double> components);

/// Caps every value above the third-highest at that value. Throws NeedThreePoints.
std::vector<double> winsorize_upper_third(std::span<const double> values);

/// Mean of the k largest values. Throws TooFewPoints when n < k or k = 0.
double top_k_mean(std::span<const double> values, std::size_t k = 3);

} // namespace fsci::stats
