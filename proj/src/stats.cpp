#include "fsci/stats.hpp"

#include "fsci/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

namespace fsci::stats {

namespace {

void check_weights(std::span<const double> values, std::span<const double> weights) {
    if (values.size() != weights.size()) {
        throw Error(ErrorCode::LengthMismatch,
                    std::to_string(values.size()) + " values vs " + std::to_string(weights.size()) + " weights");
    }
    if (values.empty()) throw Error(ErrorCode::EmptyInput, "no values");
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::InvalidArgument, "weights must be finite and nonnegative");
    }
}

// Group membership of each observation with levels resolved once.
struct Design {
    std::vector<std::string> levels;
    std::vector<std::size_t> index; // per observation
    std::vector<double> weight_total;
    std::vector<double> coefficient;
    std::vector<std::size_t> count; // positive-weight observations per level
    std::vector<double> residual;
    std::size_t n = 0;
};

Design fit_design(std::span<const double> y, std::span<const std::string> group, std::span<const double> weights,
                  std::span<const std::string> levels) {
    if (y.size() != group.size()) throw Error(ErrorCode::LengthMismatch, "y and group lengths differ");
    check_weights(y, weights);

    Design d;
    std::unordered_map<std::string, std::size_t> lookup;
    for (const auto& level : levels) {
        if (lookup.emplace(level, d.levels.size()).second) d.levels.push_back(level);
    }
    const bool fixed_levels = !levels.empty();
    d.index.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        auto it = lookup.find(group[i]);
        if (it == lookup.end()) {
            if (fixed_levels) throw Error(ErrorCode::InvalidArgument, "group '" + group[i] + "' is not a listed level");
            it = lookup.emplace(group[i], d.levels.size()).first;
            d.levels.push_back(group[i]);
        }
        d.index[i] = it->second;
    }

    const std::size_t k = d.levels.size();
    d.weight_total.assign(k, 0.0);
    d.coefficient.assign(k, 0.0);
    d.count.assign(k, 0);
    std::vector<std::size_t> members(k, 0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const auto g = d.index[i];
        ++members[g];
        if (weights[i] > 0.0) {
            d.weight_total[g] += weights[i];
            d.coefficient[g] += weights[i] * y[i];
            ++d.count[g];
            ++d.n;
        }
    }
    for (std::size_t g = 0; g < k; ++g) {
        if (members[g] == 0) throw Error(ErrorCode::EmptyGroup, "group '" + d.levels[g] + "' has no observations");
        if (!(d.weight_total[g] > 0.0)) {
            throw Error(ErrorCode::ZeroGroupWeight, "group '" + d.levels[g] + "' has zero total weight");
        }
        d.coefficient[g] /= d.weight_total[g];
    }
    if (d.n <= k) {
        throw Error(ErrorCode::DegenerateDof,
                    std::to_string(d.n) + " observations for " + std::to_string(k) + " coefficients");
    }
    d.residual.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) d.residual[i] = y[i] - d.coefficient[d.index[i]];
    return d;
}

Eigen::MatrixXd hc1_from(const Design& d, std::span<const double> weights) {
    const auto k = d.levels.size();
    Eigen::VectorXd meat = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < d.index.size(); ++i) {
        const double s = weights[i] * d.residual[i];
        meat[static_cast<Eigen::Index>(d.index[i])] += s * s;
    }
    const double scale = static_cast<double>(d.n) / static_cast<double>(d.n - k);
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(meat.size(), meat.size());
    for (Eigen::Index g = 0; g < meat.size(); ++g) {
        const double bread = 1.0 / d.weight_total[static_cast<std::size_t>(g)];
        v(g, g) = bread * meat[g] * bread * scale;
    }
    return v;
}

struct ClusterMeat {
    Eigen::MatrixXd covariance;
    std::size_t clusters = 0;
};

ClusterMeat cr1_from(const Design& d, std::span<const double> weights, std::span<const std::string> clusters) {
    if (clusters.size() != d.index.size()) throw Error(ErrorCode::LengthMismatch, "cluster labels");
    const auto k = static_cast<Eigen::Index>(d.levels.size());
    std::map<std::string_view, Eigen::VectorXd> scores;
    for (std::size_t i = 0; i < d.index.size(); ++i) {
        if (!(weights[i] > 0.0)) continue;
        auto [it, fresh] = scores.try_emplace(clusters[i]);
        if (fresh) it->second = Eigen::VectorXd::Zero(k);
        it->second[static_cast<Eigen::Index>(d.index[i])] += weights[i] * d.residual[i];
    }
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
    for (const auto& [label, s] : scores) meat.noalias() += s * s.transpose();

    const auto G = static_cast<double>(scores.size());
    const auto n = static_cast<double>(d.n);
    const double scale = G > 1.0 ? G / (G - 1.0) * (n - 1.0) / (n - static_cast<double>(k)) : 0.0;
    Eigen::VectorXd bread(k);
    for (Eigen::Index g = 0; g < k; ++g) bread[g] = 1.0 / d.weight_total[static_cast<std::size_t>(g)];
    Eigen::MatrixXd v = bread.asDiagonal() * meat * bread.asDiagonal() * scale;
    return {v, scores.size()};
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

void check_dof(double df) {
    if (!(df > 0.0) || std::isnan(df)) throw Error(ErrorCode::InvalidDof, "degrees of freedom must be positive");
}

} // namespace

double weighted_mean(std::span<const double> values, std::span<const double> weights) {
    check_weights(values, weights);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        num += weights[i] * values[i];
        den += weights[i];
    }
    if (!(den > 0.0)) throw Error(ErrorCode::ZeroTotalWeight, "weights sum to zero");
    return num / den;
}

double weighted_sd(std::span<const double> values, std::span<const double> weights) {
    check_weights(values, weights);
    const auto n = values.size();
    if (n < 2) throw Error(ErrorCode::NeedTwoPoints, "weighted SD needs at least two values");
    const double mean = weighted_mean(values, weights);
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    const double rescale = static_cast<double>(n) / total;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dev = values[i] - mean;
        ss += weights[i] * rescale * dev * dev;
    }
    return std::sqrt(ss / static_cast<double>(n - 1));
}

double quantile(std::span<const double> values, double prob) {
    const double p[] = {prob};
    return quantiles(values, p).front();
}

std::vector<double> quantiles(std::span<const double> values, std::span<const double> probs) {
    if (values.empty()) throw Error(ErrorCode::EmptyInput, "quantiles of an empty list");
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::ProbOutOfRange, std::to_string(p));
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const auto last = static_cast<double>(sorted.size() - 1);
    std::vector<double> out;
    out.reserve(probs.size());
    for (double p : probs) {
        const double h = last * p;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const auto hi = static_cast<std::size_t>(std::ceil(h));
        const double frac = h - static_cast<double>(lo);
        out.push_back(lo == hi ? sorted[lo] : sorted[lo] + frac * (sorted[hi] - sorted[lo]));
    }
    return out;
}

std::string_view significance_stars(double p_value) noexcept {
    if (p_value < 0.001) return "***";
    if (p_value < 0.01) return "**";
    if (p_value < 0.05) return "*";
    return "";
}

const GroupEstimate* GroupFit::find(std::string_view group) const {
    for (const auto& g : groups) {
        if (g.group == group) return &g;
    }
    return nullptr;
}

GroupFit wls_group_fit(std::span<const double> y, std::span<const std::string> group,
                       std::span<const double> weights, std::span<const std::string> levels) {
    const auto d = fit_design(y, group, weights, levels);
    const auto v = hc1_from(d, weights);
    GroupFit fit;
    fit.n_obs = d.n;
    fit.residual_dof = d.n - d.levels.size();
    const StudentT dist{static_cast<double>(fit.residual_dof)};
    for (std::size_t g = 0; g < d.levels.size(); ++g) {
        GroupEstimate est;
        est.group = d.levels[g];
        est.coefficient = d.coefficient[g];
        est.se = std::sqrt(v(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(g)));
        if (est.se > 0.0) {
            est.t = est.coefficient / est.se;
        } else if (est.coefficient != 0.0) {
            est.t = std::copysign(std::numeric_limits<double>::infinity(), est.coefficient);
        }
        est.p_value = tail_probability(dist, est.t);
        est.star = std::string(significance_stars(est.p_value));
        est.n = d.count[g];
        est.weight_total = d.weight_total[g];
        fit.groups.push_back(std::move(est));
    }
    return fit;
}

Eigen::MatrixXd hc1_covariance(std::span<const double> y, std::span<const std::string> group,
                               std::span<const double> weights, std::span<const std::string> levels) {
    return hc1_from(fit_design(y, group, weights, levels), weights);
}

Eigen::MatrixXd cr1_covariance(std::span<const double> y, std::span<const std::string> group,
                               std::span<const double> weights, std::span<const std::string> clusters,
                               std::span<const std::string> levels) {
    return cr1_from(fit_design(y, group, weights, levels), weights, clusters).covariance;
}

FTestResult cluster_robust_f(std::span<const double> y, std::span<const std::string> group,
                             std::span<const double> weights, std::span<const std::string> clusters) {
    if (y.size() != group.size() || y.size() != weights.size()) {
        throw Error(ErrorCode::LengthMismatch, "y, group and weights lengths differ");
    }
    // Any group with fewer than two observations makes the test unavailable.
    std::map<std::string_view, std::size_t> members;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (weights[i] > 0.0) ++members[group[i]];
    }
    for (const auto& label : group) members.try_emplace(label, 0);
    FTestResult out;
    for (const auto& [label, count] : members) {
        if (count < 2) return out;
    }

    const auto d = fit_design(y, group, weights, {});
    const auto [v, n_clusters] = cr1_from(d, weights, clusters);
    if (n_clusters < 2) return out;

    const auto k = static_cast<Eigen::Index>(d.levels.size());
    Eigen::VectorXd beta(k);
    for (Eigen::Index g = 0; g < k; ++g) beta[g] = d.coefficient[static_cast<std::size_t>(g)];

    // Scale reference for a numerically-zero eigenvalue: the HC-type variance of
    // the same residuals, which vanishes only when every residual is zero.
    const auto hc = hc1_from(d, weights);
    const double reference = std::max(hc.diagonal().maxCoeff(), v.diagonal().maxCoeff());
    const double tol = reference * 1e-12;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(v);
    const auto& values = eig.eigenvalues();
    const auto& vectors = eig.eigenvectors();
    double wald = 0.0;
    Eigen::Index rank = 0;
    Eigen::VectorXd in_range = Eigen::VectorXd::Zero(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        if (values[j] > tol && values[j] > 0.0) {
            const double proj = vectors.col(j).dot(beta);
            wald += proj * proj / values[j];
            in_range += proj * vectors.col(j);
            ++rank;
        }
    }
    const double beta_norm = beta.norm();
    const double outside = (beta - in_range).norm();

    out.status = FTestStatus::Computed;
    out.df_den = static_cast<double>(n_clusters - 1);
    if (beta_norm > 0.0 && outside > 1e-8 * beta_norm) {
        out.df_num = static_cast<double>(rank > 0 ? rank : k);
        out.statistic = std::numeric_limits<double>::infinity();
        out.p_value = 0.0;
        return out;
    }
    if (rank == 0) {
        out.df_num = static_cast<double>(k);
        out.statistic = 0.0;
        out.p_value = 1.0;
        return out;
    }
    out.df_num = static_cast<double>(rank);
    out.statistic = wald / out.df_num;
    out.p_value = tail_probability(FDist{out.df_num, out.df_den}, out.statistic);
    return out;
}

FTestResult cluster_robust_f(std::span<const double> y, std::span<const std::string> group,
                             std::span<const double> weights) {
    return cluster_robust_f(y, group, weights, group);
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta parameters must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::InvalidArgument, "x must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double tail_probability(StudentT dist, double t) {
    check_dof(dist.df);
    if (std::isnan(t)) throw Error(ErrorCode::InvalidArgument, "t statistic is NaN");
    if (std::isinf(t)) return 0.0;
    if (t == 0.0) return 1.0;
    const double x = dist.df / (dist.df + t * t);
    return std::clamp(regularized_incomplete_beta(dist.df / 2.0, 0.5, x), 0.0, 1.0);
}

double tail_probability(FDist dist, double f) {
    check_dof(dist.df1);
    check_dof(dist.df2);
    if (std::isnan(f) || f < 0.0) throw Error(ErrorCode::InvalidArgument, "F statistic must be nonnegative");
    if (std::isinf(f)) return 0.0;
    if (f == 0.0) return 1.0;
    const double x = dist.df2 / (dist.df2 + dist.df1 * f);
    return std::clamp(regularized_incomplete_beta(dist.df2 / 2.0, dist.df1 / 2.0, x), 0.0, 1.0);
}

LoessFit loess(std::span<const double> x, std::span<const double> y, const LoessOptions& options) {
    if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "x and y lengths differ");
    const auto n = x.size();
    if (n < 3) throw Error(ErrorCode::TooFewPoints, "loess needs at least three points");
    if (!(options.span > 0.0 && options.span <= 1.0)) throw Error(ErrorCode::InvalidSpan, std::to_string(options.span));
    if (options.degree != 1 && options.degree != 2) throw Error(ErrorCode::InvalidArgument, "degree must be 1 or 2");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = x[order[i]];
        ys[i] = y[order[i]];
    }

    const auto q = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(options.span * static_cast<double>(n) - 1e-9)), 1, n);

    LoessFit fit;
    fit.fitted.assign(n, 0.0);
    std::vector<double> dist(n), scratch(n), w(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double x0 = xs[t];
        for (std::size_t j = 0; j < n; ++j) dist[j] = std::abs(xs[j] - x0);
        scratch = dist;
        std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(q - 1), scratch.end());
        const double h = scratch[q - 1];

        std::size_t active = 0, distinct = 0;
        double prev_x = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t j = 0; j < n; ++j) {
            if (h > 0.0) {
                const double r = dist[j] / h;
                w[j] = r < 1.0 ? std::pow(1.0 - r * r * r, 3) : 0.0;
            } else {
                w[j] = dist[j] == 0.0 ? 1.0 : 0.0;
            }
            if (w[j] > 0.0) {
                ++active;
                if (!(xs[j] == prev_x)) ++distinct; // xs ascending
                prev_x = xs[j];
            }
        }

        const int degree = std::min<int>(options.degree, static_cast<int>(distinct) - 1);
        if (degree < options.degree) ++fit.reduced_degree_points;
        if (degree <= 0) {
            ++fit.degenerate_points;
            double num = 0.0, den = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                num += w[j] * ys[j];
                den += w[j];
            }
            fit.fitted[order[t]] = num / den;
            continue;
        }

        const double scale = h > 0.0 ? h : 1.0;
        Eigen::MatrixXd a(static_cast<Eigen::Index>(active), degree + 1);
        Eigen::VectorXd b(static_cast<Eigen::Index>(active));
        Eigen::Index row = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (!(w[j] > 0.0)) continue;
            const double sw = std::sqrt(w[j]);
            const double u = (xs[j] - x0) / scale;
            double term = 1.0;
            for (int c = 0; c <= degree; ++c) {
                a(row, c) = sw * term;
                term *= u;
            }
            b[row] = sw * ys[j];
            ++row;
        }
        const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
        fit.fitted[order[t]] = coef[0];
    }
    return fit;
}

std::vector<double> min_max_normalize(std::span<const double> values, double center) {
    if (values.empty()) throw Error(ErrorCode::EmptyInput, "nothing to normalize");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double range = *hi - *lo;
    if (!(range > 0.0)) throw Error(ErrorCode::ZeroRange, "all values are equal");
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back((v - center) / range);
    return out;
}

double geometric_mean(std::span<const double> components) {
    if (components.empty()) throw Error(ErrorCode::EmptyInput, "no components");
    long double log_sum = 0.0L;
    bool has_zero = false;
    for (double c : components) {
        if (!(c >= 0.0)) throw Error(ErrorCode::NegativeComponent, std::to_string(c));
        if (c == 0.0) {
            has_zero = true;
        } else {
            log_sum += std::log(static_cast<long double>(c));
        }
    }
    if (has_zero) return 0.0;
    return static_cast<double>(std::exp(log_sum / static_cast<long double>(components.size())));
}

std::vector<double> winsorize_upper_third(std::span<const double> values) {
    if (values.size() < 3) throw Error(ErrorCode::NeedThreePoints, "winsorizing needs at least three values");
    std::vector<double> sorted(values.begin(), values.end());
    std::nth_element(sorted.begin(), sorted.begin() + 2, sorted.end(), std::greater<>());
    const double cap = sorted[2];
    std::vector<double> out(values.begin(), values.end());
    for (double& v : out) v = std::min(v, cap);
    return out;
}

double top_k_mean(std::span<const double> values, std::size_t k) {
    if (k == 0 || values.size() < k) {
        throw Error(ErrorCode::TooFewPoints, "need at least " + std::to_string(k) + " values");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += sorted[i];
    return sum / static_cast<double>(k);
}

} // namespace fsci::stats
