#pragma once

#include "fsci/error.hpp"
#include "fsci/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace fsci::test {

// Small seeded generator for hand-rolled property tests.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(integer(0, static_cast<int>(n) - 1)); }
    bool chance(double p) { return uniform(0.0, 1.0) < p; }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

inline IndicatorMeta indicator(std::string id, Direction dir = Direction::HigherBetter,
                               WeightKey key = WeightKey::None) {
    IndicatorMeta m;
    m.id = std::move(id);
    m.name = m.id;
    m.unit = "unit";
    m.direction = dir;
    m.weight_key = key;
    return m;
}

inline CountryMeta country(std::string iso, std::string region = "Oceania", IncomeGroup income = IncomeGroup::Low,
                           bool member = true) {
    return CountryMeta{iso, iso, std::move(region), income, member};
}

inline std::shared_ptr<const IndicatorRegistry> registry_of(const std::vector<IndicatorMeta>& items) {
    auto r = std::make_shared<IndicatorRegistry>();
    for (const auto& m : items) r->add(m);
    return r;
}

inline std::shared_ptr<const CountryTable> countries_of(const std::vector<CountryMeta>& items) {
    auto c = std::make_shared<CountryTable>();
    for (const auto& m : items) c->add(m);
    return c;
}

inline bool close_rel(double a, double b, double rel, double abs_floor = 0.0) {
    return std::abs(a - b) <= std::max(abs_floor, rel * std::max(std::abs(a), std::abs(b)));
}

/// Label code used by the random panel generators: "G0", "G1", ...
inline std::string label(std::size_t i, char prefix = 'G') { return std::string(1, prefix) + std::to_string(i); }

// Dense explicit-matrix oracles ------------------------------------------------

struct DenseFit {
    Eigen::VectorXd beta;
    Eigen::MatrixXd hc1;
    Eigen::MatrixXd cr1;
};

/// Builds X (one-hot over `levels`), W and the sandwich estimators the long way.
inline DenseFit dense_oracle(const std::vector<double>& y, const std::vector<std::string>& group,
                             const std::vector<double>& w, const std::vector<std::string>& levels,
                             const std::vector<std::string>& clusters) {
    const auto n = static_cast<Eigen::Index>(y.size());
    const auto k = static_cast<Eigen::Index>(levels.size());
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, k);
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd Y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto col = std::find(levels.begin(), levels.end(), group[static_cast<std::size_t>(i)]) - levels.begin();
        X(i, col) = 1.0;
        W(i, i) = w[static_cast<std::size_t>(i)];
        Y[i] = y[static_cast<std::size_t>(i)];
    }
    const Eigen::MatrixXd xtwx = X.transpose() * W * X;
    const Eigen::MatrixXd bread = xtwx.inverse();
    DenseFit out;
    out.beta = bread * X.transpose() * W * Y;
    const Eigen::VectorXd e = Y - X * out.beta;

    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) omega(i, i) = e[i] * e[i];
    const double nn = static_cast<double>(n), kk = static_cast<double>(k);
    out.hc1 = bread * (X.transpose() * W * omega * W * X) * bread * (nn / (nn - kk));

    std::vector<std::string> cl = clusters;
    std::sort(cl.begin(), cl.end());
    cl.erase(std::unique(cl.begin(), cl.end()), cl.end());
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
    for (const auto& c : cl) {
        Eigen::VectorXd score = Eigen::VectorXd::Zero(k);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (clusters[static_cast<std::size_t>(i)] == c) score += X.row(i).transpose() * W(i, i) * e[i];
        }
        meat += score * score.transpose();
    }
    const double g = static_cast<double>(cl.size());
    out.cr1 = bread * meat * bread * (g / (g - 1.0)) * ((nn - 1.0) / (nn - kk));
    return out;
}

/// Local polynomial fit at each sample point from explicit weighted normal
/// equations, solved by Gaussian elimination with partial pivoting.
inline std::vector<double> loess_oracle(const std::vector<double>& x, const std::vector<double>& y, double span,
                                        int degree) {
    const std::size_t n = x.size();
    const auto q = static_cast<std::size_t>(std::ceil(span * static_cast<double>(n) - 1e-9));
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        std::vector<double> d(n);
        for (std::size_t j = 0; j < n; ++j) d[j] = std::abs(x[j] - x[t]);
        std::vector<double> sorted = d;
        std::sort(sorted.begin(), sorted.end());
        const double h = sorted[std::max<std::size_t>(q, 1) - 1];

        std::vector<double> w(n);
        std::vector<double> used_x;
        for (std::size_t j = 0; j < n; ++j) {
            w[j] = h > 0 ? (d[j] < h ? std::pow(1 - std::pow(d[j] / h, 3), 3) : 0.0) : (d[j] == 0 ? 1.0 : 0.0);
            if (w[j] > 0 && std::find(used_x.begin(), used_x.end(), x[j]) == used_x.end()) used_x.push_back(x[j]);
        }
        const int p = std::min<int>(degree, static_cast<int>(used_x.size()) - 1) + 1;
        const double s = h > 0 ? h : 1.0;
        // Normal equations M c = v with basis 1, u, u² where u = (x − x_t)/s.
        double m[3][4] = {};
        for (std::size_t j = 0; j < n; ++j) {
            if (w[j] == 0) continue;
            const double u = (x[j] - x[t]) / s;
            const double basis[3] = {1.0, u, u * u};
            for (int r = 0; r < p; ++r) {
                for (int c = 0; c < p; ++c) m[r][c] += w[j] * basis[r] * basis[c];
                m[r][3] += w[j] * basis[r] * y[j];
            }
        }
        for (int col = 0; col < p; ++col) {
            int piv = col;
            for (int r = col + 1; r < p; ++r) {
                if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
            }
            for (int c = 0; c < 4; ++c) std::swap(m[col][c], m[piv][c]);
            for (int r = col + 1; r < p; ++r) {
                const double f = m[r][col] / m[col][col];
                for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
            }
        }
        double coef[3] = {};
        for (int r = p - 1; r >= 0; --r) {
            double acc = m[r][3];
            for (int c = r + 1; c < p; ++c) acc -= m[r][c] * coef[c];
            coef[r] = acc / m[r][r];
        }
        out[t] = coef[0];
    }
    return out;
}

} // namespace fsci::test
