#include "symbio/baselines.hpp"

#include "symbio/error.hpp"

#include <cmath>

namespace symbio {

namespace {

// log(1 + e^x) without overflow.
auto softplus(double x) -> double { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

auto logistic(double z) -> double
{
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

auto to_vector(const Labels& labels) -> Eigen::VectorXd
{
    Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) y[static_cast<Eigen::Index>(i)] = labels[i];
    return y;
}

} // namespace

auto Standardizer::fit(const Eigen::MatrixXd& x) -> Standardizer
{
    Standardizer s;
    s.mean = x.colwise().mean().transpose();
    s.scale.resize(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double var = (x.col(j).array() - s.mean[j]).square().mean();
        s.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return s;
}

auto Standardizer::apply(const Eigen::MatrixXd& x) const -> Eigen::MatrixXd
{
    return (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

auto logreg_loss(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double b, double l2)
    -> double
{
    const Eigen::VectorXd logits = (z * w).array() + b;
    double total = 0.0;
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
        // -[y log p + (1-y) log(1-p)] with log p = -softplus(-t), log(1-p) = -softplus(t).
        total += y[i] * softplus(-logits[i]) + (1.0 - y[i]) * softplus(logits[i]);
    }
    return total / static_cast<double>(logits.size()) + 0.5 * l2 * w.squaredNorm();
}

auto logreg_gradient(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double b,
                     double l2) -> LogRegGradient
{
    const Eigen::VectorXd logits = (z * w).array() + b;
    const Eigen::VectorXd residual = logits.unaryExpr([](double t) { return logistic(t); }) - y;
    const double n = static_cast<double>(y.size());
    return {z.transpose() * residual / n + l2 * w, residual.sum() / n};
}

auto fit_logreg(const AbundanceTable& table, const Labels& labels, const LogRegConfig& cfg) -> LogisticModel
{
    if (labels.size() != table.rows()) throw DimensionError("logistic regression: label count mismatch");
    const auto counts = class_counts(labels);
    if (counts[0] == 0 || counts[1] == 0) throw FitError("logistic regression needs both classes");
    if (!(cfg.learning_rate > 0.0)) throw ConfigError("logistic regression learning_rate must be > 0");

    LogisticModel m;
    m.standardizer = Standardizer::fit(table.values());
    const Eigen::MatrixXd z = m.standardizer.apply(table.values());
    const Eigen::VectorXd y = to_vector(labels);
    m.weights = Eigen::VectorXd::Zero(z.cols());
    const double prior = static_cast<double>(counts[1]) / static_cast<double>(labels.size());
    m.bias = std::log(prior / (1.0 - prior));

    for (m.iterations = 0; m.iterations < cfg.max_iterations; ++m.iterations) {
        const auto g = logreg_gradient(z, y, m.weights, m.bias, cfg.l2);
        const double gmax = std::max(g.weights.size() ? g.weights.cwiseAbs().maxCoeff() : 0.0, std::abs(g.bias));
        if (gmax < cfg.gradient_tolerance) break;
        m.weights -= cfg.learning_rate * g.weights;
        m.bias -= cfg.learning_rate * g.bias;
    }
    return m;
}

auto LogisticModel::decision(const AbundanceTable& table) const -> Eigen::VectorXd
{
    return (standardizer.apply(table.values()) * weights).array() + bias;
}

auto LogisticModel::predict_proba(const AbundanceTable& table) const -> Eigen::VectorXd
{
    return decision(table).unaryExpr([](double t) { return logistic(t); });
}

auto LogisticModel::predict(const AbundanceTable& table) const -> Labels
{
    const auto p = predict_proba(table);
    Labels out(static_cast<std::size_t>(p.size()));
    for (Eigen::Index i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(i)] = p[i] >= 0.5 ? 1 : 0;
    return out;
}

} // namespace symbio
