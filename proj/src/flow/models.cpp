#include <algorithm>
#include <cmath>

#include "nightbench/core/error.hpp"
#include "nightbench/core/rng.hpp"
#include "nightbench/flow/flow.hpp"

namespace nightbench::flow {

OracleVelocity::OracleVelocity(Matrix x0, Matrix x1) : velocity_(velocity_target(x0, x1)) {}

Matrix OracleVelocity::evaluate(const Matrix&, const Matrix& x_gen, const ContextEmbedding&, double) const {
    if (x_gen.rows() != velocity_.rows() || x_gen.cols() != velocity_.cols()) throw ValidationError("oracle velocity: shape mismatch");
    return velocity_;
}

Matrix ZeroVelocity::evaluate(const Matrix&, const Matrix& x_gen, const ContextEmbedding&, double) const {
    return Matrix::Zero(x_gen.rows(), x_gen.cols());
}

LinearVelocity::LinearVelocity(Matrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.rows() != a_.cols() || a_.rows() != b_.size() || a_.rows() < 1) {
        throw ValidationError("linear velocity needs square A (d x d) and b of length d");
    }
}

LinearVelocity LinearVelocity::random(std::uint64_t seed, int dim, double scale) {
    if (dim < 1) throw ValidationError("linear velocity dimension must be >= 1");
    CounterRng rng(seed, Stream::flow, 0, 1);
    Matrix a(dim, dim);
    Vector b(dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) a(r, c) = scale * rng.normal();
    }
    for (int r = 0; r < dim; ++r) b(r) = scale * rng.normal();
    return {std::move(a), std::move(b)};
}

Matrix LinearVelocity::evaluate(const Matrix&, const Matrix& x_gen, const ContextEmbedding&, double) const {
    if (x_gen.cols() != a_.cols()) throw ValidationError("linear velocity: token dimension mismatch");
    Matrix v = x_gen * a_.transpose();
    v.rowwise() += b_.transpose();
    return v;
}

Vector LinearVelocity::parameters() const {
    const Eigen::Index d = b_.size();
    Vector theta(d * d + d);
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) theta(r * d + c) = a_(r, c);
    }
    theta.tail(d) = b_;
    return theta;
}

void LinearVelocity::set_parameters(const Vector& theta) {
    const Eigen::Index d = b_.size();
    if (theta.size() != d * d + d) throw ValidationError("linear velocity: parameter vector has wrong length");
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) a_(r, c) = theta(r * d + c);
    }
    b_ = theta.tail(d);
}

Vector LinearVelocity::Gradient::flat() const {
    const Eigen::Index d = d_b.size();
    Vector g(d * d + d);
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) g(r * d + c) = d_a(r, c);
    }
    g.tail(d) = d_b;
    return g;
}

LinearVelocity::Gradient LinearVelocity::loss_and_gradient(const std::vector<FlowSample>& batch) const {
    const Eigen::Index d = b_.size();
    Gradient g{0.0, Matrix::Zero(d, d), Vector::Zero(d)};
    double count = 0.0;
    const ContextEmbedding none{Vector::Zero(1)};
    for (const auto& s : batch) {
        const Matrix xt = interpolate(s.x0, s.x1, s.t);
        const Matrix residual = evaluate(s.x_con, xt, none, s.t) - velocity_target(s.x0, s.x1);
        g.loss += residual.squaredNorm();
        g.d_a += residual.transpose() * xt;
        g.d_b += residual.colwise().sum().transpose();
        count += static_cast<double>(residual.size());
    }
    if (count > 0.0) {
        g.loss /= count;
        g.d_a *= 2.0 / count;
        g.d_b *= 2.0 / count;
    }
    return g;
}

double grad_check(const LinearVelocity& model, const std::vector<FlowSample>& batch, double h) {
    if (!(h > 0.0)) throw ValidationError("grad_check step must be positive");
    const Vector analytic = model.loss_and_gradient(batch).flat();
    const Vector theta = model.parameters();
    LinearVelocity probe = model;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        Vector plus = theta;
        Vector minus = theta;
        plus(i) += h;
        minus(i) -= h;
        probe.set_parameters(plus);
        const double lp = probe.loss_and_gradient(batch).loss;
        probe.set_parameters(minus);
        const double lm = probe.loss_and_gradient(batch).loss;
        const double numeric = (lp - lm) / (2.0 * h);
        const double scale = std::max({std::abs(analytic(i)), std::abs(numeric), 1e-8});
        worst = std::max(worst, std::abs(analytic(i) - numeric) / scale);
    }
    return worst;
}

std::vector<double> train_linear(LinearVelocity& model, const std::vector<FlowSample>& batch, double learning_rate, int steps) {
    if (steps < 0) throw ValidationError("train_linear needs steps >= 0");
    if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(steps) + 1);
    for (int k = 0; k < steps; ++k) {
        const auto g = model.loss_and_gradient(batch);
        history.push_back(g.loss);
        model.set_parameters(model.parameters() - learning_rate * g.flat());
    }
    history.push_back(model.loss_and_gradient(batch).loss);
    return history;
}

}  // namespace nightbench::flow
