#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <string_view>
#include <vector>

namespace nightbench::flow {

/// Token matrices are (tokens x dim); one row per token.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Fixed prompt embedding fed to every velocity evaluation.
struct ContextEmbedding {
    Vector vector;

    /// Deterministic stand-in for an encoded text prompt: unit-norm vector
    /// seeded from the prompt bytes.
    static ContextEmbedding from_prompt(std::string_view prompt, int dim);
    static ContextEmbedding no_rain(int dim) { return from_prompt("No rain video", dim); }
};

/// v_theta(x_con, x_gen_t, c, t). The output has the shape of x_gen_t.
class VelocityModel {
public:
    virtual ~VelocityModel() = default;
    virtual Matrix evaluate(const Matrix& x_con, const Matrix& x_gen, const ContextEmbedding& context, double t) const = 0;
};

/// x_t = t * x1 + (1 - t) * x0, t in [0, 1].
Matrix interpolate(const Matrix& x0, const Matrix& x1, double t);

/// A point on the noise-to-data path.
struct FlowState {
    Matrix x0;
    Matrix x1;
    double t = 0.0;
    Matrix x_t;

    static FlowState at(Matrix x0, Matrix x1, double t);
};

/// d x_t / dt = x1 - x0 along the linear path; independent of t.
Matrix velocity_target(const Matrix& x0, const Matrix& x1);

/// Mean squared error between the model velocity at (x_con, x_t, c, t) and
/// the path velocity, averaged over every element.
double fm_loss(const VelocityModel& model, const Matrix& x_con, const Matrix& x0, const Matrix& x1, const ContextEmbedding& context,
               double t);

/// Forward Euler from t = 0 to 1 with `steps` uniform steps:
/// x <- x + v(x_con, x, c, k / steps) / steps.
Matrix euler_integrate(const VelocityModel& model, const Matrix& x_con, const Matrix& x0, const ContextEmbedding& context, int steps);

/// One training example: condition tokens, noise, clean latent and time.
struct FlowSample {
    Matrix x_con;
    Matrix x0;
    Matrix x1;
    double t = 0.0;
};

/// Mean of fm_loss over the batch, weighted by element count.
double fm_loss(const VelocityModel& model, const std::vector<FlowSample>& batch, const ContextEmbedding& context);

/// Random batch: x0 ~ N(0, I), x1 and x_con ~ N(0, I), t ~ U[0, 1].
std::vector<FlowSample> random_batch(std::uint64_t seed, int batch, int tokens, int dim);

/// Velocity equal to x1 - x0 for a fixed pair, the exact minimizer.
class OracleVelocity final : public VelocityModel {
public:
    OracleVelocity(Matrix x0, Matrix x1);
    Matrix evaluate(const Matrix&, const Matrix& x_gen, const ContextEmbedding&, double) const override;

private:
    Matrix velocity_;
};

class ZeroVelocity final : public VelocityModel {
public:
    Matrix evaluate(const Matrix&, const Matrix& x_gen, const ContextEmbedding&, double) const override;
};

/// Wraps an arbitrary callable.
class FunctionVelocity final : public VelocityModel {
public:
    using Fn = std::function<Matrix(const Matrix&, const Matrix&, const ContextEmbedding&, double)>;
    explicit FunctionVelocity(Fn fn) : fn_(std::move(fn)) {}
    Matrix evaluate(const Matrix& x_con, const Matrix& x_gen, const ContextEmbedding& c, double t) const override {
        return fn_(x_con, x_gen, c, t);
    }

private:
    Fn fn_;
};

/// Per-token affine velocity v = A x_t + b. Ignores condition and context, so
/// its loss is a convex quadratic in (A, b) with a closed-form gradient.
class LinearVelocity final : public VelocityModel {
public:
    LinearVelocity(Matrix a, Vector b);
    static LinearVelocity random(std::uint64_t seed, int dim, double scale = 0.1);

    Matrix evaluate(const Matrix&, const Matrix& x_gen, const ContextEmbedding&, double) const override;

    const Matrix& a() const { return a_; }
    const Vector& b() const { return b_; }
    /// Parameters flattened as [A row-major..., b...].
    Vector parameters() const;
    void set_parameters(const Vector& theta);

    struct Gradient {
        double loss = 0.0;
        Matrix d_a;
        Vector d_b;
        Vector flat() const;
    };
    Gradient loss_and_gradient(const std::vector<FlowSample>& batch) const;

private:
    Matrix a_;
    Vector b_;
};

/// Maximum relative error between the analytic gradient of the linear model
/// and central finite differences with step h. Entries where both are below
/// 1e-8 in magnitude count as agreeing.
double grad_check(const LinearVelocity& model, const std::vector<FlowSample>& batch, double h = 1e-5);

/// Plain gradient descent on the batch; returns the loss before each step and
/// after the last one (steps + 1 values).
std::vector<double> train_linear(LinearVelocity& model, const std::vector<FlowSample>& batch, double learning_rate, int steps);

}  // namespace nightbench::flow
