#include "nightbench/flow/flow.hpp"

#include <fmt/format.h>

#include "nightbench/core/error.hpp"
#include "nightbench/core/rng.hpp"

namespace nightbench::flow {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ValidationError(fmt::format("{}: shape mismatch ({}x{} vs {}x{})", what, a.rows(), a.cols(), b.rows(), b.cols()));
    }
}

void require_unit_time(double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError(fmt::format("flow time {} outside [0,1]", t));
}

Matrix gaussian(CounterRng& rng, int rows, int cols) {
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) m(r, c) = rng.normal();
    }
    return m;
}

}  // namespace

ContextEmbedding ContextEmbedding::from_prompt(std::string_view prompt, int dim) {
    if (dim < 1) throw ValidationError("context dimension must be >= 1");
    CounterRng rng(derive_seed(0, prompt), Stream::flow);
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = rng.normal();
    return {v / v.norm()};
}

Matrix interpolate(const Matrix& x0, const Matrix& x1, double t) {
    require_same_shape(x0, x1, "interpolate");
    require_unit_time(t);
    return t * x1 + (1.0 - t) * x0;
}

FlowState FlowState::at(Matrix x0, Matrix x1, double t) {
    Matrix xt = interpolate(x0, x1, t);
    return {std::move(x0), std::move(x1), t, std::move(xt)};
}

Matrix velocity_target(const Matrix& x0, const Matrix& x1) {
    require_same_shape(x0, x1, "velocity_target");
    return x1 - x0;
}

double fm_loss(const VelocityModel& model, const Matrix& x_con, const Matrix& x0, const Matrix& x1, const ContextEmbedding& context,
               double t) {
    const Matrix target = velocity_target(x0, x1);
    const Matrix v = model.evaluate(x_con, interpolate(x0, x1, t), context, t);
    require_same_shape(v, target, "fm_loss model output");
    if (target.size() == 0) return 0.0;
    return (v - target).squaredNorm() / static_cast<double>(target.size());
}

double fm_loss(const VelocityModel& model, const std::vector<FlowSample>& batch, const ContextEmbedding& context) {
    double total = 0.0;
    double count = 0.0;
    for (const auto& s : batch) {
        const auto n = static_cast<double>(s.x0.size());
        total += fm_loss(model, s.x_con, s.x0, s.x1, context, s.t) * n;
        count += n;
    }
    return count == 0.0 ? 0.0 : total / count;
}

Matrix euler_integrate(const VelocityModel& model, const Matrix& x_con, const Matrix& x0, const ContextEmbedding& context, int steps) {
    if (steps < 1) throw ValidationError("euler_integrate needs at least one step");
    const double dt = 1.0 / steps;
    Matrix x = x0;
    for (int k = 0; k < steps; ++k) {
        const Matrix v = model.evaluate(x_con, x, context, static_cast<double>(k) / steps);
        require_same_shape(v, x, "euler_integrate model output");
        x += dt * v;
    }
    return x;
}

std::vector<FlowSample> random_batch(std::uint64_t seed, int batch, int tokens, int dim) {
    if (batch < 0 || tokens < 1 || dim < 1) throw ValidationError("random_batch needs batch >= 0, tokens >= 1, dim >= 1");
    std::vector<FlowSample> out;
    out.reserve(static_cast<std::size_t>(batch));
    for (int i = 0; i < batch; ++i) {
        CounterRng rng(seed, Stream::flow, static_cast<std::uint64_t>(i));
        FlowSample s;
        s.x_con = gaussian(rng, tokens, dim);
        s.x0 = gaussian(rng, tokens, dim);
        s.x1 = gaussian(rng, tokens, dim);
        s.t = rng.uniform();
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace nightbench::flow
