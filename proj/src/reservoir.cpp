#include "sdeim/reservoir.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Cholesky>

namespace sdeim
{

namespace
{

// The growth-rate estimate is good to ~1e-5 relative; scale slightly under the
// target so the true radius stays below it.
constexpr double kRadiusMargin = 1e-4;
constexpr int kRadiusIterations = 2000;

void check_input(const ReservoirNet &net, const Vector &y)
{
    if (y.size() != net.input_dim()) {
        std::ostringstream msg;
        msg << "reservoir input has dimension " << y.size() << ", expected "
            << net.input_dim();
        throw Error(ErrorKind::InvalidInput, msg.str());
    }
    if (!y.allFinite()) {
        throw Error(ErrorKind::InvalidInput, "reservoir input contains non-finite values");
    }
}

// Leaky-tanh update in place; `pre` is scratch space of length K.
void advance(const ReservoirNet &net, Vector &r, const Vector &y, Vector &pre)
{
    pre.noalias() = net.w_res * r;
    pre.noalias() += net.w_in * y;
    pre += net.bias;
    r = (1.0 - net.leak_rate) * r + net.leak_rate * pre.array().tanh().matrix();
}

} // namespace

double estimate_spectral_radius(const SparseMatrix &w, int iterations, double tol,
                                std::uint64_t seed)
{
    const Index k = w.rows();
    if (k == 0 || w.cols() != k) {
        throw Error(ErrorKind::InvalidInput, "spectral radius needs a square matrix");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-0.5, 0.5);
    Vector x(k);
    for (Index i = 0; i < k; ++i) x[i] = unit(rng);
    x.normalize();

    // Average log growth over the second half of the run; stop once two
    // successive windows agree to `tol`.
    iterations = std::max(iterations, 2);
    double previous = -1.0;
    Vector y(k);
    for (int round = 0; round < 8; ++round) {
        double log_sum = 0.0;
        int counted = 0;
        for (int it = 0; it < iterations; ++it) {
            y.noalias() = w * x;
            const double norm = y.norm();
            if (norm == 0.0 || !std::isfinite(norm)) return norm == 0.0 ? 0.0 : norm;
            if (it >= iterations / 2) {
                log_sum += std::log(norm);
                ++counted;
            }
            x = y / norm;
        }
        const double estimate = std::exp(log_sum / counted);
        if (previous > 0.0 && std::abs(estimate - previous) <= tol * estimate) {
            return estimate;
        }
        previous = estimate;
    }
    return previous;
}

ReservoirNet init_reservoir(const ReservoirParams &params, Index inputs, Index outputs)
{
    if (inputs < 1 || outputs < 0) {
        throw Error(ErrorKind::InvalidInput, "reservoir needs at least one input");
    }
    if (params.size < 10 * std::max(inputs, inputs + outputs)) {
        std::ostringstream msg;
        msg << "reservoir size " << params.size << " is below 10 x max(r, m) = "
            << 10 * (inputs + outputs);
        throw Error(ErrorKind::InvalidInput, msg.str());
    }
    if (!(params.spectral_radius > 0.0 && params.spectral_radius < 1.0)) {
        throw Error(ErrorKind::InvalidInput, "spectral radius must lie in (0, 1)");
    }
    if (!(params.density > 0.0 && params.density <= 1.0)) {
        throw Error(ErrorKind::InvalidInput, "density must lie in (0, 1]");
    }
    if (!(params.leak_rate > 0.0 && params.leak_rate <= 1.0)) {
        throw Error(ErrorKind::InvalidInput, "leak rate must lie in (0, 1]");
    }
    if (!(params.ridge_lambda > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "ridge lambda must be positive");
    }

    const Index k = params.size;
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> weight(-0.5, 0.5);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    ReservoirNet net;
    net.leak_rate = params.leak_rate;
    net.spectral_radius = params.spectral_radius;
    net.ridge_lambda = params.ridge_lambda;
    net.seed = params.seed;

    net.w_in.resize(k, inputs);
    for (Index i = 0; i < k; ++i) {
        for (Index j = 0; j < inputs; ++j) net.w_in(i, j) = weight(rng);
    }
    net.bias.resize(k);
    for (Index i = 0; i < k; ++i) net.bias[i] = weight(rng);

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(params.density * static_cast<double>(k * k) * 1.1));
    for (Index i = 0; i < k; ++i) {
        for (Index j = 0; j < k; ++j) {
            if (coin(rng) < params.density) entries.emplace_back(i, j, weight(rng));
        }
    }
    net.w_res.resize(k, k);
    net.w_res.setFromTriplets(entries.begin(), entries.end());

    const double measured = estimate_spectral_radius(net.w_res, kRadiusIterations, 1e-6,
                                                     params.seed ^ 0x9e3779b97f4a7c15ULL);
    if (!(measured > 0.0) || !std::isfinite(measured)) {
        throw Error(ErrorKind::InvalidInput,
                    "reservoir matrix has zero spectral radius; increase density");
    }
    net.w_res *= params.spectral_radius * (1.0 - kRadiusMargin) / measured;
    return net;
}

ReservoirState update_state(const ReservoirNet &net, const ReservoirState &state,
                            const Vector &y)
{
    check_input(net, y);
    if (state.values.size() != net.size() || !state.values.allFinite()) {
        throw Error(ErrorKind::InvalidInput, "reservoir state has wrong size or is non-finite");
    }
    ReservoirState next{state.values, state.step_count + 1};
    Vector pre(net.size());
    advance(net, next.values, y, pre);
    return next;
}

Matrix collect_states(const ReservoirNet &net, const Matrix &inputs, Index washout,
                      const std::optional<Vector> &initial)
{
    const Index steps = inputs.cols();
    if (washout < 0 || washout >= steps) {
        throw Error(ErrorKind::InvalidInput, "washout must lie in [0, M)");
    }
    if (inputs.rows() != net.input_dim()) {
        throw Error(ErrorKind::InvalidInput, "input series has wrong row count");
    }
    if (!inputs.allFinite()) {
        throw Error(ErrorKind::InvalidInput, "input series contains non-finite values");
    }
    Vector r = initial ? *initial : Vector::Zero(net.size());
    if (r.size() != net.size()) {
        throw Error(ErrorKind::InvalidInput, "initial reservoir state has wrong size");
    }

    Matrix states(net.size(), steps - washout);
    Vector pre(net.size());
    for (Index i = 0; i < steps; ++i) {
        advance(net, r, inputs.col(i), pre);
        if (i >= washout) states.col(i - washout) = r;
    }
    return states;
}

namespace
{

void check_ridge_lambda(const ReservoirNet &net)
{
    if (!(net.ridge_lambda > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "ridge lambda must be positive");
    }
}

// gram holds R R^T in its lower triangle, without the ridge term.
ReservoirNet solve_ridge(ReservoirNet net, Matrix gram, const Matrix &rhs)
{
    gram.diagonal().array() += net.ridge_lambda;
    Eigen::LLT<Matrix, Eigen::Lower> llt(gram);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorKind::Numerical, "ridge normal matrix is not positive definite");
    }
    net.w_out = llt.solve(rhs).transpose();
    return net;
}

constexpr Index kStateBlock = 1024;

} // namespace

ReservoirNet train_output(ReservoirNet net, const Matrix &states, const Matrix &targets)
{
    if (states.cols() < 1 || states.cols() != targets.cols()) {
        throw Error(ErrorKind::InvalidInput, "states and targets need the same positive column count");
    }
    if (states.rows() != net.size()) {
        throw Error(ErrorKind::InvalidInput, "state matrix has wrong row count");
    }
    check_ridge_lambda(net);

    const Index k = net.size();
    Matrix gram = Matrix::Zero(k, k);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(states);
    const Matrix rhs = states * targets.transpose();
    return solve_ridge(std::move(net), std::move(gram), rhs);
}

ReservoirNet train_reservoir(ReservoirNet net, const Matrix &inputs, const Matrix &targets,
                             Index washout)
{
    if (targets.cols() != inputs.cols()) {
        throw Error(ErrorKind::InvalidInput, "inputs and targets must have equal length");
    }
    if (washout < 0 || washout >= inputs.cols()) {
        throw Error(ErrorKind::InvalidInput, "washout must lie in [0, M)");
    }
    if (inputs.rows() != net.input_dim()) {
        throw Error(ErrorKind::InvalidInput, "input series has wrong row count");
    }
    if (!inputs.allFinite() || !targets.allFinite()) {
        throw Error(ErrorKind::InvalidInput, "training data contains non-finite values");
    }
    check_ridge_lambda(net);

    // Same normal equations as train_output, accumulated block by block so
    // that long trajectories never hold the full K x M state matrix.
    const Index k = net.size();
    Matrix gram = Matrix::Zero(k, k);
    Matrix rhs = Matrix::Zero(k, targets.rows());
    Matrix block(k, kStateBlock);
    Vector r = Vector::Zero(k);
    Vector pre(k);
    Index filled = 0;
    auto flush = [&](Index end) {
        const auto states = block.leftCols(filled);
        gram.selfadjointView<Eigen::Lower>().rankUpdate(states);
        rhs.noalias() += states * targets.middleCols(end - filled, filled).transpose();
        filled = 0;
    };
    for (Index i = 0; i < inputs.cols(); ++i) {
        advance(net, r, inputs.col(i), pre);
        if (i < washout) continue;
        block.col(filled++) = r;
        if (filled == kStateBlock) flush(i + 1);
    }
    if (filled > 0) flush(inputs.cols());
    return solve_ridge(std::move(net), std::move(gram), rhs);
}

Matrix predict_stream(const ReservoirNet &net, const Matrix &inputs)
{
    if (!net.trained()) {
        throw Error(ErrorKind::State, "reservoir readout has not been trained");
    }
    if (inputs.rows() != net.input_dim()) {
        throw Error(ErrorKind::InvalidInput, "input series has wrong row count");
    }
    if (!inputs.allFinite()) {
        throw Error(ErrorKind::InvalidInput, "input series contains non-finite values");
    }
    Matrix out(net.output_dim(), inputs.cols());
    Vector r = Vector::Zero(net.size());
    Vector pre(net.size());
    for (Index i = 0; i < inputs.cols(); ++i) {
        advance(net, r, inputs.col(i), pre);
        out.col(i).noalias() = *net.w_out * r;
    }
    return out;
}

double ridge_objective(const Matrix &w, const Matrix &states, const Matrix &targets,
                       double lambda)
{
    return (w * states - targets).squaredNorm() + lambda * w.squaredNorm();
}

} // namespace sdeim
