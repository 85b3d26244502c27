#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/SparseCore>

#include "sdeim/error.hpp"

namespace sdeim
{

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct ReservoirParams
{
    Index size = 1000; // K
    double spectral_radius = 0.9;
    double density = 0.02;
    double leak_rate = 0.5;
    double ridge_lambda = 1e-6;
    std::uint64_t seed = 0;
};

/// Echo-state network with fixed random weights and a ridge-trained readout.
struct ReservoirNet
{
    Matrix w_in;      // K x r
    SparseMatrix w_res; // K x K
    Vector bias;      // K
    std::optional<Matrix> w_out; // (m - r) x K once trained
    double leak_rate = 0.5;
    double spectral_radius = 0.9;
    double ridge_lambda = 1e-6;
    std::uint64_t seed = 0;

    [[nodiscard]] Index size() const noexcept { return w_in.rows(); }
    [[nodiscard]] Index input_dim() const noexcept { return w_in.cols(); }
    [[nodiscard]] bool trained() const noexcept { return w_out.has_value(); }
    [[nodiscard]] Index output_dim() const noexcept
    {
        return w_out ? w_out->rows() : 0;
    }
};

struct ReservoirState
{
    Vector values;
    Index step_count = 0;

    static ReservoirState zero(Index size)
    {
        return {Vector::Zero(size), 0};
    }
};

/// W_in, b and the nonzeros of W_R are iid U[-0.5, 0.5]; W_R is then scaled to
/// the requested spectral radius. Throws InvalidInput when
/// K < 10 max(r_in, r_in + outputs) or a parameter is out of range.
ReservoirNet init_reservoir(const ReservoirParams &params, Index inputs, Index outputs);

/// Growth-rate estimate of the spectral radius: ||W^k x||^(1/k) over the
/// second half of `iterations` normalised power steps from a seeded start.
double estimate_spectral_radius(const SparseMatrix &w, int iterations = 200,
                                double tol = 1e-6, std::uint64_t seed = 0);

/// r+ = (1 - a) r + a tanh(W_R r + W_in y + b).
ReservoirState update_state(const ReservoirNet &net, const ReservoirState &state,
                            const Vector &y);

/// Drives the reservoir from `initial` (zero by default) through the columns
/// of `inputs` (r x M) and returns the K x (M - washout) matrix of states that
/// follow the first `washout` updates. Column j is the state after consuming
/// input column washout + j.
Matrix collect_states(const ReservoirNet &net, const Matrix &inputs, Index washout,
                      const std::optional<Vector> &initial = std::nullopt);

/// W_out = Xi R^T (R R^T + lambda I)^{-1} via a Cholesky solve.
ReservoirNet train_output(ReservoirNet net, const Matrix &states, const Matrix &targets);

/// collect_states followed by train_output on the targets with the same
/// washout trimmed off.
ReservoirNet train_reservoir(ReservoirNet net, const Matrix &inputs, const Matrix &targets,
                             Index washout);

/// Readout of every state from a zero start, transient included. Column i is
/// W_out r after consuming input column i.
Matrix predict_stream(const ReservoirNet &net, const Matrix &inputs);

/// ||W R - Xi||_F^2 + lambda ||W||_F^2.
double ridge_objective(const Matrix &w, const Matrix &states, const Matrix &targets,
                       double lambda);

} // namespace sdeim
