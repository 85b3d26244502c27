#pragma once

#include <cstdint>

#include "sdeim/placement.hpp"

namespace sdeim
{

/// Everything needed to evaluate u ~ mean + Phi_m (Theta^+ y + Z xi).
struct EstimatorModel
{
    PodBasis basis;
    SensorSet sensors;
    Matrix theta;        // r x m, S_r^T Phi_m
    Matrix theta_pinv;   // m x r
    Matrix kernel_basis; // m x (m - r), orthonormal basis of N[Theta]

    [[nodiscard]] Index state_dim() const noexcept { return basis.state_dim(); }
    [[nodiscard]] Index modes() const noexcept { return basis.modes(); }
    [[nodiscard]] Index sensor_count() const noexcept { return sensors.size(); }
    [[nodiscard]] Index kernel_dim() const noexcept { return kernel_basis.cols(); }
};

/// Sensor readings of a mean-removed state, y = S_r^T u + eps.
struct Observation
{
    Vector values;
    double time = 0.0;
};

/// Throws Regime if r >= m and AssumptionViolation if sigma_min(Theta) < 1e-10.
EstimatorModel build_estimator(const PodBasis &basis, const SensorSet &sensors);

/// values_j = u_{i_j} + N(0, noise_scale_j^2), deterministic in seed.
Observation observe(const Vector &u, const SensorSet &sensors, const Vector &noise_scale,
                    std::uint64_t seed, double time = 0.0);

/// Observes every column of `states` with one noise stream seeded by `seed`.
/// Column j of the result is the observation of column j.
Matrix observe_series(const Matrix &states, const SensorSet &sensors,
                      const Vector &noise_scale, std::uint64_t seed);

/// mean + Phi_m Theta^+ y.
Vector qdeim_estimate(const EstimatorModel &model, const Observation &y);
Vector qdeim_estimate(const EstimatorModel &model, const Vector &y);

/// mean + Phi_m (Theta^+ y + Z xi).
Vector sdeim_estimate(const EstimatorModel &model, const Observation &y, const Vector &xi);
Vector sdeim_estimate(const EstimatorModel &model, const Vector &y, const Vector &xi);

/// xi_hat = Z^T Phi_m^T u for a mean-removed state; the optimal kernel vector
/// is Z xi_hat.
Vector optimal_kernel_coords(const EstimatorModel &model, const Vector &u_centered);

/// Column-wise optimal_kernel_coords.
Matrix optimal_kernel_series(const EstimatorModel &model, const Matrix &centered_states);

/// |Theta alpha - y|.
double observation_error(const EstimatorModel &model, const Vector &alpha, const Vector &y);

/// |u_est - u_true| / |u_true - mean|. Throws InvalidInput when the
/// denominator is below 1e-14.
double relative_error(const Vector &u_est, const Vector &u_true, const Vector &mean);

} // namespace sdeim
