#include "sdeim/estimator.hpp"

#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

namespace sdeim
{

namespace
{

void check_size(Index got, Index want, const char *what)
{
    if (got != want) {
        std::ostringstream msg;
        msg << what << " has dimension " << got << ", expected " << want;
        throw Error(ErrorKind::InvalidInput, msg.str());
    }
}

} // namespace

EstimatorModel build_estimator(const PodBasis &basis, const SensorSet &sensors)
{
    sensors.validate(basis.state_dim());
    const Index m = basis.modes();
    const Index r = sensors.size();
    if (r >= m) {
        std::ostringstream msg;
        msg << "S-DEIM needs fewer sensors than modes (r = " << r << ", m = " << m
            << "); use Q-DEIM with a zero kernel vector instead";
        throw Error(ErrorKind::Regime, msg.str());
    }

    EstimatorModel model;
    model.basis = basis;
    model.sensors = sensors;
    model.theta = sensors.select_rows(basis.basis);

    Eigen::JacobiSVD<Matrix> svd(model.theta, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector &sigma = svd.singularValues();
    const double sigma_max = sigma[0];
    const double sigma_min = sigma[r - 1];
    if (!(sigma_min >= 1e-10)) {
        std::ostringstream msg;
        msg << "S_r^T Phi_m does not have full row rank (m = " << m << ", r = " << r
            << ", sigma_min = " << sigma_min << ")";
        throw AssumptionViolation(m, r, msg.str());
    }

    if (sigma_min >= 1e-6 * sigma_max) {
        // Right inverse Theta^T (Theta Theta^T)^{-1}.
        const Matrix gram = model.theta * model.theta.transpose();
        Eigen::LLT<Matrix> llt(gram);
        if (llt.info() != Eigen::Success) {
            throw Error(ErrorKind::Numerical, "Theta Theta^T is not positive definite");
        }
        model.theta_pinv = llt.solve(model.theta).transpose();
    } else {
        const Vector inv = sigma.head(r).cwiseInverse();
        model.theta_pinv = svd.matrixV().leftCols(r) * inv.asDiagonal() *
                           svd.matrixU().transpose();
    }

    // sigma_min >= 1e-10 >= 1e-10 sigma_max, so the numerical rank is r and the
    // last m - r right singular vectors span the null space.
    model.kernel_basis = svd.matrixV().rightCols(m - r);
    fix_column_signs(model.kernel_basis);
    return model;
}

Observation observe(const Vector &u, const SensorSet &sensors, const Vector &noise_scale,
                    std::uint64_t seed, double time)
{
    Observation obs;
    obs.values = observe_series(u, sensors, noise_scale, seed).col(0);
    obs.time = time;
    return obs;
}

Matrix observe_series(const Matrix &states, const SensorSet &sensors,
                      const Vector &noise_scale, std::uint64_t seed)
{
    sensors.validate(states.rows());
    check_size(noise_scale.size(), sensors.size(), "noise scale");
    if ((noise_scale.array() < 0.0).any() || !noise_scale.allFinite()) {
        throw Error(ErrorKind::InvalidInput, "noise scales must be finite and non-negative");
    }
    Matrix y = sensors.select_rows(states);
    if ((noise_scale.array() == 0.0).all()) return y;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index j = 0; j < y.cols(); ++j) {
        for (Index i = 0; i < y.rows(); ++i) y(i, j) += noise_scale[i] * normal(rng);
    }
    return y;
}

Vector qdeim_estimate(const EstimatorModel &model, const Vector &y)
{
    check_size(y.size(), model.sensor_count(), "observation");
    return model.basis.mean + model.basis.basis * (model.theta_pinv * y);
}

Vector qdeim_estimate(const EstimatorModel &model, const Observation &y)
{
    return qdeim_estimate(model, y.values);
}

Vector sdeim_estimate(const EstimatorModel &model, const Vector &y, const Vector &xi)
{
    check_size(y.size(), model.sensor_count(), "observation");
    check_size(xi.size(), model.kernel_dim(), "kernel coordinates");
    const Vector alpha = model.theta_pinv * y + model.kernel_basis * xi;
    return model.basis.mean + model.basis.basis * alpha;
}

Vector sdeim_estimate(const EstimatorModel &model, const Observation &y, const Vector &xi)
{
    return sdeim_estimate(model, y.values, xi);
}

Vector optimal_kernel_coords(const EstimatorModel &model, const Vector &u_centered)
{
    check_size(u_centered.size(), model.state_dim(), "state");
    return model.kernel_basis.transpose() * (model.basis.basis.transpose() * u_centered);
}

Matrix optimal_kernel_series(const EstimatorModel &model, const Matrix &centered_states)
{
    check_size(centered_states.rows(), model.state_dim(), "state");
    return model.kernel_basis.transpose() *
           (model.basis.basis.transpose() * centered_states);
}

double observation_error(const EstimatorModel &model, const Vector &alpha, const Vector &y)
{
    check_size(alpha.size(), model.modes(), "coefficients");
    check_size(y.size(), model.sensor_count(), "observation");
    return (model.theta * alpha - y).norm();
}

double relative_error(const Vector &u_est, const Vector &u_true, const Vector &mean)
{
    check_size(u_est.size(), u_true.size(), "estimate");
    check_size(mean.size(), u_true.size(), "mean");
    const double denom = (u_true - mean).norm();
    if (!(denom >= 1e-14)) {
        throw Error(ErrorKind::InvalidInput,
                    "relative error undefined: true state equals the mean");
    }
    return (u_est - u_true).norm() / denom;
}

} // namespace sdeim
