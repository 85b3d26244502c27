#include "sdeim/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/SVD>

namespace sdeim
{

Vector SensorSet::select(const Vector &u) const
{
    Vector out(size());
    for (Index j = 0; j < size(); ++j) out[j] = u[indices[j]];
    return out;
}

Matrix SensorSet::select_rows(const Matrix &a) const
{
    Matrix out(size(), a.cols());
    for (Index j = 0; j < size(); ++j) out.row(j) = a.row(indices[j]);
    return out;
}

void SensorSet::validate(Index state_dim) const
{
    if (indices.empty() || size() > state_dim) {
        throw Error(ErrorKind::InvalidInput, "sensor count must lie in [1, N]");
    }
    std::vector<Index> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 0 || sorted.back() >= state_dim) {
        throw Error(ErrorKind::InvalidInput, "sensor index out of range");
    }
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw Error(ErrorKind::InvalidInput, "sensor indices must be distinct");
    }
}

double CpqrFactorization::r11_min_singular_value(Index r) const
{
    if (r < 1 || r > steps()) {
        throw Error(ErrorKind::InvalidInput, "R11 block size out of range");
    }
    const Matrix r11 = r_factor.topLeftCorner(r, r).triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<Matrix> svd(r11);
    return svd.singularValues()[r - 1];
}

CpqrFactorization cpqr(const Matrix &mat)
{
    if (!mat.allFinite()) {
        throw Error(ErrorKind::InvalidInput, "CPQR input contains non-finite values");
    }
    const Index m = mat.rows();
    const Index n = mat.cols();
    const Index steps = std::min(m, n);

    Matrix a = mat;
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});

    // Squared residual norms: `norms` is downdated each step, `exact` holds the
    // value at the last explicit recomputation.
    Vector norms = a.colwise().squaredNorm().transpose();
    Vector exact = norms;
    const double recompute_ratio = std::sqrt(std::numeric_limits<double>::epsilon());

    std::vector<Vector> reflectors;
    std::vector<double> taus;
    reflectors.reserve(static_cast<std::size_t>(steps));

    for (Index k = 0; k < steps; ++k) {
        Index pivot = k;
        for (Index j = k + 1; j < n; ++j) {
            if (norms[j] > norms[pivot] ||
                (norms[j] == norms[pivot] && perm[j] < perm[pivot])) {
                pivot = j;
            }
        }
        if (pivot != k) {
            a.col(k).swap(a.col(pivot));
            std::swap(norms[k], norms[pivot]);
            std::swap(exact[k], exact[pivot]);
            std::swap(perm[k], perm[pivot]);
        }

        // Householder reflector H = I - tau v v^T with v(0) = 1 mapping
        // a(k:m, k) onto beta e_1.
        const Index len = m - k;
        Vector v = a.col(k).tail(len);
        const double alpha = v[0];
        const double xnorm = v.tail(len - 1).norm();
        double tau = 0.0;
        if (xnorm != 0.0) {
            const double beta = -std::copysign(std::hypot(alpha, xnorm), alpha);
            tau = (beta - alpha) / beta;
            v.tail(len - 1) /= (alpha - beta);
            v[0] = 1.0;
            a(k, k) = beta;
            a.col(k).tail(len - 1).setZero();
            if (k + 1 < n) {
                auto trailing = a.block(k, k + 1, len, n - k - 1);
                const Eigen::RowVectorXd w = v.transpose() * trailing;
                trailing.noalias() -= tau * v * w;
            }
        } else {
            v.setZero();
            v[0] = 1.0;
        }
        reflectors.push_back(std::move(v));
        taus.push_back(tau);

        for (Index j = k + 1; j < n; ++j) {
            if (norms[j] == 0.0) continue;
            const double downdated = norms[j] - a(k, j) * a(k, j);
            if (k + 1 >= m) {
                norms[j] = 0.0;
            } else if (downdated <= recompute_ratio * exact[j]) {
                norms[j] = a.col(j).tail(m - k - 1).squaredNorm();
                exact[j] = norms[j];
            } else {
                norms[j] = downdated;
            }
        }
    }

    // Trailing columns carry no pivot information; order them canonically.
    if (steps < n) {
        std::vector<Index> order(static_cast<std::size_t>(n - steps));
        std::iota(order.begin(), order.end(), steps);
        std::sort(order.begin(), order.end(),
                  [&](Index x, Index y) { return perm[x] < perm[y]; });
        Matrix tail(m, n - steps);
        std::vector<Index> tail_perm;
        for (std::size_t t = 0; t < order.size(); ++t) {
            tail.col(static_cast<Index>(t)) = a.col(order[t]);
            tail_perm.push_back(perm[order[t]]);
        }
        a.rightCols(n - steps) = tail;
        std::copy(tail_perm.begin(), tail_perm.end(), perm.begin() + steps);
    }

    CpqrFactorization out;
    out.perm = std::move(perm);
    out.r_factor = a.triangularView<Eigen::Upper>();
    out.q_factor = Matrix::Identity(m, m);
    for (Index k = steps - 1; k >= 0; --k) {
        const Vector &v = reflectors[k];
        auto block = out.q_factor.bottomRows(m - k);
        const Eigen::RowVectorXd w = v.transpose() * block;
        block.noalias() -= taus[k] * v * w;
    }
    return out;
}

SensorSet select_sensors(const PodBasis &basis, Index r)
{
    const Index n = basis.state_dim();
    if (r < 1 || r > n) {
        std::ostringstream msg;
        msg << "sensor count " << r << " outside [1, " << n << "]";
        throw Error(ErrorKind::InvalidInput, msg.str());
    }
    const CpqrFactorization f = cpqr(basis.basis.transpose());
    SensorSet sensors;
    sensors.indices.assign(f.perm.begin(), f.perm.begin() + r);
    return sensors;
}

double estimation_bound(const PodBasis &basis, const SensorSet &sensors)
{
    sensors.validate(basis.state_dim());
    const Index r = sensors.size();
    const Index m = basis.modes();
    if (r > m) {
        std::ostringstream msg;
        msg << "S_r^T Phi_m cannot have full row rank with r = " << r << " > m = " << m;
        throw AssumptionViolation(m, r, msg.str());
    }
    const Matrix theta = sensors.select_rows(basis.basis);
    Eigen::JacobiSVD<Matrix> svd(theta);
    const double sigma_min = svd.singularValues()[r - 1];
    if (!(sigma_min >= 1e-10)) {
        std::ostringstream msg;
        msg << "S_r^T Phi_m is rank deficient (sigma_min = " << sigma_min << ", m = " << m
            << ", r = " << r << ")";
        throw AssumptionViolation(m, r, msg.str());
    }
    return 1.0 / sigma_min;
}

} // namespace sdeim
