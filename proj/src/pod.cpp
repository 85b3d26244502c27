#include "sdeim/pod.hpp"

#include <sstream>

#include <Eigen/SVD>

namespace sdeim
{

namespace
{

void check_dimension(const PodBasis &basis, const Vector &u)
{
    if (u.size() != basis.state_dim()) {
        std::ostringstream msg;
        msg << "state has dimension " << u.size() << ", basis expects "
            << basis.state_dim();
        throw Error(ErrorKind::InvalidInput, msg.str());
    }
}

} // namespace

PodBasis PodBasis::truncated(Index m) const
{
    if (m < 1 || m > modes()) {
        throw Error(ErrorKind::InvalidInput, "cannot truncate basis to that many modes");
    }
    PodBasis out;
    out.mean = mean;
    out.basis = basis.leftCols(m);
    out.singular_values = singular_values;
    return out;
}

CenteredSnapshots center_snapshots(const Matrix &snapshots)
{
    if (snapshots.cols() < 1) {
        throw Error(ErrorKind::InvalidInput, "no snapshots to center");
    }
    CenteredSnapshots out;
    out.mean = snapshots.rowwise().mean();
    out.centered = snapshots.colwise() - out.mean;
    return out;
}

CenteredSnapshots center_snapshots(const TrajectoryMatrix &snapshots)
{
    return center_snapshots(snapshots.states);
}

void fix_column_signs(Matrix &columns)
{
    for (Index j = 0; j < columns.cols(); ++j) {
        Index imax = 0;
        columns.col(j).cwiseAbs().maxCoeff(&imax);
        if (columns(imax, j) < 0.0) columns.col(j) *= -1.0;
    }
}

PodBasis compute_pod(const Matrix &centered, Index m, const Vector &mean)
{
    const Index n = centered.rows();
    const Index rank_cap = std::min(n, centered.cols());
    if (m < 1 || m > rank_cap) {
        std::ostringstream msg;
        msg << "requested " << m << " modes from a " << n << " x " << centered.cols()
            << " data matrix";
        throw Error(ErrorKind::InvalidInput, msg.str());
    }
    if (!centered.allFinite()) {
        throw Error(ErrorKind::InvalidInput, "snapshot data contains non-finite values");
    }
    if (mean.size() != 0 && mean.size() != n) {
        throw Error(ErrorKind::InvalidInput, "mean has wrong dimension");
    }

    Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinU);
    const Vector &sigma = svd.singularValues();

    const double threshold = 1e-12 * (sigma.size() > 0 ? sigma[0] : 0.0);
    if (!(sigma[m - 1] >= threshold) || sigma[0] == 0.0) {
        Index usable = 0;
        while (usable < sigma.size() && sigma[usable] > 0.0 && sigma[usable] >= threshold) {
            ++usable;
        }
        std::ostringstream msg;
        msg << "requested " << m << " modes but the data has numerical rank " << usable;
        throw RankDeficiencyError(usable, msg.str());
    }

    PodBasis pod;
    pod.mean = mean.size() == n ? mean : Vector::Zero(n);
    pod.basis = svd.matrixU().leftCols(m);
    fix_column_signs(pod.basis);
    pod.singular_values = sigma;
    return pod;
}

PodBasis build_pod(const TrajectoryMatrix &snapshots, Index m)
{
    const CenteredSnapshots data = center_snapshots(snapshots);
    return compute_pod(data.centered, m, data.mean);
}

Vector best_fit(const PodBasis &basis, const Vector &u)
{
    check_dimension(basis, u);
    return basis.basis * (basis.basis.transpose() * u);
}

double truncation_error(const PodBasis &basis, const Vector &u)
{
    return (best_fit(basis, u) - u).norm();
}

} // namespace sdeim
