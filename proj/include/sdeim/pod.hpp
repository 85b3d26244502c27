#pragma once

#include "sdeim/dynamics.hpp"

namespace sdeim
{

/// Mean-removed POD basis. The basis columns are orthonormal and sign-fixed so
/// that the entry of largest magnitude in each column is positive.
struct PodBasis
{
    Vector mean;            // N
    Matrix basis;           // N x m
    Vector singular_values; // min(N, M), non-increasing

    [[nodiscard]] Index state_dim() const noexcept { return basis.rows(); }
    [[nodiscard]] Index modes() const noexcept { return basis.cols(); }

    /// Basis restricted to its first m columns (the same SVD truncated further).
    [[nodiscard]] PodBasis truncated(Index m) const;
};

struct CenteredSnapshots
{
    Vector mean;
    Matrix centered;
};

CenteredSnapshots center_snapshots(const Matrix &snapshots);
CenteredSnapshots center_snapshots(const TrajectoryMatrix &snapshots);

/// Thin SVD of the centered data, truncated to m modes. Throws
/// RankDeficiencyError when sigma_m < 1e-12 sigma_1. `mean` is stored
/// verbatim (zeros when empty).
PodBasis compute_pod(const Matrix &centered, Index m, const Vector &mean = {});

/// center_snapshots followed by compute_pod.
PodBasis build_pod(const TrajectoryMatrix &snapshots, Index m);

/// Orthogonal projection Phi_m Phi_m^T u of a mean-removed state.
Vector best_fit(const PodBasis &basis, const Vector &u);

/// |Phi_m Phi_m^T u - u|.
double truncation_error(const PodBasis &basis, const Vector &u);

/// Flips each column so that its entry of largest magnitude is positive
/// (first such entry on ties).
void fix_column_signs(Matrix &columns);

} // namespace sdeim
