#pragma once

#include <vector>

#include "sdeim/pod.hpp"

namespace sdeim
{

/// Ordered, distinct, zero-based state indices. Entry j is the j-th CPQR
/// pivot; the selection matrix S_r is [e_{i_0} | ... | e_{i_{r-1}}].
struct SensorSet
{
    std::vector<Index> indices;

    [[nodiscard]] Index size() const noexcept
    {
        return static_cast<Index>(indices.size());
    }

    /// S_r^T u.
    [[nodiscard]] Vector select(const Vector &u) const;
    /// S_r^T A (rows of A at the sensors).
    [[nodiscard]] Matrix select_rows(const Matrix &a) const;

    /// Throws InvalidInput unless indices are distinct and lie in [0, n).
    void validate(Index state_dim) const;
};

/// A Pi = Q R with Businger-Golub column pivoting.
struct CpqrFactorization
{
    std::vector<Index> perm; // column k of A Pi is column perm[k] of A
    Matrix q_factor;         // m x m orthogonal
    Matrix r_factor;         // m x N upper trapezoidal

    /// Number of Householder steps taken, min(m, N).
    [[nodiscard]] Index steps() const noexcept
    {
        return std::min(r_factor.rows(), r_factor.cols());
    }
    /// Smallest singular value of the leading r x r block of R.
    [[nodiscard]] double r11_min_singular_value(Index r) const;
};

/// Column-pivoted Householder QR. Each step moves the remaining column of
/// largest residual norm to the front; ties go to the lowest original index.
/// Columns left after min(m, N) steps are kept in original index order.
CpqrFactorization cpqr(const Matrix &mat);

/// First r pivots of cpqr(Phi_m^T).
SensorSet select_sensors(const PodBasis &basis, Index r);

/// ||(S_r^T Phi_m)^+||_2 = 1 / sigma_min(S_r^T Phi_m). Throws
/// AssumptionViolation if S_r^T Phi_m lacks full row rank.
double estimation_bound(const PodBasis &basis, const SensorSet &sensors);

} // namespace sdeim
