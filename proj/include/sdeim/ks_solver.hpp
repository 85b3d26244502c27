#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "sdeim/error.hpp"

namespace sdeim
{

/// ETDRK4 stepper for the Kuramoto-Sivashinsky equation (Kassam & Trefethen
/// contour-integral coefficients). Owns its FFT plans and work buffers, so an
/// instance must not be shared between threads.
class KsSolver
{
    public:
    using Complex = std::complex<double>;

    KsSolver(Index n, double domain_length, double dt);
    ~KsSolver();
    KsSolver(const KsSolver &) = delete;
    KsSolver &operator=(const KsSolver &) = delete;
    KsSolver(KsSolver &&) noexcept;
    KsSolver &operator=(KsSolver &&) noexcept;

    /// Loads a real state into spectral space.
    void set_state(const Vector &u);
    /// Physical state. Throws Numerical if the inverse transform leaves an
    /// imaginary residue above 1e-8 |u|.
    [[nodiscard]] Vector state() const;
    void step(Index count = 1);

    [[nodiscard]] const std::vector<Complex> &spectrum() const noexcept
    {
        return m_v;
    }
    /// Signed integer wavenumber of FFT bin k (the Nyquist bin reports +N/2).
    [[nodiscard]] double wavenumber(Index k) const noexcept;

    private:
    struct Plans;

    void nonlinear(const std::vector<Complex> &v, std::vector<Complex> &out);

    Index m_n;
    double m_dt;
    std::vector<Complex> m_v;
    std::vector<double> m_e, m_e2, m_q, m_f1, m_f2, m_f3;
    std::vector<Complex> m_g;
    std::vector<Complex> m_nv, m_na, m_nb, m_nc, m_a, m_b, m_c;
    std::unique_ptr<Plans> m_plans;
};

} // namespace sdeim
