#include "sdeim/ks_solver.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include <fftw3.h>

namespace sdeim
{

namespace
{

// The FFTW planner is not reentrant; execution on distinct plans is.
std::mutex &planner_mutex()
{
    static std::mutex mutex;
    return mutex;
}

constexpr int kContourPoints = 32;

// Transform of real data: force v[N-k] = conj(v[k]) so round-off cannot seed
// an imaginary part that the unstable modes would amplify. The linear
// coefficients are even in k, so the symmetry then persists exactly.
void make_hermitian(std::vector<std::complex<double>> &v)
{
    const std::size_t n = v.size();
    v[0] = v[0].real();
    for (std::size_t k = 1; k < n - k; ++k) {
        const std::complex<double> avg = 0.5 * (v[k] + std::conj(v[n - k]));
        v[k] = avg;
        v[n - k] = std::conj(avg);
    }
    if (n % 2 == 0) v[n / 2] = v[n / 2].real();
}

} // namespace

struct KsSolver::Plans
{
    explicit Plans(Index n)
        : size(n),
          in(static_cast<fftw_complex *>(
              fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(n)))),
          out(static_cast<fftw_complex *>(
              fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(n))))
    {
        if (in == nullptr || out == nullptr) {
            fftw_free(in);
            fftw_free(out);
            throw Error(ErrorKind::Numerical, "FFT buffer allocation failed");
        }
        std::lock_guard lock(planner_mutex());
        forward = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_FORWARD,
                                   FFTW_ESTIMATE);
        backward = fftw_plan_dft_1d(static_cast<int>(n), in, out,
                                    FFTW_BACKWARD, FFTW_ESTIMATE);
    }

    ~Plans()
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
        fftw_free(in);
        fftw_free(out);
    }

    Plans(const Plans &) = delete;
    Plans &operator=(const Plans &) = delete;

    void run(fftw_plan plan, const std::vector<Complex> &src,
             std::vector<Complex> &dst) const
    {
        for (Index k = 0; k < size; ++k) {
            in[k][0] = src[k].real();
            in[k][1] = src[k].imag();
        }
        fftw_execute(plan);
        dst.resize(static_cast<std::size_t>(size));
        for (Index k = 0; k < size; ++k) dst[k] = Complex(out[k][0], out[k][1]);
    }

    Index size;
    fftw_complex *in;
    fftw_complex *out;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

KsSolver::KsSolver(Index n, double domain_length, double dt)
    : m_n(n), m_dt(dt), m_v(static_cast<std::size_t>(n)),
      m_plans(std::make_unique<Plans>(n))
{
    const auto un = static_cast<std::size_t>(n);
    m_e.resize(un);
    m_e2.resize(un);
    m_q.resize(un);
    m_f1.resize(un);
    m_f2.resize(un);
    m_f3.resize(un);
    m_g.resize(un);

    const double two_pi_over_l = 2.0 * std::numbers::pi / domain_length;
    const Index cutoff = n / 3; // 2/3 rule: keep |k| <= N/3
    for (Index k = 0; k < n; ++k) {
        const Index signed_k = k <= n / 2 ? k : k - n;
        const double q = two_pi_over_l * static_cast<double>(signed_k);
        const double lin = q * q - q * q * q * q;
        const double hl = dt * lin;

        m_e[k] = std::exp(hl);
        m_e2[k] = std::exp(hl / 2.0);

        // Mean over points on a circle of radius one centred at h L; avoids
        // the cancellation in the phi-functions near zero.
        double q_sum = 0.0, f1 = 0.0, f2 = 0.0, f3 = 0.0;
        for (int j = 1; j <= kContourPoints; ++j) {
            const Complex r = std::exp(Complex(
                0.0, std::numbers::pi * (j - 0.5) / kContourPoints));
            const Complex z = hl + r;
            const Complex ez = std::exp(z);
            const Complex z3 = z * z * z;
            q_sum += ((std::exp(z / 2.0) - 1.0) / z).real();
            f1 += ((-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3).real();
            f2 += ((2.0 + z + ez * (-2.0 + z)) / z3).real();
            f3 += ((-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3).real();
        }
        m_q[k] = dt * q_sum / kContourPoints;
        m_f1[k] = dt * f1 / kContourPoints;
        m_f2[k] = dt * f2 / kContourPoints;
        m_f3[k] = dt * f3 / kContourPoints;

        // N(v) = -(i q / 2) FFT(u^2); the Nyquist bin has no derivative.
        const bool keep = std::abs(signed_k) <= cutoff &&
                          !(n % 2 == 0 && k == n / 2);
        m_g[k] = keep ? Complex(0.0, -0.5 * q) : Complex(0.0, 0.0);
    }
}

KsSolver::~KsSolver() = default;
KsSolver::KsSolver(KsSolver &&) noexcept = default;
KsSolver &KsSolver::operator=(KsSolver &&) noexcept = default;

double KsSolver::wavenumber(Index k) const noexcept
{
    const Index signed_k = k <= m_n / 2 ? k : k - m_n;
    return static_cast<double>(signed_k);
}

void KsSolver::set_state(const Vector &u)
{
    if (u.size() != m_n) {
        throw Error(ErrorKind::InvalidInput, "KS state has wrong dimension");
    }
    std::vector<Complex> phys(static_cast<std::size_t>(m_n));
    for (Index j = 0; j < m_n; ++j) phys[j] = Complex(u[j], 0.0);
    m_plans->run(m_plans->forward, phys, m_v);
    make_hermitian(m_v);
}

Vector KsSolver::state() const
{
    std::vector<Complex> phys;
    m_plans->run(m_plans->backward, m_v, phys);
    Vector u(m_n);
    double residue = 0.0;
    const double inv_n = 1.0 / static_cast<double>(m_n);
    for (Index j = 0; j < m_n; ++j) {
        u[j] = phys[j].real() * inv_n;
        residue = std::max(residue, std::abs(phys[j].imag() * inv_n));
    }
    if (residue > 1e-8 * u.norm()) {
        std::ostringstream msg;
        msg << "KS inverse transform left imaginary residue " << residue
            << " (|u| = " << u.norm() << ")";
        throw Error(ErrorKind::Numerical, msg.str());
    }
    return u;
}

void KsSolver::nonlinear(const std::vector<Complex> &v,
                         std::vector<Complex> &out)
{
    std::vector<Complex> &phys = out;
    m_plans->run(m_plans->backward, v, phys);
    const double inv_n = 1.0 / static_cast<double>(m_n);
    for (auto &value : phys) {
        const double u = value.real() * inv_n;
        value = Complex(u * u, 0.0);
    }
    m_plans->run(m_plans->forward, phys, out);
    make_hermitian(out);
    for (Index k = 0; k < m_n; ++k) out[k] *= m_g[k];
}

void KsSolver::step(Index count)
{
    const auto un = static_cast<std::size_t>(m_n);
    m_a.resize(un);
    m_b.resize(un);
    m_c.resize(un);
    for (Index s = 0; s < count; ++s) {
        nonlinear(m_v, m_nv);
        for (Index k = 0; k < m_n; ++k) m_a[k] = m_e2[k] * m_v[k] + m_q[k] * m_nv[k];
        nonlinear(m_a, m_na);
        for (Index k = 0; k < m_n; ++k) m_b[k] = m_e2[k] * m_v[k] + m_q[k] * m_na[k];
        nonlinear(m_b, m_nb);
        for (Index k = 0; k < m_n; ++k) {
            m_c[k] = m_e2[k] * m_a[k] + m_q[k] * (2.0 * m_nb[k] - m_nv[k]);
        }
        nonlinear(m_c, m_nc);
        for (Index k = 0; k < m_n; ++k) {
            m_v[k] = m_e[k] * m_v[k] + m_nv[k] * m_f1[k] +
                     2.0 * (m_na[k] + m_nb[k]) * m_f2[k] + m_nc[k] * m_f3[k];
        }
    }
}

} // namespace sdeim
