#include "fklattice/mc.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "fklattice/kernel.hpp"

namespace fklattice {

namespace {

// Fixed chunk count so the path-to-stream assignment, and therefore the
// estimate, does not depend on the number of threads.
constexpr int kChunks = 256;

std::uint64_t splitmix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct ChunkSums {
    double re = 0.0, im = 0.0, re2 = 0.0, im2 = 0.0;
};

}  // namespace

McEstimate mc_price(const Problem& problem, int m_steps, long paths,
                    std::uint64_t seed, int quad_order) {
    if (m_steps < 100)
        throw std::invalid_argument("mc_price: m_steps must be >= 100");
    if (paths < 1000)
        throw std::invalid_argument("mc_price: paths must be >= 1000");

    const int m = m_steps;
    const double dt = 1.0 / m;
    const double sq_dt = std::sqrt(dt);
    const double two_over_dt = 2.0 / dt;

    std::vector<double> g_lo(m + 1), g_hi(m + 1);
    for (int j = 0; j <= m; ++j) {
        const double t = static_cast<double>(j) / m;
        g_lo[j] = problem.bounds.lower(t);
        g_hi[j] = problem.bounds.upper(t);
    }

    const bool stepped = problem.potential.is_step();
    const double kappa = problem.potential.kappa();
    const double level = problem.potential.level();
    const double x0 = problem.model.x0;

    std::vector<ChunkSums> sums(kChunks);

#pragma omp parallel for schedule(dynamic)
    for (int c = 0; c < kChunks; ++c) {
        std::mt19937_64 rng(splitmix64(seed + 0x9E3779B97F4A7C15ULL * (c + 1)));
        std::normal_distribution<double> gauss(0.0, 1.0);
        const long lo = paths * static_cast<long>(c) / kChunks;
        const long hi = paths * static_cast<long>(c + 1) / kChunks;
        ChunkSums local;

        for (long p = lo; p < hi; ++p) {
            double x = x0;
            double weight = 1.0;
            double tau = 0.0;
            Complex v_int(0.0, 0.0);
            Complex v_prev = stepped ? Complex(0, 0) : problem.potential(x);

            for (int j = 0; j < m; ++j) {
                const double t = static_cast<double>(j) / m;
                const double x_next =
                    x + problem.model.drift(t, x) * dt + sq_dt * gauss(rng);
                if (x_next <= g_lo[j + 1] || x_next >= g_hi[j + 1]) {
                    weight = 0.0;
                    break;
                }
                const double survive =
                    1.0 -
                    std::exp(-two_over_dt * (g_hi[j] - x) * (g_hi[j + 1] - x_next)) -
                    std::exp(-two_over_dt * (g_lo[j] - x) * (g_lo[j + 1] - x_next));
                weight *= std::max(0.0, survive);

                if (stepped) {
                    tau += expected_sojourn_above(level, dt, x, x_next, quad_order);
                } else {
                    const Complex v_cur = problem.potential(x_next);
                    v_int += 0.5 * dt * (v_prev + v_cur);
                    v_prev = v_cur;
                }
                x = x_next;
            }

            Complex f(0.0, 0.0);
            if (weight > 0.0) {
                const Complex discount =
                    stepped ? Complex(std::exp(-kappa * tau), 0.0) : std::exp(-v_int);
                f = weight * problem.payoff.phi(x) * discount;
            }
            local.re += f.real();
            local.im += f.imag();
            local.re2 += f.real() * f.real();
            local.im2 += f.imag() * f.imag();
        }
        sums[c] = local;
    }

    // Sequential reduction in chunk order keeps the result deterministic.
    ChunkSums total;
    for (const ChunkSums& s : sums) {
        total.re += s.re;
        total.im += s.im;
        total.re2 += s.re2;
        total.im2 += s.im2;
    }

    const double np = static_cast<double>(paths);
    const double mean_re = total.re / np;
    const double mean_im = total.im / np;
    const double var_re =
        std::max(0.0, (total.re2 - np * mean_re * mean_re) / (np - 1.0));
    const double var_im =
        std::max(0.0, (total.im2 - np * mean_im * mean_im) / (np - 1.0));

    McEstimate est;
    est.mean = Complex(mean_re, mean_im);
    est.se_re = std::sqrt(var_re / np);
    est.se_im = std::sqrt(var_im / np);
    est.paths = paths;
    est.steps_per_path = m;
    est.seed = seed;
    return est;
}

}  // namespace fklattice
