#include "phasesim/simulate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "phasesim/rng.hpp"

namespace phasesim {

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kInf = std::numeric_limits<double>::infinity();

}  // namespace

SampleBatch sample_outcomes(const GaussianModel& model, std::size_t n,
                            std::uint64_t seed, std::uint32_t stream,
                            unsigned threads) {
    validate_model(model);
    if (n == 0) throw std::invalid_argument("sample_outcomes: need n >= 1");
    const Mat2 s = sqrt_sym2(model.cov);
    SampleBatch batch;
    batch.seed = seed;
    batch.stream = stream;
    batch.outcomes.resize(n);
    auto fill = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const std::array<double, 2> z = normal_pair(seed, stream, i);
            batch.outcomes[i] = {model.mean[0] + s.xx * z[0] + s.xy * z[1],
                                 model.mean[1] + s.xy * z[0] + s.yy * z[1]};
        }
    };
    if (threads <= 1 || n < 2) {
        fill(0, n);
        return batch;
    }
    const std::size_t workers = threads < n ? threads : n;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = lo + chunk < n ? lo + chunk : n;
        if (lo >= hi) break;
        pool.emplace_back(fill, lo, hi);
    }
    for (std::thread& t : pool) t.join();
    return batch;
}

std::vector<double> phases_of(const SampleBatch& batch) {
    if (batch.outcomes.empty()) {
        throw std::invalid_argument("phases_of: empty batch");
    }
    std::vector<double> angles(batch.outcomes.size());
    for (std::size_t i = 0; i < batch.outcomes.size(); ++i) {
        const auto& z = batch.outcomes[i];
        double a = (z[0] == 0.0 && z[1] == 0.0) ? 0.0 : std::atan2(z[1], z[0]);
        if (a == -kPi) a = kPi;  // keep angles in (-pi, pi]
        angles[i] = a;
    }
    return angles;
}

PhaseHistogram histogram(const std::vector<double>& angles, std::size_t n_bins) {
    if (n_bins < 2) throw std::invalid_argument("histogram: need at least 2 bins");
    PhaseHistogram h;
    h.n_bins = n_bins;
    h.counts.assign(n_bins, 0);
    h.total = angles.size();
    const double inv = static_cast<double>(n_bins) / (2.0 * kPi);
    for (double a : angles) {
        auto idx = static_cast<std::ptrdiff_t>(std::floor((a + kPi) * inv));
        if (idx < 0) idx = 0;
        if (idx >= static_cast<std::ptrdiff_t>(n_bins)) {
            idx = static_cast<std::ptrdiff_t>(n_bins) - 1;
        }
        ++h.counts[static_cast<std::size_t>(idx)];
    }
    return h;
}

double circular_mean(const std::vector<double>& angles) {
    if (angles.empty()) throw std::invalid_argument("circular_mean: no angles");
    double c = 0.0, s = 0.0;
    for (double a : angles) {
        c += std::cos(a);
        s += std::sin(a);
    }
    if (!(std::hypot(c, s) / static_cast<double>(angles.size()) > 1e-6)) {
        throw std::domain_error("circular_mean: no preferred direction");
    }
    double m = std::atan2(s, c);
    if (m == -kPi) m = kPi;
    return m;
}

// ---------------------------------------------------------------------------
// Sample twin of numeric_width: hard window membership instead of fractional
// grid cells (samples are points, not cells) and no lower bound on the
// window, which a dense grid would otherwise require.
// ---------------------------------------------------------------------------
double circular_std(const std::vector<double>& angles) {
    if (angles.empty()) throw std::invalid_argument("circular_std: no angles");
    const double n = static_cast<double>(angles.size());
    double c = 0.0, s = 0.0;
    for (double a : angles) {
        c += std::cos(a);
        s += std::sin(a);
    }
    if (std::hypot(c, s) / n < 1e-6) return kInf;

    double centre = std::atan2(s, c);
    double window = 0.5 * kPi;
    double est = kInf;
    for (int iter = 0; iter < 80; ++iter) {
        std::size_t cnt = 0;
        double acc = 0.0;
        for (double a : angles) {
            const double dev = wrap_angle(a - centre);
            if (std::abs(dev) <= window) {
                ++cnt;
                acc += dev;
            }
        }
        if (cnt == 0) return kInf;
        centre = wrap_angle(centre + acc / static_cast<double>(cnt));
        cnt = 0;
        acc = 0.0;
        for (double a : angles) {
            const double dev = wrap_angle(a - centre);
            if (std::abs(dev) <= window) {
                ++cnt;
                acc += dev * dev;
            }
        }
        if (cnt == 0) return kInf;
        const double m2 = acc / static_cast<double>(cnt);
        est = truncated_moment_width(m2, window);
        if (est == 0.0) break;
        double next = kWidthWindowFactor * est;
        if (next > 0.5 * kPi) next = 0.5 * kPi;
        if (next == window) break;
        window = next;
    }
    return est > kPi ? kInf : est;
}

double circular_std_global(const std::vector<double>& angles) {
    if (angles.empty()) throw std::invalid_argument("circular_std_global: no angles");
    double c = 0.0, s = 0.0;
    for (double a : angles) {
        c += std::cos(a);
        s += std::sin(a);
    }
    const double r = std::hypot(c, s) / static_cast<double>(angles.size());
    return std::sqrt(-2.0 * std::log(r));
}

StepResult run_step(const SqueezedSignalParams& signal, const ProbeParams& probe,
                    std::size_t n_samples, std::size_t n_bins, std::uint64_t seed,
                    std::uint32_t stream, unsigned threads) {
    const GaussianModel model = composed_model(signal, probe);
    const SampleBatch batch = sample_outcomes(model, n_samples, seed, stream, threads);
    const std::vector<double> angles = phases_of(batch);
    StepResult out;
    out.hist = histogram(angles, n_bins);
    out.phi_bar = circular_mean(angles);
    out.width = circular_std(angles);
    return out;
}

namespace {

SqueezedSignalParams step1_signal(const EnergyBudget& b) {
    const double f = b.beta_s / (1.0 - b.beta_p);
    return {std::sqrt(f * b.N), std::asinh(std::sqrt((1.0 - f) * b.N))};
}

SqueezedSignalParams step2_signal(const EnergyBudget& b, Reallocation rule) {
    if (rule == Reallocation::FixedRatio) {
        return {std::sqrt(b.beta_s * b.N),
                std::asinh(std::sqrt((1.0 - b.beta_s - b.beta_p) * b.N))};
    }
    const double f = b.beta_s / (1.0 - b.beta_p);
    const double coherent = (f - b.beta_p) * b.N;
    if (!(coherent > 0.0)) {
        throw std::domain_error(
            "two_step: fixed-rs reallocation infeasible (probe fraction consumes "
            "the coherent budget)");
    }
    return {std::sqrt(coherent), std::asinh(std::sqrt((1.0 - f) * b.N))};
}

}  // namespace

TwoStepResult two_step(const EnergyBudget& budget, std::size_t n_samples,
                       std::size_t n_bins, std::uint64_t seed,
                       Reallocation reallocation, unsigned threads) {
    validate_budget(budget);
    if (!(budget.beta_s > 0.0)) {
        throw std::invalid_argument("two_step: coherent fraction must be positive");
    }
    if (n_samples < 1000) {
        throw std::invalid_argument("two_step: need at least 1000 samples per step");
    }
    TwoStepResult out;
    out.budget = budget;
    out.reallocation = reallocation;
    out.seed = seed;
    out.signal1 = step1_signal(budget);
    const StepResult step1 = run_step(out.signal1, ProbeParams{0.0, 0.0}, n_samples,
                                      n_bins, seed, out.stream1, threads);
    out.hist1 = step1.hist;
    out.phi_bar = step1.phi_bar;
    out.width1 = step1.width;

    out.signal2 = step2_signal(budget, reallocation);
    out.probe2 = {std::asinh(std::sqrt(budget.beta_p * budget.N)), out.phi_bar};
    const StepResult step2 = run_step(out.signal2, out.probe2, n_samples, n_bins,
                                      seed, out.stream2, threads);
    out.hist2 = step2.hist;
    out.width2 = step2.width;

    out.predicted1 = step1_width(budget);
    out.predicted2 = budget.beta_p > 0.0 ? step2_width(budget) : out.predicted1;
    return out;
}

std::size_t sweep_grid_points(double predicted_width) {
    if (!(predicted_width > 0.0) || !std::isfinite(predicted_width)) {
        throw std::invalid_argument("sweep_grid_points: predicted width must be positive");
    }
    double wanted = 150.0 / predicted_width;
    if (wanted < 4096.0) wanted = 4096.0;
    std::size_t n = 4096;
    const std::size_t cap = std::size_t{1} << 22;
    while (static_cast<double>(n) < wanted && n < cap) n *= 2;
    return n;
}

SweepResult scaling_sweep(const std::vector<double>& n_list, double beta_s,
                          double beta_p, SweepMode mode, std::uint64_t seed,
                          std::size_t n_samples, unsigned threads) {
    if (n_list.size() < 3) {
        throw std::invalid_argument("scaling_sweep: need at least 3 photon numbers");
    }
    for (std::size_t i = 1; i < n_list.size(); ++i) {
        if (!(n_list[i] > n_list[i - 1])) {
            throw std::invalid_argument("scaling_sweep: photon numbers must ascend");
        }
    }
    SweepResult out;
    out.rows.reserve(n_list.size());
    for (double n_photons : n_list) {
        const EnergyBudget budget{n_photons, beta_s, beta_p};
        validate_budget(budget);
        SweepRow row;
        row.N = n_photons;
        row.predicted1 = step1_width(budget);
        row.predicted2 = beta_p > 0.0 ? step2_width(budget) : row.predicted1;
        if (mode == SweepMode::MonteCarlo) {
            const TwoStepResult r =
                two_step(budget, n_samples, 200, seed, Reallocation::FixedRatio, threads);
            row.width1 = r.width1;
            row.width2 = r.width2;
        } else {
            const SqueezedSignalParams s1 = step1_signal(budget);
            const std::array<double, 2> q = q_variances(s1.r_s);
            const PhaseGrid grid1{sweep_grid_points(row.predicted1)};
            row.width1 = numeric_width(closed_form_density(s1.x_s, q[0], q[1], grid1));
            if (beta_p > 0.0) {
                const SqueezedSignalParams s2 =
                    step2_signal(budget, Reallocation::FixedRatio);
                const GaussianModel model2 =
                    composed_model(s2, ProbeParams{std::asinh(std::sqrt(beta_p * n_photons)), 0.0});
                const PhaseGrid grid2{sweep_grid_points(row.predicted2)};
                row.width2 = numeric_width(closed_form_density(model2, grid2));
            } else {
                row.width2 = row.width1;
            }
        }
        if (!std::isfinite(row.width1) || !std::isfinite(row.width2)) {
            throw std::runtime_error("scaling_sweep: width estimate degenerate");
        }
        out.rows.push_back(row);
    }
    // Least-squares slope of log(width) on log(N), per column.
    const auto slope = [&](bool second) {
        const double m = static_cast<double>(out.rows.size());
        double sx = 0.0, sy = 0.0;
        for (const SweepRow& r : out.rows) {
            sx += std::log(r.N);
            sy += std::log(second ? r.width2 : r.width1);
        }
        const double mx = sx / m, my = sy / m;
        double sxx = 0.0, sxy = 0.0;
        for (const SweepRow& r : out.rows) {
            const double dx = std::log(r.N) - mx;
            sxx += dx * dx;
            sxy += dx * (std::log(second ? r.width2 : r.width1) - my);
        }
        return sxy / sxx;
    };
    out.slope1 = slope(false);
    out.slope2 = slope(true);
    return out;
}

}  // namespace phasesim
