#include "dualcav/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dualcav/constants.hpp"
#include "dualcav/mechanics.hpp"

namespace dualcav {

namespace {

constexpr int kNumParams = 7;
using Params = std::array<double, kNumParams>;
// Layout: {w_f, w_e, ln M_f, ln M_e, ln Q_f, ln Q_e, floor}

struct FitData {
    std::vector<double> freq_rad_s;
    std::vector<double> asd;
    std::vector<double> weight;  // sqrt(bin width) / asd
    double temperature_k = 0.0;
    double bin_width_hz = 0.0;   // 0 = pointwise model
    double floor_ref = 0.0;      // data-derived scale for the floor parameter
};

double model_psd(const Params& p, double temperature_k, double omega) {
    const MechanicalMode front(p[0], std::exp(p[2]), std::exp(p[4]));
    const MechanicalMode end(p[1], std::exp(p[3]), std::exp(p[5]));
    const double a_f = thermal_noise_asd(front, temperature_k, omega);
    const double a_e = thermal_noise_asd(end, temperature_k, omega);
    return a_f * a_f + a_e * a_e + p[6] * p[6];
}

/// Model ASD at one bin; with a nonzero bin width the PSD is averaged across
/// the bin (Simpson) the way an analyzer bin averages the underlying density.
double model_asd(const Params& p, const FitData& data, size_t i) {
    const double omega = data.freq_rad_s[i];
    if (data.bin_width_hz <= 0.0) return std::sqrt(model_psd(p, data.temperature_k, omega));
    const double half = 0.5 * data.bin_width_hz * kTwoPi;
    const double lo = model_psd(p, data.temperature_k, omega - half);
    const double mid = model_psd(p, data.temperature_k, omega);
    const double hi = model_psd(p, data.temperature_k, omega + half);
    return std::sqrt((lo + 4.0 * mid + hi) / 6.0);
}

void residuals(const Params& p, const FitData& data, std::vector<double>& r) {
    const size_t n = data.freq_rad_s.size();
    r.resize(n);
    for (size_t i = 0; i < n; ++i) {
        r[i] = (model_asd(p, data, i) - data.asd[i]) * data.weight[i];
    }
}

double cost_of(const std::vector<double>& r) {
    double c = 0.0;
    for (double v : r) c += v * v;
    return c;
}

/// Gaussian elimination with partial pivoting; returns false when the system
/// is numerically singular.
bool solve_linear(std::array<std::array<double, kNumParams>, kNumParams> a,
                  std::array<double, kNumParams> b, Params& x) {
    for (int col = 0; col < kNumParams; ++col) {
        int pivot = col;
        for (int row = col + 1; row < kNumParams; ++row) {
            if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
        }
        if (std::abs(a[pivot][col]) < 1e-300) return false;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int row = col + 1; row < kNumParams; ++row) {
            const double m = a[row][col] / a[col][col];
            for (int k = col; k < kNumParams; ++k) a[row][k] -= m * a[col][k];
            b[row] -= m * b[col];
        }
    }
    for (int row = kNumParams - 1; row >= 0; --row) {
        double acc = b[row];
        for (int k = row + 1; k < kNumParams; ++k) acc -= a[row][k] * x[k];
        x[row] = acc / a[row][row];
    }
    return true;
}

double param_scale(const Params& p, const FitData& data, int k) {
    if (k == 6) return std::max(std::abs(p[6]), data.floor_ref);
    return std::max(std::abs(p[k]), 1.0);
}

}  // namespace

FitResult fit_thermal_doublet(const SpectrumTrace& trace, double temperature_k,
                              const DoubletGuess& guess, const FitOptions& options) {
    if (trace.freq_hz.size() != trace.asd.size() || trace.freq_hz.size() < kNumParams + 1) {
        throw std::invalid_argument("fit_thermal_doublet: trace too short");
    }
    if (!(temperature_k > 0.0)) {
        throw std::invalid_argument("fit_thermal_doublet: temperature must be > 0");
    }
    if (!(guess.freq_front_rad_s > 0.0 && guess.freq_end_rad_s > 0.0 &&
          guess.mass_front_kg > 0.0 && guess.mass_end_kg > 0.0 && guess.q_front > 0.0 &&
          guess.q_end > 0.0 && guess.floor_asd >= 0.0)) {
        throw std::invalid_argument("fit_thermal_doublet: invalid initial guess");
    }

    // Assemble fit data, skipping masked and non-positive bins.
    FitData data;
    data.temperature_k = temperature_k;
    const size_t n_all = trace.freq_hz.size();
    double spacing = 0.0;
    if (n_all > 1) spacing = (trace.freq_hz.back() - trace.freq_hz.front()) /
                             static_cast<double>(n_all - 1);
    data.bin_width_hz = options.bin_width_hz.value_or(spacing);

    for (size_t i = 0; i < n_all; ++i) {
        const double f = trace.freq_hz[i];
        if (!(trace.asd[i] > 0.0)) continue;
        bool masked = false;
        for (const auto& [lo, hi] : options.mask_hz) {
            if (f >= lo && f <= hi) { masked = true; break; }
        }
        if (masked) continue;
        const double width =
            (i + 1 < n_all ? trace.freq_hz[i + 1] : trace.freq_hz[i]) -
            (i > 0 ? trace.freq_hz[i - 1] : trace.freq_hz[i]);
        data.freq_rad_s.push_back(f * kTwoPi);
        data.asd.push_back(trace.asd[i]);
        data.weight.push_back(std::sqrt(std::max(0.5 * width, 1e-300)) / trace.asd[i]);
    }
    if (data.freq_rad_s.size() < kNumParams + 1) {
        throw std::invalid_argument("fit_thermal_doublet: not enough usable bins");
    }
    // Normalize weights so the residual norm is the bin-width-weighted RMS
    // relative misfit, invariant under grid refinement.
    double width_total = 0.0;
    for (size_t i = 0; i < data.weight.size(); ++i) {
        const double width = data.weight[i] * data.asd[i];
        width_total += width * width;
    }
    const double norm = 1.0 / std::sqrt(width_total);
    for (double& w : data.weight) w *= norm;

    // The floor parameter lives on the scale of the quietest bins.
    {
        std::vector<double> sorted(data.asd);
        std::sort(sorted.begin(), sorted.end());
        data.floor_ref = sorted[sorted.size() / 10];
    }

    Params p{guess.freq_front_rad_s, guess.freq_end_rad_s,
             std::log(guess.mass_front_kg), std::log(guess.mass_end_kg),
             std::log(guess.q_front), std::log(guess.q_end), guess.floor_asd};

    FitResult result;
    std::vector<double> r, r_trial;
    residuals(p, data, r);
    double cost = cost_of(r);

    const size_t n = data.freq_rad_s.size();
    std::vector<std::array<double, kNumParams>> jac(n);
    double lambda = options.initial_damping;
    bool converged = false;
    bool singular = false;
    bool stalled = false;
    int iter = 0;

    for (; iter < options.max_iterations && !converged && !singular && !stalled; ++iter) {
        // Forward-difference Jacobian.
        for (int k = 0; k < kNumParams; ++k) {
            Params pk = p;
            const double h = 1e-7 * param_scale(p, data, k);
            pk[k] += h;
            residuals(pk, data, r_trial);
            for (size_t i = 0; i < n; ++i) jac[i][k] = (r_trial[i] - r[i]) / h;
        }

        std::array<std::array<double, kNumParams>, kNumParams> jtj{};
        std::array<double, kNumParams> jtr{};
        for (size_t i = 0; i < n; ++i) {
            for (int a = 0; a < kNumParams; ++a) {
                jtr[a] += jac[i][a] * r[i];
                for (int b = a; b < kNumParams; ++b) jtj[a][b] += jac[i][a] * jac[i][b];
            }
        }
        for (int a = 0; a < kNumParams; ++a)
            for (int b = 0; b < a; ++b) jtj[a][b] = jtj[b][a];

        // The raw parameters mix rad/s, log units and ASD units; rescale the
        // normal equations to unit diagonal before probing or solving.
        // A column with no sensitivity at all is frozen for this step.
        std::array<double, kNumParams> scale_diag{};
        std::array<bool, kNumParams> frozen{};
        bool any_active = false;
        for (int a = 0; a < kNumParams; ++a) {
            if (jtj[a][a] > 0.0) {
                scale_diag[a] = std::sqrt(jtj[a][a]);
                any_active = true;
            } else {
                frozen[a] = true;
            }
        }
        if (!any_active) {
            singular = true;
            result.message = "non-identifiable: zero curvature in all directions";
            break;
        }
        std::array<std::array<double, kNumParams>, kNumParams> scaled{};
        for (int a = 0; a < kNumParams; ++a) {
            for (int b = 0; b < kNumParams; ++b) {
                if (frozen[a] || frozen[b]) {
                    scaled[a][b] = (a == b) ? 1.0 : 0.0;
                } else {
                    scaled[a][b] = jtj[a][b] / (scale_diag[a] * scale_diag[b]);
                }
            }
        }

        // Identifiability probe on the undamped scaled system.
        {
            auto probe = scaled;
            double min_pivot = 1.0;
            bool ok = true;
            for (int col = 0; col < kNumParams && ok; ++col) {
                int pivot = col;
                for (int row = col + 1; row < kNumParams; ++row) {
                    if (std::abs(probe[row][col]) > std::abs(probe[pivot][col])) pivot = row;
                }
                min_pivot = std::min(min_pivot, std::abs(probe[pivot][col]));
                if (std::abs(probe[pivot][col]) < 1e-300) {
                    ok = false;
                    break;
                }
                std::swap(probe[col], probe[pivot]);
                for (int row = col + 1; row < kNumParams; ++row) {
                    const double m = probe[row][col] / probe[col][col];
                    for (int k = col; k < kNumParams; ++k) probe[row][k] -= m * probe[col][k];
                }
            }
            if (!ok || min_pivot < 1e-12) {
                singular = true;
                result.message = "non-identifiable: near-singular normal equations "
                                 "(degenerate parameter direction)";
                break;
            }
        }

        // Damped step, damping x10 on failure, /10 on success.
        bool stepped = false;
        while (!stepped) {
            auto damped = scaled;
            for (int a = 0; a < kNumParams; ++a) damped[a][a] += lambda;
            std::array<double, kNumParams> rhs{};
            for (int a = 0; a < kNumParams; ++a) {
                rhs[a] = frozen[a] ? 0.0 : -jtr[a] / scale_diag[a];
            }
            Params step{};
            if (!solve_linear(damped, rhs, step)) {
                singular = true;
                result.message = "non-identifiable: singular damped system";
                break;
            }
            Params trial = p;
            for (int k = 0; k < kNumParams; ++k) {
                if (!frozen[k]) trial[k] += step[k] / scale_diag[k];
            }
            if (trial[6] < 0.0) trial[6] = 0.0;
            bool valid = trial[0] > 0.0 && trial[1] > 0.0 &&
                         std::abs(trial[2]) < 700.0 && std::abs(trial[3]) < 700.0 &&
                         std::abs(trial[4]) < 700.0 && std::abs(trial[5]) < 700.0;
            double trial_cost = std::numeric_limits<double>::infinity();
            if (valid) {
                residuals(trial, data, r_trial);
                trial_cost = cost_of(r_trial);
                if (!std::isfinite(trial_cost)) valid = false;
            }
            if (valid && trial_cost <= cost) {
                double max_rel = 0.0;
                for (int k = 0; k < kNumParams; ++k) {
                    max_rel = std::max(max_rel,
                                       std::abs(trial[k] - p[k]) / param_scale(p, data, k));
                }
                p = trial;
                std::swap(r, r_trial);
                cost = trial_cost;
                lambda = std::max(lambda * 0.1, 1e-12);
                stepped = true;
                if (max_rel < options.param_tol) converged = true;
            } else {
                lambda *= 10.0;
                if (lambda > 1e12) {
                    // No direction improves the cost: the accepted step is
                    // zero, which satisfies the small-step criterion.
                    stepped = true;
                    stalled = true;
                    converged = true;
                    result.message = "converged: no further improvement possible";
                }
            }
        }
    }

    // Label disambiguation: front = lower frequency.
    if (p[0] > p[1]) {
        std::swap(p[0], p[1]);
        std::swap(p[2], p[3]);
        std::swap(p[4], p[5]);
    }

    result.freq_front_rad_s = p[0];
    result.freq_end_rad_s = p[1];
    result.mass_front_kg = std::exp(p[2]);
    result.mass_end_kg = std::exp(p[3]);
    result.q_front = std::exp(p[4]);
    result.q_end = std::exp(p[5]);
    result.floor_asd = p[6];
    result.iterations = iter;
    result.identifiable = !singular;
    result.converged = converged && !singular;
    result.residual_norm = std::sqrt(cost);
    if (result.converged && result.message.empty()) result.message = "converged";
    if (!result.converged && result.message.empty()) {
        result.message = "did not converge within the iteration limit";
    }

    // Covariance proxy: diag((J^T J)^-1) * cost/dof, via one more Jacobian at
    // the solution. Skipped for non-identifiable fits.
    if (!singular) {
        residuals(p, data, r);
        for (int k = 0; k < kNumParams; ++k) {
            Params pk = p;
            const double h = 1e-7 * param_scale(p, data, k);
            pk[k] += h;
            residuals(pk, data, r_trial);
            for (size_t i = 0; i < n; ++i) jac[i][k] = (r_trial[i] - r[i]) / h;
        }
        std::array<std::array<double, kNumParams>, kNumParams> jtj{};
        for (size_t i = 0; i < n; ++i) {
            for (int a = 0; a < kNumParams; ++a)
                for (int b = a; b < kNumParams; ++b) jtj[a][b] += jac[i][a] * jac[i][b];
        }
        for (int a = 0; a < kNumParams; ++a)
            for (int b = 0; b < a; ++b) jtj[a][b] = jtj[b][a];

        // Unit-diagonal rescaling again, for a meaningful inversion.
        std::array<double, kNumParams> d{};
        std::array<std::array<double, kNumParams>, kNumParams> scaled{};
        bool ok = true;
        for (int a = 0; a < kNumParams; ++a) {
            d[a] = jtj[a][a] > 0.0 ? std::sqrt(jtj[a][a]) : 0.0;
        }
        for (int a = 0; a < kNumParams; ++a) {
            for (int b = 0; b < kNumParams; ++b) {
                if (d[a] == 0.0 || d[b] == 0.0) {
                    scaled[a][b] = (a == b) ? 1.0 : 0.0;
                } else {
                    scaled[a][b] = jtj[a][b] / (d[a] * d[b]);
                }
            }
        }

        const double dof = std::max<double>(1.0, static_cast<double>(n) - kNumParams);
        const double scale = cost / dof;
        std::array<double, kNumParams> sigma{};
        for (int k = 0; k < kNumParams && ok; ++k) {
            std::array<double, kNumParams> e{};
            e[k] = 1.0;
            Params col{};
            ok = solve_linear(scaled, e, col);
            if (ok && d[k] > 0.0) {
                sigma[k] = std::sqrt(std::max(0.0, col[k] * scale)) / d[k];
            }
        }
        if (ok) {
            result.sigma_freq_front_rad_s = sigma[0];
            result.sigma_freq_end_rad_s = sigma[1];
            result.sigma_rel_mass_front = sigma[2];
            result.sigma_rel_mass_end = sigma[3];
            result.sigma_rel_q_front = sigma[4];
            result.sigma_rel_q_end = sigma[5];
            result.sigma_floor_asd = sigma[6];
        }
    }
    return result;
}

DoubletGuess auto_guess(const SpectrumTrace& trace, double temperature_k) {
    const size_t n = trace.freq_hz.size();
    if (n < 16) throw std::invalid_argument("auto_guess: trace too short");

    // Two highest local maxima separated by at least 8 bins.
    auto is_peak = [&](size_t i) {
        return i > 0 && i + 1 < n && trace.asd[i] >= trace.asd[i - 1] &&
               trace.asd[i] >= trace.asd[i + 1];
    };
    ptrdiff_t first = -1, second = -1;
    for (size_t i = 1; i + 1 < n; ++i) {
        if (!is_peak(i)) continue;
        if (first < 0 || trace.asd[i] > trace.asd[static_cast<size_t>(first)]) {
            first = static_cast<ptrdiff_t>(i);
        }
    }
    for (size_t i = 1; i + 1 < n; ++i) {
        if (!is_peak(i)) continue;
        if (std::abs(static_cast<ptrdiff_t>(i) - first) < 8) continue;
        if (second < 0 || trace.asd[i] > trace.asd[static_cast<size_t>(second)]) {
            second = static_cast<ptrdiff_t>(i);
        }
    }
    if (first < 0 || second < 0) {
        throw std::invalid_argument("auto_guess: could not locate two separated peaks");
    }
    size_t i_lo = static_cast<size_t>(std::min(first, second));
    size_t i_hi = static_cast<size_t>(std::max(first, second));

    // Floor from the lower quartile of the trace.
    std::vector<double> sorted(trace.asd);
    std::sort(sorted.begin(), sorted.end());
    const double floor = sorted[sorted.size() / 4];

    auto estimate = [&](size_t peak) {
        const double nu0 = trace.freq_hz[peak];
        const double peak_asd = trace.asd[peak];
        // Half-power width around the peak.
        const double half_psd = 0.5 * peak_asd * peak_asd;
        size_t l = peak, r = peak;
        while (l > 0 && trace.asd[l] * trace.asd[l] > half_psd) --l;
        while (r + 1 < n && trace.asd[r] * trace.asd[r] > half_psd) ++r;
        double fwhm = trace.freq_hz[r] - trace.freq_hz[l];
        if (!(fwhm > 0.0)) fwhm = trace.freq_hz[1] - trace.freq_hz[0];
        const double q = std::max(10.0, nu0 / fwhm);
        const double omega0 = nu0 * kTwoPi;
        // Peak ASD of a thermal Lorentzian: sqrt(4 k_B T Q / (M omega^3)).
        const double mass =
            4.0 * kSI.k_b * temperature_k * q / (omega0 * omega0 * omega0 * peak_asd * peak_asd);
        return std::array<double, 3>{omega0, mass, q};
    };

    const auto lo = estimate(i_lo);
    const auto hi = estimate(i_hi);
    DoubletGuess guess;
    guess.freq_front_rad_s = lo[0];
    guess.mass_front_kg = lo[1];
    guess.q_front = lo[2];
    guess.freq_end_rad_s = hi[0];
    guess.mass_end_kg = hi[1];
    guess.q_end = hi[2];
    guess.floor_asd = floor;
    return guess;
}

namespace {

void require_common_grid(const SpectrumTrace& a, const SpectrumTrace& b) {
    if (a.freq_hz.size() != b.freq_hz.size()) {
        throw std::invalid_argument("measure_dip: traces are not on a common grid");
    }
    for (size_t i = 0; i < a.freq_hz.size(); ++i) {
        if (std::abs(a.freq_hz[i] - b.freq_hz[i]) > 1e-9 * std::max(1.0, a.freq_hz[i])) {
            throw std::invalid_argument("measure_dip: traces are not on a common grid");
        }
    }
}

}  // namespace

AntiResonanceReport measure_dip(const SpectrumTrace& measured,
                                const SpectrumTrace& individual_front,
                                const SpectrumTrace& individual_end) {
    require_common_grid(measured, individual_front);
    require_common_grid(measured, individual_end);
    const size_t n = measured.freq_hz.size();
    if (n < 5) throw std::invalid_argument("measure_dip: trace too short");

    const auto argmax = [](const std::vector<double>& v) {
        return static_cast<size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    };
    size_t peak_f = argmax(individual_front.asd);
    size_t peak_e = argmax(individual_end.asd);

    AntiResonanceReport report;
    report.bracket_lo_rad_s = measured.freq_hz[std::min(peak_f, peak_e)] * kTwoPi;
    report.bracket_hi_rad_s = measured.freq_hz[std::max(peak_f, peak_e)] * kTwoPi;

    if (peak_f >= peak_e || peak_e - peak_f < 3) {
        report.interior_minimum = false;
        report.message = "peaks coincide or are unresolved: no interior dip";
        const size_t i = std::min(std::max(peak_f, size_t{1}), n - 2);
        report.dip_rad_s = measured.freq_hz[i] * kTwoPi;
        const double m = measured.asd[i];
        report.residual_m_per_n = m;
        if (m > 0.0) {
            const double ind2 = individual_front.asd[i] * individual_front.asd[i] +
                                individual_end.asd[i] * individual_end.asd[i];
            report.suppression_power = ind2 / (m * m);
            report.suppression_amplitude = std::sqrt(report.suppression_power);
        }
        return report;
    }

    size_t dip = peak_f + 1;
    for (size_t i = peak_f + 1; i < peak_e; ++i) {
        if (measured.asd[i] < measured.asd[dip]) dip = i;
    }
    report.interior_minimum = dip > peak_f + 1 && dip < peak_e - 1;
    if (!report.interior_minimum) {
        report.message = "dip sits at the edge of the inter-peak range";
    }
    report.dip_rad_s = measured.freq_hz[dip] * kTwoPi;
    report.residual_m_per_n = measured.asd[dip];
    const double m2 = measured.asd[dip] * measured.asd[dip];
    if (m2 > 0.0) {
        const double f2 = individual_front.asd[dip] * individual_front.asd[dip];
        const double e2 = individual_end.asd[dip] * individual_end.asd[dip];
        report.suppression_power = (f2 + e2) / m2;
        report.suppression_amplitude = std::sqrt(report.suppression_power);
        report.suppression_vs_front_power = f2 / m2;
        report.suppression_vs_end_power = e2 / m2;
    }
    return report;
}

LineSnr measure_line_snr(const SpectrumTrace& trace, double line_freq_rad_s) {
    const size_t n = trace.freq_hz.size();
    if (n < 12) throw std::invalid_argument("measure_line_snr: trace too short");
    const double nu = line_freq_rad_s / kTwoPi;
    size_t i = 0;
    for (size_t j = 1; j < n; ++j) {
        if (std::abs(trace.freq_hz[j] - nu) < std::abs(trace.freq_hz[i] - nu)) i = j;
    }
    // Local floor from the immediate neighbors: the noise level varies quickly
    // across resonance peaks and cancellation dips, so distant bins would
    // misread it.
    std::vector<double> neighborhood;
    for (ptrdiff_t d = 1; d <= 3; ++d) {
        const ptrdiff_t lo = static_cast<ptrdiff_t>(i) - d;
        const ptrdiff_t hi = static_cast<ptrdiff_t>(i) + d;
        if (lo >= 0) neighborhood.push_back(trace.asd[static_cast<size_t>(lo)]);
        if (hi < static_cast<ptrdiff_t>(n)) {
            neighborhood.push_back(trace.asd[static_cast<size_t>(hi)]);
        }
    }
    if (neighborhood.size() < 4) {
        throw std::invalid_argument("measure_line_snr: line too close to the trace edge");
    }
    std::sort(neighborhood.begin(), neighborhood.end());
    const double floor_asd = neighborhood[neighborhood.size() / 2];
    LineSnr out;
    out.bin_freq_hz = trace.freq_hz[i];
    out.floor_asd = floor_asd;
    if (floor_asd > 0.0) {
        // The line's bin holds signal plus noise; subtract the floor so the
        // ratio is signal power over noise power.
        const double bin_psd = trace.asd[i] * trace.asd[i];
        const double floor_psd = floor_asd * floor_asd;
        out.snr_power = std::max(0.0, bin_psd - floor_psd) / floor_psd;
    } else {
        out.snr_power = std::numeric_limits<double>::infinity();
    }
    return out;
}

TraceMinimum trace_local_minimum(const SpectrumTrace& trace, double lo_hz, double hi_hz) {
    TraceMinimum out;
    ptrdiff_t first = -1, last = -1;
    for (size_t i = 0; i < trace.freq_hz.size(); ++i) {
        if (trace.freq_hz[i] >= lo_hz && trace.freq_hz[i] <= hi_hz) {
            if (first < 0) first = static_cast<ptrdiff_t>(i);
            last = static_cast<ptrdiff_t>(i);
        }
    }
    if (first < 0 || last - first < 2) {
        throw std::invalid_argument("trace_local_minimum: fewer than 3 bins in range");
    }
    size_t best = static_cast<size_t>(first);
    for (size_t i = static_cast<size_t>(first); i <= static_cast<size_t>(last); ++i) {
        if (trace.asd[i] < trace.asd[best]) best = i;
    }
    out.freq_hz = trace.freq_hz[best];
    out.value = trace.asd[best];
    out.interior = best != static_cast<size_t>(first) && best != static_cast<size_t>(last);
    return out;
}

}  // namespace dualcav
