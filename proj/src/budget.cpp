#include "dualcav/budget.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dualcav/constants.hpp"

namespace dualcav {

double shot_noise_floor(const CavityParams& cavity, double probe_power_w) {
    if (!(probe_power_w > 0.0)) {
        throw std::invalid_argument("shot_noise_floor: probe power must be > 0");
    }
    const double flux = cavity.photon_flux(probe_power_w);
    return cavity.wavelength_m / (16.0 * cavity.finesse * std::sqrt(flux));
}

double back_action_force_asd(const CavityParams& cavity, const IntensityNoiseDrive& drive) {
    if (drive.power_w < 0.0 || drive.level_rel_shot < 0.0) {
        throw std::invalid_argument("back_action_force_asd: power and level must be >= 0");
    }
    const double fluct = drive.level_rel_shot * std::sqrt(cavity.photon_flux(drive.power_w));
    return intracavity_force_coupling(cavity, fluct);
}

double back_action_noise(const CavityParams& cavity, const IntensityNoiseDrive& drive,
                         const MirrorModel& front, const MirrorModel& end,
                         double omega_rad_s) {
    return std::abs(pair_susceptibility(front, end, omega_rad_s)) *
           back_action_force_asd(cavity, drive);
}

double quantum_optimal_sensitivity(const MirrorModel& front, const MirrorModel& end,
                                   double omega_rad_s) {
    return std::sqrt(kSI.hbar * std::abs(pair_susceptibility(front, end, omega_rad_s)));
}

double optimal_power(const CavityParams& cavity, const MirrorModel& front,
                     const MirrorModel& end, double omega_rad_s) {
    const double chi_sum = std::abs(pair_susceptibility(front, end, omega_rad_s));
    const double k = cavity.wavevector_rad_m();
    const double f = cavity.finesse;
    const double flux = std::numbers::pi * cavity.wavelength_m /
                        (64.0 * kSI.hbar * k * f * f * chi_sum);
    return flux * cavity.photon_energy_j();
}

namespace {

// T = 0 is accepted as the limit (no thermal drive); negative values are not.
void check_temperature(double temperature_k) {
    if (!(temperature_k >= 0.0)) {
        throw std::invalid_argument("thermal_noise_asd: temperature must be >= 0");
    }
}

}  // namespace

double thermal_noise_asd(const MechanicalMode& mode, double temperature_k,
                         double omega_rad_s) {
    check_temperature(temperature_k);
    if (!(omega_rad_s > 0.0)) {
        throw std::invalid_argument("thermal_noise_asd: frequency must be > 0");
    }
    const double im = susceptibility(mode, omega_rad_s).imag();
    return std::sqrt(4.0 * kSI.k_b * temperature_k * im / omega_rad_s);
}

double thermal_noise_asd(const MirrorModel& mirror, double temperature_k,
                         double omega_rad_s) {
    check_temperature(temperature_k);
    if (!(omega_rad_s > 0.0)) {
        throw std::invalid_argument("thermal_noise_asd: frequency must be > 0");
    }
    const double im = susceptibility(mirror, omega_rad_s).imag();
    return std::sqrt(4.0 * kSI.k_b * temperature_k * im / omega_rad_s);
}

namespace {

double force_sql_from_modulus(double chi_abs) {
    if (!(chi_abs > 0.0)) {
        throw std::invalid_argument("force_sql: susceptibility modulus must be > 0");
    }
    return std::sqrt(kSI.hbar / chi_abs);
}

}  // namespace

double force_sql(const MechanicalMode& mode, double omega_rad_s) {
    return force_sql_from_modulus(std::abs(susceptibility(mode, omega_rad_s)));
}

double force_sql(const MirrorModel& mirror, double omega_rad_s) {
    return force_sql_from_modulus(std::abs(susceptibility(mirror, omega_rad_s)));
}

double force_min_with_cancellation(const MirrorModel& front, const MirrorModel& end,
                                   MirrorSide sensor, double omega_rad_s) {
    const double chi_sensor =
        std::abs(susceptibility(sensor == MirrorSide::Front ? front : end, omega_rad_s));
    if (!(chi_sensor > 0.0)) {
        throw std::invalid_argument(
            "force_min_with_cancellation: sensor susceptibility vanishes");
    }
    return quantum_optimal_sensitivity(front, end, omega_rad_s) / chi_sensor;
}

namespace {

constexpr double kCoarseStepHz = 1.0;
constexpr double kRefineTolHz = 1e-3;

double chi_sum_abs(const MirrorModel& front, const MirrorModel& end, double omega) {
    return std::abs(pair_susceptibility(front, end, omega));
}

/// Golden-section minimization of |chi_e + chi_f| on [lo, hi] (rad/s).
double golden_refine(const MirrorModel& front, const MirrorModel& end, double lo,
                     double hi) {
    constexpr double inv_phi = 0.6180339887498949;
    const double tol = kRefineTolHz * kTwoPi;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = chi_sum_abs(front, end, x1);
    double f2 = chi_sum_abs(front, end, x2);
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = chi_sum_abs(front, end, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = chi_sum_abs(front, end, x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

AntiResonanceReport find_anti_resonance(const MirrorModel& front, const MirrorModel& end,
                                        double omega_lo, double omega_hi) {
    if (!(omega_lo > 0.0) || !(omega_hi > omega_lo)) {
        throw std::invalid_argument("find_anti_resonance: need 0 < lo < hi");
    }
    AntiResonanceReport report;
    report.bracket_lo_rad_s = omega_lo;
    report.bracket_hi_rad_s = omega_hi;

    const double step = kCoarseStepHz * kTwoPi;
    const size_t n = static_cast<size_t>(std::floor((omega_hi - omega_lo) / step)) + 1;
    size_t best = 0;
    double best_val = chi_sum_abs(front, end, omega_lo);
    for (size_t i = 1; i < n; ++i) {
        const double w = std::min(omega_lo + static_cast<double>(i) * step, omega_hi);
        const double v = chi_sum_abs(front, end, w);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }

    double w_best = std::min(omega_lo + static_cast<double>(best) * step, omega_hi);
    if (best == 0 || best == n - 1) {
        report.interior_minimum = false;
        report.message = "no interior minimum: |chi_e + chi_f| is smallest at a bracket edge";
        report.dip_rad_s = w_best;
        report.residual_m_per_n = best_val;
    } else {
        report.interior_minimum = true;
        const double lo = w_best - step;
        const double hi = std::min(w_best + step, omega_hi);
        report.dip_rad_s = golden_refine(front, end, lo, hi);
        report.residual_m_per_n = chi_sum_abs(front, end, report.dip_rad_s);
    }

    const double chi_f = std::abs(susceptibility(front, report.dip_rad_s));
    const double chi_e = std::abs(susceptibility(end, report.dip_rad_s));
    const double res2 = report.residual_m_per_n * report.residual_m_per_n;
    if (res2 > 0.0) {
        report.suppression_power = (chi_f * chi_f + chi_e * chi_e) / res2;
        report.suppression_amplitude = std::sqrt(report.suppression_power);
        report.suppression_vs_front_power = chi_f * chi_f / res2;
        report.suppression_vs_end_power = chi_e * chi_e / res2;
    }
    return report;
}

SensitivityCurve build_sensitivity_curve(const CavityParams& cavity, const BeamSet& beams,
                                         const MirrorModel& front, const MirrorModel& end,
                                         double temperature_k,
                                         std::vector<double> freq_rad_s) {
    beams.validate();
    if (freq_rad_s.empty()) {
        throw std::invalid_argument("build_sensitivity_curve: empty frequency grid");
    }
    if (!std::is_sorted(freq_rad_s.begin(), freq_rad_s.end()) ||
        std::adjacent_find(freq_rad_s.begin(), freq_rad_s.end()) != freq_rad_s.end()) {
        throw std::invalid_argument(
            "build_sensitivity_curve: grid must be strictly increasing");
    }

    SensitivityCurve curve;
    curve.freq_rad_s = std::move(freq_rad_s);
    const size_t n = curve.freq_rad_s.size();
    curve.shot.resize(n);
    curve.back_action.resize(n);
    curve.thermal_front.resize(n);
    curve.thermal_end.resize(n);
    curve.total.resize(n);

    curve.meta.probe_power_w = beams.probe_power_w;
    curve.meta.noise_power_w = beams.noise.power_w;
    curve.meta.noise_level_rel_shot = beams.noise.intensity_noise_rel_shot;
    curve.meta.temperature_k = temperature_k;

    if (curve.freq_rad_s.back() > cavity.bandwidth_rad_s() / 3.0) {
        curve.meta.warnings.push_back(
            "grid extends above bandwidth/3: the quasi-static cavity response is "
            "an approximation there");
    }

    const double shot = shot_noise_floor(cavity, beams.probe_power_w);
    const double f_quantum =
        back_action_force_asd(cavity, {beams.probe_power_w, 1.0});
    const double f_classical = back_action_force_asd(
        cavity, {beams.noise.power_w, beams.noise.intensity_noise_rel_shot});
    const double f_drive = std::hypot(f_quantum, f_classical);

    for (size_t i = 0; i < n; ++i) {
        const double w = curve.freq_rad_s[i];
        curve.shot[i] = shot;
        curve.back_action[i] = std::abs(pair_susceptibility(front, end, w)) * f_drive;
        curve.thermal_front[i] = thermal_noise_asd(front, temperature_k, w);
        curve.thermal_end[i] = thermal_noise_asd(end, temperature_k, w);
        curve.total[i] =
            std::sqrt(curve.shot[i] * curve.shot[i] + curve.back_action[i] * curve.back_action[i] +
                      curve.thermal_front[i] * curve.thermal_front[i] +
                      curve.thermal_end[i] * curve.thermal_end[i]);
    }
    return curve;
}

}  // namespace dualcav
