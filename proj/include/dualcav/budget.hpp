#pragma once

#include <string>
#include <vector>

#include "dualcav/cavity.hpp"
#include "dualcav/mechanics.hpp"

namespace dualcav {

/// Intensity-noise source driving the intracavity radiation pressure: either
/// the probe's own quantum fluctuations (level 1) or a classical noise beam
/// with an elevated level.
struct IntensityNoiseDrive {
    double power_w;
    double level_rel_shot = 1.0;
};

/// Frequency-independent shot-noise-limited displacement sensitivity,
/// lambda / (16 F sqrt(I_in)), in m/sqrt(Hz).
double shot_noise_floor(const CavityParams& cavity, double probe_power_w);

/// Radiation-pressure force ASD on each mirror from an intensity-noise drive,
/// in N/sqrt(Hz). Scales linearly with the drive's noise level.
double back_action_force_asd(const CavityParams& cavity, const IntensityNoiseDrive& drive);

/// Back-action-limited displacement sensitivity |chi_e + chi_f| * 4 hbar k F
/// sqrt(I_in) / pi, in m/sqrt(Hz).
double back_action_noise(const CavityParams& cavity, const IntensityNoiseDrive& drive,
                         const MirrorModel& front, const MirrorModel& end,
                         double omega_rad_s);

/// Power-optimized displacement sensitivity sqrt(hbar |chi_e + chi_f|), the
/// quantum limit of the dual-resonator readout, in m/sqrt(Hz).
double quantum_optimal_sensitivity(const MirrorModel& front, const MirrorModel& end,
                                   double omega_rad_s);

/// Probe power (W) at which the shot-noise floor equals the back-action noise
/// at the given frequency; the quadrature total there equals
/// quantum_optimal_sensitivity.
double optimal_power(const CavityParams& cavity, const MirrorModel& front,
                     const MirrorModel& end, double omega_rad_s);

/// Thermal displacement ASD of one mode (or a whole mirror) at temperature T,
/// sqrt(4 k_B T Im chi(omega) / omega), in m/sqrt(Hz). Single-sided density;
/// total variance is the integral over omega/(2*pi).
double thermal_noise_asd(const MechanicalMode& mode, double temperature_k,
                         double omega_rad_s);
double thermal_noise_asd(const MirrorModel& mirror, double temperature_k,
                         double omega_rad_s);

/// Standard quantum limit of force sensing with a single resonator,
/// sqrt(hbar / |chi|), in N/sqrt(Hz).
double force_sql(const MechanicalMode& mode, double omega_rad_s);
double force_sql(const MirrorModel& mirror, double omega_rad_s);

/// Force sensitivity of the sensor mirror when the cavity readout benefits
/// from pair cancellation: sqrt(hbar |chi_e + chi_f|) / |chi_sensor|.
double force_min_with_cancellation(const MirrorModel& front, const MirrorModel& end,
                                   MirrorSide sensor, double omega_rad_s);

/// Result of a cancellation-dip search over |chi_e + chi_f|.
///
/// Suppression factors are ratios of power spectral densities (the squared
/// ASD ratio), the convention in which spectrum-analyzer dip depths are read.
/// The amplitude-ratio value is reported alongside.
struct AntiResonanceReport {
    double dip_rad_s = 0.0;           // located minimum of |chi_e + chi_f|
    double residual_m_per_n = 0.0;    // |chi_e + chi_f| at the dip
    double suppression_power = 1.0;   // (|chi_e|^2 + |chi_f|^2) / |chi_sum|^2
    double suppression_amplitude = 1.0;
    double suppression_vs_front_power = 1.0;  // |chi_f|^2 / |chi_sum|^2
    double suppression_vs_end_power = 1.0;    // |chi_e|^2 / |chi_sum|^2
    double bracket_lo_rad_s = 0.0;
    double bracket_hi_rad_s = 0.0;
    bool interior_minimum = false;
    std::string message;
};

/// Locates the minimum of |chi_e + chi_f| inside [lo, hi]: coarse scan at
/// 1 Hz steps, then golden-section refinement to 1e-3 Hz. A minimum sitting
/// at a bracket edge is reported with interior_minimum = false.
AntiResonanceReport find_anti_resonance(const MirrorModel& front, const MirrorModel& end,
                                        double omega_lo_rad_s, double omega_hi_rad_s);

/// Quantum + thermal sensitivity budget over a frequency grid.
struct SensitivityCurve {
    std::vector<double> freq_rad_s;  // strictly increasing
    std::vector<double> shot;        // all channels in m/sqrt(Hz)
    std::vector<double> back_action;
    std::vector<double> thermal_front;
    std::vector<double> thermal_end;
    std::vector<double> total;

    struct Meta {
        double probe_power_w = 0.0;
        double noise_power_w = 0.0;
        double noise_level_rel_shot = 0.0;
        double temperature_k = 0.0;
        std::string unit = "m/sqrt(Hz)";
        std::vector<std::string> warnings;
    } meta;
};

/// Builds the budget on the given grid. The back-action channel combines the
/// probe's quantum drive with the classical noise beam (quadrature sum of the
/// two independent intensity-noise processes).
SensitivityCurve build_sensitivity_curve(const CavityParams& cavity, const BeamSet& beams,
                                         const MirrorModel& front, const MirrorModel& end,
                                         double temperature_k,
                                         std::vector<double> freq_rad_s);

}  // namespace dualcav
