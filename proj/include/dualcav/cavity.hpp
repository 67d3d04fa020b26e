#pragma once

#include <optional>

#include "dualcav/mechanics.hpp"

namespace dualcav {

/// Single-port lossless Fabry-Perot cavity held at resonance.
struct CavityParams {
    double wavelength_m;
    double finesse;
    double length_m;

    /// If a measured bandwidth is supplied it is cross-checked against the
    /// value derived from finesse and length (5% tolerance, else rejected).
    CavityParams(double wavelength_m, double finesse, double length_m,
                 std::optional<double> measured_bandwidth_rad_s = std::nullopt);

    double wavevector_rad_m() const;     // 2*pi / lambda
    double bandwidth_rad_s() const;      // 2*pi * c / (4 F L)
    double photon_energy_j() const;      // hbar * 2*pi*c / lambda
    double optical_frequency_hz() const; // c / lambda

    /// Incident power expressed as a photon flux (photons/s).
    double photon_flux(double power_w) const;
};

struct NoiseBeam {
    double power_w = 0.0;
    /// Intensity noise of the beam relative to its own shot-noise level
    /// (1 = coherent beam, 0 = beam off / perfectly quiet).
    double intensity_noise_rel_shot = 0.0;
};

enum class SignalTarget { CavityLength, ForceOnFront, ForceOnEnd };

struct SignalDrive {
    SignalTarget target;
    double amplitude;  // m (RMS) for CavityLength, N (RMS) for force targets
    double frequency_rad_s;
};

struct BeamSet {
    double probe_power_w = 0.0;
    NoiseBeam noise;
    std::optional<SignalDrive> signal;

    void validate() const;  // throws std::invalid_argument on violation
};

/// Phase-quadrature gain of the on-resonance readout: d(q_out)/d(L) = 16 F sqrt(I_in) / lambda.
/// Valid well below the cavity bandwidth; callers working above bandwidth/3
/// are expected to surface the validity warning to their output.
double homodyne_readout_gain(const CavityParams& cavity, double probe_power_w);

/// Radiation-pressure force ASD on each mirror produced by an incident
/// intensity fluctuation (in sqrt(photons/s) units, per sqrt(Hz)):
/// 2*hbar*k * (2F/pi) * dI. The resonant single-port buildup 2F/pi converts
/// incident fluctuations into intracavity ones.
double intracavity_force_coupling(const CavityParams& cavity,
                                  double incident_intensity_fluct);

/// Apparent cavity-length change equivalent to a laser frequency offset:
/// dL = L * dnu / nu.
double frequency_modulation_to_length(const CavityParams& cavity, double dnu_hz);

}  // namespace dualcav
