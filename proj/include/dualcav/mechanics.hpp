#pragma once

#include <complex>
#include <string>
#include <vector>

namespace dualcav {

using Complex = std::complex<double>;

/// One internal vibration mode of a mirror: a damped harmonic resonance plus
/// a constant complex background standing in for all out-of-band modes.
struct MechanicalMode {
    double resonance_rad_s;    // mode angular frequency, > 0
    double effective_mass_kg;  // mass seen by the optical spot, > 0
    double quality;            // mechanical quality factor, > 0
    Complex background_m_per_n{0.0, 0.0};

    MechanicalMode(double resonance_rad_s, double effective_mass_kg, double quality,
                   Complex background_m_per_n = {0.0, 0.0});

    double resonance_hz() const;
    /// Half-power full width of the resonance, rad/s.
    double linewidth_rad_s() const { return resonance_rad_s / quality; }
};

enum class MirrorSide { Front, End };

std::string to_string(MirrorSide side);

/// A mirror described by its in-band modes, ordered by strictly increasing
/// resonance frequency.
struct MirrorModel {
    MirrorSide side;
    std::vector<MechanicalMode> modes;

    MirrorModel(MirrorSide side, std::vector<MechanicalMode> modes);
};

/// Mechanical susceptibility of a single mode (m/N), Lorentzian plus background.
/// Valid for any finite frequency; the model is meaningful near the resonance band.
Complex susceptibility(const MechanicalMode& mode, double omega_rad_s);

/// Mirror susceptibility: sum over the mirror's modes.
Complex susceptibility(const MirrorModel& mirror, double omega_rad_s);

/// Summed response of the mirror pair to the intracavity radiation pressure.
/// The opposite force directions on the two mirrors make their displacement
/// contributions to the measured length add through chi_e + chi_f.
Complex pair_susceptibility(const MirrorModel& front, const MirrorModel& end,
                            double omega_rad_s);

}  // namespace dualcav
