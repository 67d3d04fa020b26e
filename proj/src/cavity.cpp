#include "dualcav/cavity.hpp"

#include <cmath>
#include <stdexcept>

#include "dualcav/constants.hpp"

namespace dualcav {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

CavityParams::CavityParams(double wavelength, double f, double length,
                           std::optional<double> measured_bandwidth_rad_s)
    : wavelength_m(wavelength), finesse(f), length_m(length) {
    require(std::isfinite(wavelength) && wavelength > 0.0, "CavityParams: wavelength must be > 0");
    require(std::isfinite(f) && f > 0.0, "CavityParams: finesse must be > 0");
    require(std::isfinite(length) && length > 0.0, "CavityParams: length must be > 0");
    if (measured_bandwidth_rad_s) {
        const double derived = bandwidth_rad_s();
        const double rel = std::abs(*measured_bandwidth_rad_s - derived) / derived;
        require(rel <= 0.05,
                "CavityParams: supplied bandwidth disagrees with c/(4FL) by more than 5%");
    }
}

double CavityParams::wavevector_rad_m() const { return kTwoPi / wavelength_m; }

double CavityParams::bandwidth_rad_s() const {
    return kTwoPi * kSI.c / (4.0 * finesse * length_m);
}

double CavityParams::photon_energy_j() const {
    return kSI.hbar * kTwoPi * kSI.c / wavelength_m;
}

double CavityParams::optical_frequency_hz() const { return kSI.c / wavelength_m; }

double CavityParams::photon_flux(double power_w) const {
    return power_w / photon_energy_j();
}

void BeamSet::validate() const {
    require(std::isfinite(probe_power_w) && probe_power_w >= 0.0,
            "BeamSet: probe power must be >= 0");
    require(std::isfinite(noise.power_w) && noise.power_w >= 0.0,
            "BeamSet: noise beam power must be >= 0");
    require(std::isfinite(noise.intensity_noise_rel_shot) && noise.intensity_noise_rel_shot >= 0.0,
            "BeamSet: noise beam intensity noise level must be >= 0");
    if (signal) {
        require(std::isfinite(signal->amplitude) && signal->amplitude >= 0.0,
                "BeamSet: signal amplitude must be >= 0");
        require(std::isfinite(signal->frequency_rad_s) && signal->frequency_rad_s > 0.0,
                "BeamSet: signal frequency must be > 0");
    }
}

double homodyne_readout_gain(const CavityParams& cavity, double probe_power_w) {
    if (!(probe_power_w > 0.0)) {
        throw std::invalid_argument("homodyne_readout_gain: probe power must be > 0");
    }
    const double flux = cavity.photon_flux(probe_power_w);
    return 16.0 * cavity.finesse * std::sqrt(flux) / cavity.wavelength_m;
}

double intracavity_force_coupling(const CavityParams& cavity,
                                  double incident_intensity_fluct) {
    const double buildup = 2.0 * cavity.finesse / std::numbers::pi;
    return 2.0 * kSI.hbar * cavity.wavevector_rad_m() * buildup * incident_intensity_fluct;
}

double frequency_modulation_to_length(const CavityParams& cavity, double dnu_hz) {
    if (!std::isfinite(dnu_hz)) {
        throw std::invalid_argument("frequency_modulation_to_length: dnu must be finite");
    }
    return cavity.length_m * dnu_hz / cavity.optical_frequency_hz();
}

}  // namespace dualcav
