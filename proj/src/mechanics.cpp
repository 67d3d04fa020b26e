#include "dualcav/mechanics.hpp"

#include <cmath>
#include <stdexcept>

#include "dualcav/constants.hpp"

namespace dualcav {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

MechanicalMode::MechanicalMode(double resonance, double mass, double q, Complex background)
    : resonance_rad_s(resonance),
      effective_mass_kg(mass),
      quality(q),
      background_m_per_n(background) {
    require(std::isfinite(resonance) && resonance > 0.0,
            "MechanicalMode: resonance frequency must be > 0");
    require(std::isfinite(mass) && mass > 0.0, "MechanicalMode: effective mass must be > 0");
    require(std::isfinite(q) && q > 0.0, "MechanicalMode: quality factor must be > 0");
    require(std::isfinite(background.real()) && std::isfinite(background.imag()),
            "MechanicalMode: background susceptibility must be finite");
    // Dissipative sign convention: a background with Im < 0 would describe gain,
    // and the thermal spectra derived from it would be negative.
    require(background.imag() >= 0.0,
            "MechanicalMode: background susceptibility must have Im >= 0");
}

double MechanicalMode::resonance_hz() const { return resonance_rad_s / kTwoPi; }

std::string to_string(MirrorSide side) {
    return side == MirrorSide::Front ? "front" : "end";
}

MirrorModel::MirrorModel(MirrorSide s, std::vector<MechanicalMode> m)
    : side(s), modes(std::move(m)) {
    require(!modes.empty(), "MirrorModel: at least one mode required");
    for (size_t i = 1; i < modes.size(); ++i) {
        require(modes[i].resonance_rad_s > modes[i - 1].resonance_rad_s,
                "MirrorModel: mode frequencies must be strictly increasing");
    }
}

Complex susceptibility(const MechanicalMode& mode, double omega_rad_s) {
    const double w0 = mode.resonance_rad_s;
    const Complex denom(w0 * w0 - omega_rad_s * omega_rad_s,
                        -omega_rad_s * w0 / mode.quality);
    return 1.0 / (mode.effective_mass_kg * denom) + mode.background_m_per_n;
}

Complex susceptibility(const MirrorModel& mirror, double omega_rad_s) {
    Complex sum{0.0, 0.0};
    for (const auto& mode : mirror.modes) sum += susceptibility(mode, omega_rad_s);
    return sum;
}

Complex pair_susceptibility(const MirrorModel& front, const MirrorModel& end,
                            double omega_rad_s) {
    return susceptibility(front, omega_rad_s) + susceptibility(end, omega_rad_s);
}

}  // namespace dualcav
