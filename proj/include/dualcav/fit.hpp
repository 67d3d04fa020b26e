#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dualcav/budget.hpp"
#include "dualcav/spectrum.hpp"

namespace dualcav {

/// Starting point for the thermal-doublet fit. Frequencies in rad/s.
struct DoubletGuess {
    double freq_front_rad_s = 0.0;
    double freq_end_rad_s = 0.0;
    double mass_front_kg = 0.0;
    double mass_end_kg = 0.0;
    double q_front = 0.0;
    double q_end = 0.0;
    double floor_asd = 0.0;
};

struct FitOptions {
    double param_tol = 1e-6;      // relative step for convergence
    int max_iterations = 200;
    double initial_damping = 1e-3;
    double averages = 1.0;        // periodogram averages behind the trace
    /// Frequency ranges (Hz) excluded from the fit, e.g. a neighboring doublet.
    std::vector<std::pair<double, double>> mask_hz;
    /// Width over which the model PSD is averaged per bin. nullopt = infer the
    /// grid spacing (analyzer-binned data); 0 = evaluate pointwise.
    std::optional<double> bin_width_hz;
};

struct FitResult {
    double freq_front_rad_s = 0.0;
    double freq_end_rad_s = 0.0;
    double mass_front_kg = 0.0;
    double mass_end_kg = 0.0;
    double q_front = 0.0;
    double q_end = 0.0;
    double floor_asd = 0.0;

    double residual_norm = 0.0;  // sqrt(mean weighted squared relative residual)
    int iterations = 0;
    bool converged = false;
    bool identifiable = true;
    std::string message;

    // 1-sigma proxies from the normal equations at the solution.
    double sigma_freq_front_rad_s = 0.0;
    double sigma_freq_end_rad_s = 0.0;
    double sigma_rel_mass_front = 0.0;
    double sigma_rel_mass_end = 0.0;
    double sigma_rel_q_front = 0.0;
    double sigma_rel_q_end = 0.0;
    double sigma_floor_asd = 0.0;
};

/// Weighted nonlinear least squares of the two-mode thermal model
/// sqrt(asd_front^2 + asd_end^2 + floor^2) against the trace. Masses and
/// quality factors are fitted in log space; weights follow the multiplicative
/// noise model of averaged periodograms (variance ~ value^2 / averages) with
/// per-bin-width normalization. Non-convergence is reported in the result,
/// not thrown; near-singular normal equations mark the fit non-identifiable.
FitResult fit_thermal_doublet(const SpectrumTrace& trace, double temperature_k,
                              const DoubletGuess& guess, const FitOptions& options = {});

/// Peak-picking starting point for traces containing a visible doublet.
/// Throws std::invalid_argument when two separated peaks cannot be found.
DoubletGuess auto_guess(const SpectrumTrace& trace, double temperature_k);

/// Locates the cancellation dip of a measured back-action trace between the
/// two resonance peaks (taken from the individual-response channels) and
/// reports the suppression at that bin as a PSD ratio:
/// (ind_front^2 + ind_end^2) / measured^2.
AntiResonanceReport measure_dip(const SpectrumTrace& measured,
                                const SpectrumTrace& individual_front,
                                const SpectrumTrace& individual_end);

/// Smallest trace value on bins with lo_hz <= freq <= hi_hz.
/// interior=false when the minimum sits at the range edge.
struct TraceMinimum {
    double freq_hz = 0.0;
    double value = 0.0;
    bool interior = false;
};
TraceMinimum trace_local_minimum(const SpectrumTrace& trace, double lo_hz, double hi_hz);

/// Signal-to-noise ratio of a monochromatic line the way it is read off an
/// analyzer trace: PSD of the line's bin over the median PSD of the
/// immediately adjacent bins.
struct LineSnr {
    double snr_power = 0.0;
    double floor_asd = 0.0;
    double bin_freq_hz = 0.0;
};
LineSnr measure_line_snr(const SpectrumTrace& trace, double line_freq_rad_s);

}  // namespace dualcav
