#pragma once

#include <optional>
#include <string>

#include "dualcav/budget.hpp"
#include "dualcav/campaign.hpp"
#include "dualcav/config.hpp"
#include "dualcav/fit.hpp"

namespace dualcav::cli {

struct BudgetSettings {
    double grid_lo_hz = 0.0;
    double grid_hi_hz = 0.0;
    int points = 0;
    double dip_bracket_lo_hz = 0.0;
    double dip_bracket_hi_hz = 0.0;
};

struct FitSettings {
    std::optional<DoubletGuess> guess;
    FitOptions options;
};

/// Everything a command can need, built and cross-validated from one config.
struct ModelBundle {
    CavityParams cavity;
    MirrorModel front;
    MirrorModel end;
    BeamSet beams;
    double temperature_k = 300.0;

    std::optional<CampaignConfig> campaign;
    std::optional<BudgetSettings> budget;
    FitSettings fit;
};

/// Parses and validates the whole config. Field-level problems (missing keys,
/// bad numbers, out-of-range values) throw ConfigError; cross-quantity
/// physics violations propagate as std::invalid_argument from the domain
/// constructors.
ModelBundle build_model(const Config& config);

/// Bundled scenario text by name: paper_defaults, fig2b, fig3c.
/// Returns nullptr for unknown names.
const char* scenario_text(const std::string& name);

}  // namespace dualcav::cli
