#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace dualcav::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;   // malformed config / unreadable input
inline constexpr int kExitPhysics = 3;  // physics invariant violation

struct CommandContext {
    std::string config_path;  // mutually exclusive with scenario
    std::string scenario;
    std::string out_dir;
    std::optional<uint64_t> seed_override;
    bool no_plot = false;
    std::string trace_path;  // fit only
};

int cmd_budget(const CommandContext& ctx);
int cmd_campaign(const CommandContext& ctx);
int cmd_fit(const CommandContext& ctx);

}  // namespace dualcav::cli
