#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dualcav/commands.hpp"
#include "dualcav/config.hpp"
#include "dualcav/constants.hpp"
#include "dualcav/model_build.hpp"
#include "dualcav/report.hpp"

using namespace dualcav;
using namespace dualcav::cli;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("dualcav_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << content;
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string(DUALCAV_BIN) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config parser: sections, repeats, comments, diagnostics") {
    const std::string text =
        "# comment\n"
        "[a]\n"
        "x = 1.5  # trailing comment\n"
        "[b.c]\n"
        "y = hello\n"
        "[b.c]\n"
        "y = world\n";
    const Config cfg = Config::parse(text, "t");
    REQUIRE(cfg.unique_section("a") != nullptr);
    CHECK(Config::get_double(*cfg.unique_section("a"), "x") == 1.5);
    CHECK(cfg.sections("b.c").size() == 2);
    CHECK(Config::get_string(*cfg.sections("b.c")[1], "y") == "world");
    CHECK_THROWS_AS(cfg.unique_section("b.c"), ConfigError);

    try {
        Config::parse("[a]\nnot a pair\n", "t");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
        CHECK(std::string(e.what()).find("t:2") != std::string::npos);
    }
    CHECK_THROWS_AS(Config::parse("x = 1\n", "t"), ConfigError);          // key outside section
    CHECK_THROWS_AS(Config::parse("[a]\nx = 1\nx = 2\n", "t"), ConfigError);  // duplicate
    CHECK_THROWS_AS(Config::parse("[a\nx = 1\n", "t"), ConfigError);      // bad header
    CHECK_THROWS_AS(Config::parse("[a]\nx =\n", "t"), ConfigError);       // empty value

    try {
        const Config bad = Config::parse("[a]\nx = 12q\n", "t");
        Config::get_double(*bad.unique_section("a"), "x");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("'x'") != std::string::npos);
        CHECK(e.line == 2);
    }
}

TEST_CASE("fnv1a64 digest matches known vectors") {
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
    CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a64_hex("ab") != fnv1a64_hex("ba"));
}

TEST_CASE("scenario presets parse and build") {
    for (const char* name : {"paper_defaults", "fig2b", "fig3c"}) {
        INFO(name);
        const char* text = scenario_text(name);
        REQUIRE(text != nullptr);
        const Config cfg = Config::parse(text, name);
        CHECK_NOTHROW(build_model(cfg));
    }
    CHECK(scenario_text("nope") == nullptr);

    const auto fig2b = build_model(Config::parse(scenario_text("fig2b"), "fig2b"));
    CHECK(fig2b.beams.noise.intensity_noise_rel_shot > 1e4);
    REQUIRE(fig2b.campaign.has_value());

    const auto fig3c = build_model(Config::parse(scenario_text("fig3c"), "fig3c"));
    REQUIRE(fig3c.beams.signal.has_value());
    CHECK(fig3c.beams.signal->amplitude > 0.0);
    // The derived signal frequency sits at the primary cancellation dip.
    CHECK(fig3c.beams.signal->frequency_rad_s / kTwoPi ==
          doctest::Approx(710429.4).epsilon(1e-5));
}

TEST_CASE("shipped preset files are identical to the built-in scenarios") {
    const fs::path presets = fs::path(DUALCAV_SOURCE_DIR) / "presets";
    for (const char* name : {"paper_defaults", "fig2b", "fig3c"}) {
        INFO(name);
        CHECK(slurp(presets / (std::string(name) + ".cfg")) == scenario_text(name));
    }
}

TEST_CASE("build_model diagnostics name the offending field") {
    std::string text = scenario_text("paper_defaults");
    // Zero finesse must be rejected at the config layer with the field named.
    const auto pos = text.find("finesse = 230000");
    REQUIRE(pos != std::string::npos);
    std::string broken = text;
    broken.replace(pos, 16, "finesse = 0     ");
    try {
        build_model(Config::parse(broken, "t"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("finesse") != std::string::npos);
    }

    // Unknown keys are typo-detected.
    std::string stray = text;
    stray += "\n[cavity]\n";  // duplicate section is also an error
    CHECK_THROWS_AS(build_model(Config::parse(stray, "t")), ConfigError);
    std::string unknown = text;
    unknown.insert(unknown.find("[environment]"), "[cavity2]\nfoo = 1\n");
    CHECK_THROWS_AS(build_model(Config::parse(unknown, "t")), ConfigError);

    // A measured bandwidth off by more than 5% violates a physics invariant.
    std::string bad_bw = text;
    bad_bw.insert(bad_bw.find("[environment]"), "");
    const auto cav_pos = bad_bw.find("length_m = 0.25e-3");
    bad_bw.insert(cav_pos + 18 + 1, "bandwidth_hz = 1.0e6\n");
    CHECK_THROWS_AS(build_model(Config::parse(bad_bw, "t")), std::invalid_argument);
}

TEST_CASE("trace CSV round trip and error paths") {
    SpectrumTrace trace;
    trace.freq_hz = {1.0, 2.0, 3.5};
    trace.asd = {1e-17, 2.5e-17, 0.8e-17};
    const std::string text = trace_csv(trace);
    const SpectrumTrace back = read_trace_csv_text(text, "mem");
    REQUIRE(back.freq_hz.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(back.freq_hz[i] == doctest::Approx(trace.freq_hz[i]).epsilon(1e-9));
        CHECK(back.asd[i] == doctest::Approx(trace.asd[i]).epsilon(1e-9));
    }

    CHECK_THROWS_AS(read_trace_csv_text("", "mem"), ConfigError);
    CHECK_THROWS_AS(read_trace_csv_text("wrong,header\n1,2\n", "mem"), ConfigError);
    CHECK_THROWS_AS(
        read_trace_csv_text("freq_hz,asd_m_per_sqrt_hz\n1,2\nbad line\n", "mem"),
        ConfigError);
    CHECK_THROWS_AS(read_trace_csv_text("freq_hz,asd_m_per_sqrt_hz\n2,1\n1,2\n", "mem"),
                    ConfigError);
    CHECK_THROWS_AS(read_trace_csv_text("freq_hz,asd_m_per_sqrt_hz\n1,2\n", "mem"),
                    ConfigError);
}

TEST_CASE("csv schemas are pinned") {
    SensitivityCurve curve;
    curve.freq_rad_s = {kTwoPi};
    curve.shot = {1.0};
    curve.back_action = {2.0};
    curve.thermal_front = {3.0};
    curve.thermal_end = {4.0};
    curve.total = {5.0};
    const std::string text = budget_csv(curve);
    CHECK(text.rfind("freq_hz,shot,back_action,thermal_front,thermal_end,total\n", 0) == 0);
    CHECK(text.find("\n1,1,2,3,4,5\n") != std::string::npos);
}

TEST_CASE("atomic write leaves no temp file") {
    const fs::path dir = fresh_dir("atomic");
    atomic_write_file((dir / "x.txt").string(), "payload");
    CHECK(slurp(dir / "x.txt") == "payload");
    CHECK_FALSE(fs::exists(dir / "x.txt.tmp"));
    fs::remove_all(dir);
}

TEST_CASE("cmd_budget: outputs, self-consistency, determinism") {
    const fs::path dir = fresh_dir("budget");
    CommandContext ctx;
    ctx.scenario = "paper_defaults";
    ctx.out_dir = dir.string();
    REQUIRE(cmd_budget(ctx) == kExitOk);
    for (const char* name : {"budget.csv", "budget_report.json", "budget.svg",
                             "manifest.json"}) {
        INFO(name);
        CHECK(fs::exists(dir / name));
    }

    // The CSV's back-action dip row agrees with the report's refined dip.
    const auto report = nlohmann::json::parse(slurp(dir / "budget_report.json"));
    const double dip_hz = report["anti_resonance"]["freq_hz"].get<double>();
    std::istringstream csv(slurp(dir / "budget.csv"));
    std::string line;
    std::getline(csv, line);  // header
    double best_freq = 0.0, best_ba = 1e300;
    double lo = report["anti_resonance"]["bracket_lo_hz"].get<double>();
    double hi = report["anti_resonance"]["bracket_hi_hz"].get<double>();
    while (std::getline(csv, line)) {
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        const double freq = std::stod(cell);
        std::getline(row, cell, ',');  // shot
        std::getline(row, cell, ',');  // back_action
        const double ba = std::stod(cell);
        if (freq >= lo && freq <= hi && ba < best_ba) {
            best_ba = ba;
            best_freq = freq;
        }
    }
    CHECK(std::abs(best_freq - dip_hz) <= 10.1);  // within one 10 Hz grid step

    // Manifest digest matches a recomputation over the scenario text.
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["config_digest"].get<std::string>() ==
          fnv1a64_hex(scenario_text("paper_defaults")));

    // Byte-identical rerun.
    const std::string first = slurp(dir / "budget.csv");
    const fs::path dir2 = fresh_dir("budget2");
    ctx.out_dir = dir2.string();
    REQUIRE(cmd_budget(ctx) == kExitOk);
    CHECK(slurp(dir2 / "budget.csv") == first);
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("cmd_campaign: determinism, seed override, reports") {
    const fs::path dir_a = fresh_dir("campaign_a");
    const fs::path dir_b = fresh_dir("campaign_b");
    CommandContext ctx;
    ctx.scenario = "fig2b";
    ctx.no_plot = true;
    ctx.out_dir = dir_a.string();
    REQUIRE(cmd_campaign(ctx) == kExitOk);
    ctx.out_dir = dir_b.string();
    REQUIRE(cmd_campaign(ctx) == kExitOk);
    CHECK(slurp(dir_a / "campaign.csv") == slurp(dir_b / "campaign.csv"));
    CHECK_FALSE(fs::exists(dir_a / "campaign.svg"));

    // Header is the stable channel schema.
    const std::string csv = slurp(dir_a / "campaign.csv");
    CHECK(csv.rfind("freq_hz,measured,thermal_only,back_action_only,signal_only,"
                    "individual_front,individual_end\n",
                    0) == 0);

    // Seed override changes the data and is echoed in the manifest.
    const fs::path dir_c = fresh_dir("campaign_c");
    ctx.out_dir = dir_c.string();
    ctx.seed_override = 99;
    REQUIRE(cmd_campaign(ctx) == kExitOk);
    CHECK(slurp(dir_c / "campaign.csv") != slurp(dir_a / "campaign.csv"));
    const auto manifest = nlohmann::json::parse(slurp(dir_c / "manifest.json"));
    CHECK(manifest["seed"].get<uint64_t>() == 99);

    const auto report = nlohmann::json::parse(slurp(dir_a / "campaign_report.json"));
    CHECK(report["dip"]["suppression_power"].get<double>() > 20.0);
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    fs::remove_all(dir_c);
}

TEST_CASE("cmd_fit: campaign thermal trace round-trips within 3%") {
    // Synthesize the thermal-only measurement through the campaign command,
    // then feed the measured channel back through the fit command. The upper
    // resonance is only ~34 Hz wide, so the round trip uses a finer RBW and
    // more averages than the stock scenario to pin its quality factor.
    const fs::path dir = fresh_dir("fit_e2e");
    std::string cfg_text = scenario_text("paper_defaults");
    const auto patch = [&](const std::string& from, const std::string& to) {
        const size_t pos = cfg_text.find(from);
        REQUIRE(pos != std::string::npos);
        cfg_text.replace(pos, from.size(), to);
    };
    patch("rbw_hz = 10", "rbw_hz = 2");
    patch("averages = 100", "averages = 200");
    patch("oversample = 34", "oversample = 8");
    spit(dir / "fine.cfg", cfg_text);

    CommandContext campaign_ctx;
    campaign_ctx.config_path = (dir / "fine.cfg").string();
    campaign_ctx.out_dir = dir.string();
    campaign_ctx.no_plot = true;
    REQUIRE(cmd_campaign(campaign_ctx) == kExitOk);

    // Extract freq_hz and the measured column into a fit-ready CSV.
    std::istringstream csv(slurp(dir / "campaign.csv"));
    std::string line;
    std::getline(csv, line);
    std::ostringstream trace;
    trace << "freq_hz,asd_m_per_sqrt_hz\n";
    while (std::getline(csv, line)) {
        const size_t c1 = line.find(',');
        const size_t c2 = line.find(',', c1 + 1);
        trace << line.substr(0, c1) << ',' << line.substr(c1 + 1, c2 - c1 - 1) << '\n';
    }
    spit(dir / "thermal_trace.csv", trace.str());

    CommandContext fit_ctx;
    fit_ctx.config_path = (dir / "fine.cfg").string();
    fit_ctx.out_dir = dir.string();
    fit_ctx.trace_path = (dir / "thermal_trace.csv").string();
    fit_ctx.no_plot = true;
    REQUIRE(cmd_fit(fit_ctx) == kExitOk);

    const auto result = nlohmann::json::parse(slurp(dir / "fit_result.json"));
    CHECK(result["converged"].get<bool>());
    CHECK(result["params"]["freq_front_hz"].get<double>() ==
          doctest::Approx(710.1e3).epsilon(0.03));
    CHECK(result["params"]["freq_end_hz"].get<double>() ==
          doctest::Approx(710.9e3).epsilon(0.03));
    CHECK(result["params"]["mass_front_kg"].get<double>() ==
          doctest::Approx(0.64e-3).epsilon(0.03));
    CHECK(result["params"]["mass_end_kg"].get<double>() ==
          doctest::Approx(0.84e-3).epsilon(0.03));
    CHECK(result["params"]["q_front"].get<double>() ==
          doctest::Approx(10500.0).epsilon(0.03));
    CHECK(result["params"]["q_end"].get<double>() ==
          doctest::Approx(21500.0).epsilon(0.03));
    fs::remove_all(dir);
}

TEST_CASE("cmd_fit: empty CSV exits 2, huge values warn but still fit") {
    const fs::path dir = fresh_dir("fit_err");
    spit(dir / "empty.csv", "");
    CommandContext ctx;
    ctx.scenario = "paper_defaults";
    ctx.out_dir = dir.string();
    ctx.no_plot = true;
    ctx.trace_path = (dir / "empty.csv").string();
    CHECK(cmd_fit(ctx) == kExitConfig);

    // Same doublet scaled into absurd units: warn, attempt, exit 0.
    std::ostringstream trace;
    trace << "freq_hz,asd_m_per_sqrt_hz\n";
    for (double nu = 709.5e3; nu <= 712.5e3; nu += 10.0) {
        trace << nu << ',' << 1e6 * (1.0 + 0.1 * std::sin(nu)) << '\n';
    }
    spit(dir / "wrong_units.csv", trace.str());
    ctx.trace_path = (dir / "wrong_units.csv").string();
    CHECK(cmd_fit(ctx) == kExitOk);
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    bool warned = false;
    for (const auto& w : manifest["warnings"]) {
        if (w.get<std::string>().find("units") != std::string::npos) warned = true;
    }
    CHECK(warned);
    const auto result = nlohmann::json::parse(slurp(dir / "fit_result.json"));
    CHECK(result.contains("converged"));  // analysis outcome, not a tool failure
    fs::remove_all(dir);
}

TEST_CASE("command errors: missing sections and unknown scenario") {
    const fs::path dir = fresh_dir("cmd_err");
    CommandContext ctx;
    ctx.scenario = "does_not_exist";
    ctx.out_dir = dir.string();
    CHECK(cmd_budget(ctx) == kExitConfig);

    // A config without [campaign] cannot run a campaign.
    std::string text = scenario_text("paper_defaults");
    const size_t pos = text.find("[campaign]");
    const size_t end = text.find("[budget]");
    text.erase(pos, end - pos);
    spit(dir / "no_campaign.cfg", text);
    ctx = CommandContext{};
    ctx.config_path = (dir / "no_campaign.cfg").string();
    ctx.out_dir = dir.string();
    CHECK(cmd_campaign(ctx) == kExitConfig);
    fs::remove_all(dir);
}

TEST_CASE("binary smoke test: exit codes through the real CLI") {
    const fs::path dir = fresh_dir("binary");
    CHECK(run_binary("budget --scenario paper_defaults --out " + (dir / "ok").string() +
                     " --no-plot") == 0);
    CHECK(fs::exists(dir / "ok" / "budget.csv"));

    spit(dir / "broken.cfg", "[cavity]\nwavelength_m = oops\n");
    CHECK(run_binary("budget --config " + (dir / "broken.cfg").string() + " --out " +
                     (dir / "bad").string()) == 2);

    // Physics violation: supplied bandwidth 23% off the derived value.
    std::string text = scenario_text("paper_defaults");
    text.insert(text.find("[environment]"), "");
    const auto cav_pos = text.find("length_m = 0.25e-3");
    text.insert(cav_pos + 19, "bandwidth_hz = 1.0e6\n");
    spit(dir / "bad_bw.cfg", text);
    CHECK(run_binary("budget --config " + (dir / "bad_bw.cfg").string() + " --out " +
                     (dir / "bw").string()) == 3);

    CHECK(run_binary("campaign --scenario fig2b --seed 7 --out " +
                     (dir / "camp").string() + " --no-plot") == 0);
    CHECK(run_binary("nonsense") != 0);
    fs::remove_all(dir);
}
