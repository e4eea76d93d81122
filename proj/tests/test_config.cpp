#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "sounder/config.hpp"
#include "sounder/io.hpp"
#include "sounder/pipeline.hpp"

using namespace sounder;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const std::string kFullConfig = R"(# two-path bench at a gentle sliding factor
schema = 1

pn.degree = 5
pn.seed = 1

rates.alpha_hz = 1.0e9
rates.beta_hz = 0.98e9   # gamma = 50

sim.oversampling = 8
sim.rng_seed = 77

channel.tap = 0 1.0 0.0
channel.tap = 10 0.5 0.0

correlator.threshold_db = 10
outputs.dir = out/two_path
)";

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string config_error_key(const std::string& text) {
    try {
        (void)parse_config(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "(no error)";
}

} // namespace

TEST_CASE("a schema-only config yields the documented defaults") {
    const auto cfg = parse_config("schema = 1\n");
    CHECK(cfg.pn_degree == 5);
    CHECK(cfg.pn_taps == 0);
    CHECK(cfg.pn_seed == 1);
    CHECK(cfg.alpha_hz == 1.0e9);
    CHECK(cfg.beta_hz == 0.995e9);
    CHECK(cfg.oversampling == 8);
    CHECK(cfg.periods == 0);
    CHECK(cfg.rng_seed == 0);
    CHECK(cfg.channel_taps.empty());
    CHECK_FALSE(cfg.snr_db.has_value());
    CHECK(cfg.lpf_bandwidth_hz == 0.0);
    CHECK(cfg.threshold_db == 20.0);
    CHECK(cfg.out_dir == "out");
    CHECK(cfg.write_csv);
    CHECK(cfg.write_json);
}

TEST_CASE("keys, comments, and repeated taps parse as written") {
    const auto cfg = parse_config(kFullConfig);
    CHECK(cfg.pn_degree == 5);
    CHECK(cfg.alpha_hz == 1.0e9);
    CHECK(cfg.beta_hz == 0.98e9);
    REQUIRE(cfg.channel_taps.size() == 2);
    CHECK(cfg.channel_taps[0] == ConfigTap{0.0, 1.0, 0.0});
    CHECK(cfg.channel_taps[1] == ConfigTap{10.0, 0.5, 0.0});
    CHECK(cfg.threshold_db == 10.0);
    CHECK(cfg.out_dir == "out/two_path");

    const auto hex = parse_config("schema = 1\npn.degree = 9\npn.taps = 0x110\n");
    CHECK(hex.pn_taps == 0x110);
    const auto dec = parse_config("schema = 1\npn.degree = 9\npn.taps = 272\n");
    CHECK(dec.pn_taps == 0x110);
}

TEST_CASE("malformed or unknown input is rejected with the key and line") {
    CHECK(config_error_key("") == "schema");
    CHECK(config_error_key("pn.degree = 5\n") == "schema");
    CHECK(config_error_key("schema = 2\n") == "schema");
    CHECK(config_error_key("schema = 1\nwhat.ever = 3\n") == "what.ever");
    CHECK(config_error_key("schema = 1\npn.degree = five\n") == "pn.degree");
    CHECK(config_error_key("schema = 1\npn.degree = 5\npn.degree = 6\n") == "pn.degree");
    CHECK(config_error_key("schema = 1\nchannel.tap = 1 2\n") == "channel.tap");
    CHECK(config_error_key("schema = 1\nsim.rng_seed = -4\n") == "sim.rng_seed");
    CHECK(config_error_key("schema = 1\noutputs.formats = xml\n") == "outputs.formats");

    try {
        (void)parse_config("schema = 1\n\nmystery.key = 3\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        CHECK(std::string(e.what()).find("mystery.key") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("schema = 1\njust a line\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("schema = 1\npn.degree =\n"), ConfigError);
}

TEST_CASE("domain invariants are revalidated with the offending key") {
    CHECK(config_error_key("schema = 1\npn.degree = 13\n") == "pn");
    CHECK(config_error_key("schema = 1\npn.degree = 6\npn.taps = 0x7\n") == "pn");
    CHECK(config_error_key("schema = 1\nrates.alpha_hz = 0\n") == "rates.alpha_hz");
    CHECK(config_error_key("schema = 1\nrates.beta_hz = 2e9\n") == "rates.beta_hz");
    CHECK(config_error_key("schema = 1\ncorrelator.lpf_bandwidth_hz = 6e6\n") ==
          "correlator.lpf_bandwidth_hz");
    CHECK(config_error_key("schema = 1\nsim.oversampling = 2\n") == "sim.oversampling");
    CHECK(config_error_key("schema = 1\nsim.periods = -1\n") == "sim.periods");
    CHECK(config_error_key("schema = 1\nchannel.tap = -3 1 0\n") == "channel.tap");
    CHECK(config_error_key("schema = 1\ncorrelator.threshold_db = 0\n") ==
          "correlator.threshold_db");
}

TEST_CASE("serialize and parse are inverses") {
    auto cfg = parse_config(kFullConfig);
    cfg.snr_db = 27.5;
    cfg.periods = 3;
    cfg.rng_seed = 0xDEADBEEFCAFEull;
    cfg.channel_taps.push_back({7.3, -0.25, 0.125});
    CHECK(parse_config(serialize_config(cfg)) == cfg);

    auto csv_only = cfg;
    csv_only.write_json = false;
    CHECK(parse_config(serialize_config(csv_only)) == csv_only);
    auto json_only = cfg;
    json_only.write_csv = false;
    CHECK(parse_config(serialize_config(json_only)) == json_only);

    const auto defaults = parse_config("schema = 1\n");
    CHECK(parse_config(serialize_config(defaults)) == defaults);
}

TEST_CASE("config files load like config text") {
    namespace fs = std::filesystem;
    const auto path = fs::temp_directory_path() / "sounder_cfg_roundtrip.cfg";
    {
        std::ofstream out(path);
        out << kFullConfig;
    }
    CHECK(parse_config_file(path.string()) == parse_config(kFullConfig));
    fs::remove(path);
    CHECK_THROWS_AS(parse_config_file(path.string()), Error);
}

TEST_CASE("seed derivation is deterministic and stage-separated") {
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFull); // reference first output
    CHECK(derive_seed(42, "channel.noise") == derive_seed(42, "channel.noise"));
    CHECK(derive_seed(42, "channel.noise") != derive_seed(42, "other.stage"));
    CHECK(derive_seed(42, "channel.noise") != derive_seed(43, "channel.noise"));
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
}

TEST_CASE("the pipeline turns a two-path config into two extracted paths") {
    const auto cfg = parse_config(kFullConfig);
    const auto result = run_sounding(cfg);

    CHECK(result.summary.sliding_factor == sliding_factor(cfg.alpha_hz, cfg.beta_hz));
    CHECK(result.summary.sliding_factor == 50.0);
    CHECK_THAT(result.summary.slide_period_s, WithinRel(50.0 * 31.0e-9, 1e-12));
    CHECK_THAT(result.summary.dilated_chip_s, WithinRel(50.0e-9, 1e-12));
    CHECK(result.summary.resolution_s == 1.0e-9);
    CHECK_THAT(result.summary.null_to_null_hz, WithinAbs(2.0e9, 2.0 * 8.0e9 / 248.0));
    CHECK(result.summary.t_zero_s >= 0.0);
    CHECK(result.summary.t_zero_s < result.summary.slide_period_s);

    REQUIRE(result.summary.path_count == 2);
    auto paths = result.paths;
    std::sort(paths.begin(), paths.end(), [](const PathEstimate& a, const PathEstimate& b) {
        return a.relative_power_db > b.relative_power_db;
    });
    const double period = 31.0e-9;
    const double wrapped = std::min(paths[0].delay_s, period - paths[0].delay_s);
    CHECK(wrapped <= 0.5e-9);
    CHECK_THAT(paths[1].delay_s - paths[0].delay_s < 0.0
                   ? paths[1].delay_s + period - paths[0].delay_s
                   : paths[1].delay_s - paths[0].delay_s,
               WithinAbs(10.0e-9, 0.5e-9));
    // at L=31 the correlation sidelobes and the lowpass time constant bias
    // the weak path low; the calibrated power checks live with the longer
    // sequences, this guards the plumbing
    CHECK(paths[1].relative_power_db > -9.5);
    CHECK(paths[1].relative_power_db < -5.0);

    CHECK(result.dilated.axis == DelayAxis::Dilated);
    CHECK(result.profile.axis == DelayAxis::TrueDelay);
}

TEST_CASE("artifact files are complete and byte-stable across runs") {
    namespace fs = std::filesystem;
    auto cfg = parse_config(kFullConfig);
    const auto dir = fs::temp_directory_path() / "sounder_artifacts";
    fs::remove_all(dir);
    cfg.out_dir = dir.string();

    const auto first = run_sounding_to_files(cfg);
    REQUIRE(first.artifacts.size() == 4);
    std::map<std::string, std::string> snapshot;
    for (const auto& path : first.artifacts) {
        REQUIRE(fs::exists(path));
        snapshot[path] = slurp(path);
    }

    const auto second = run_sounding_to_files(cfg);
    REQUIRE(second.artifacts == first.artifacts);
    for (const auto& [path, content] : snapshot)
        REQUIRE(slurp(path) == content);

    // file inventory: dilated + true-delay CSVs, paths + summary JSON
    const auto names = {"pdp_dilated.csv", "pdp.csv", "paths.json", "summary.json"};
    for (const auto* name : names)
        CHECK(fs::exists(dir / name));

    const auto summary_text = slurp((dir / "summary.json").string());
    CHECK(summary_text.find("\"sliding_factor\": 50.0") != std::string::npos);
    CHECK(summary_text.find("\"resolution_s\": 1e-09") != std::string::npos);
    const auto paths_text = slurp((dir / "paths.json").string());
    CHECK(paths_text.find("\"delay_ns\"") != std::string::npos);
    CHECK(paths_text.find("\"power_db\"") != std::string::npos);

    fs::remove_all(dir);
}

TEST_CASE("noisy runs reproduce with the seed and diverge without it") {
    auto cfg = parse_config(kFullConfig);
    cfg.snr_db = 30.0;
    const auto a = run_sounding(cfg);
    const auto b = run_sounding(cfg);
    REQUIRE(a.dilated.power == b.dilated.power);

    cfg.rng_seed += 1;
    const auto c = run_sounding(cfg);
    REQUIRE(c.dilated.power != a.dilated.power);
}

TEST_CASE("the output directory override wins over the config") {
    namespace fs = std::filesystem;
    auto cfg = parse_config("schema = 1\n");
    cfg.out_dir = (fs::temp_directory_path() / "sounder_plain").string();
    const auto override_dir = fs::temp_directory_path() / "sounder_override";
    fs::remove_all(cfg.out_dir);
    fs::remove_all(override_dir);

    REQUIRE(setenv("SOUNDER_OUT_DIR", override_dir.c_str(), 1) == 0);
    const auto result = run_sounding_to_files(cfg);
    REQUIRE(unsetenv("SOUNDER_OUT_DIR") == 0);

    CHECK(fs::exists(override_dir / "summary.json"));
    CHECK_FALSE(fs::exists(fs::path(cfg.out_dir) / "summary.json"));
    for (const auto& path : result.artifacts)
        CHECK(path.find("sounder_override") != std::string::npos);
    fs::remove_all(override_dir);
}

TEST_CASE("profile and spectrum CSV writers pin their formats") {
    PowerDelayProfile pdp;
    pdp.axis = DelayAxis::TrueDelay;
    pdp.chip_duration_s = 1.0e-9;
    pdp.time_s = {0.0, 1.0e-9, 2.0e-9};
    pdp.power = {1.0, 0.25, 0.0};
    CHECK(pdp_csv(pdp) == "delay_s,power_linear,power_db\n"
                          "0,1,0\n"
                          "1e-09,0.25,-6.02059991328\n"
                          "2e-09,0,-300\n");
    pdp.axis = DelayAxis::Dilated;
    CHECK(pdp_csv(pdp).rfind("obs_time_s,", 0) == 0);

    Spectrum spec;
    spec.freq_hz = {-1.0e9, 0.0, 1.0e9};
    spec.power = {0.5, 1.0, 0.5};
    spec.power_db = {-3.0103, 0.0, -3.0103};
    spec.bin_hz = 1.0e9;
    CHECK(spectrum_csv(spec) == "freq_hz,power_db\n"
                                "-1000000000,-3.0103\n"
                                "0,0\n"
                                "1000000000,-3.0103\n");

    const auto arr = paths_json({{5.0e-9, 0.0}, {15.0e-9, -6.0}});
    CHECK(arr.size() == 2);
    CHECK(arr[0]["delay_ns"] == 5.0);
    CHECK(arr[1]["power_db"] == -6.0);
}
