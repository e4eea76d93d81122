#include <cstdio>
#include <future>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sounder/config.hpp"
#include "sounder/io.hpp"
#include "sounder/pcb.hpp"
#include "sounder/peripherals.hpp"
#include "sounder/pipeline.hpp"
#include "sounder/pn.hpp"
#include "sounder/waveform.hpp"

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt2(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::uint32_t parse_taps_flag(const std::string& text) {
    try {
        return sounder::detail::parse_unsigned<std::uint32_t>("--taps", 0, text);
    } catch (const sounder::Error&) {
        throw sounder::InvalidArgument("--taps: '" + text +
                                       "' is not an unsigned integer (use hex 0x.. or decimal)");
    }
}

void warn_chip_rate(double chip_rate_hz) {
    if (chip_rate_hz > sounder::kMaxHardwareChipRateHz)
        std::cerr << "warning: chip rate " << fmt(chip_rate_hz)
                  << " Hz exceeds the 1 GHz hardware ceiling; results are extrapolated\n";
}

struct PnArgs {
    int degree = 5;
    std::string taps;
    std::uint32_t seed = 1;
    std::string csv_path;
};

void run_pn(const PnArgs& a) {
    const auto cfg = a.taps.empty()
                         ? sounder::LfsrConfig::with_default_taps(a.degree, a.seed)
                         : sounder::LfsrConfig(a.degree, parse_taps_flag(a.taps), a.seed);
    const auto seq = sounder::generate_pn(cfg);
    std::cout << sounder::to_bit_string(seq) << "\n";
    if (!a.csv_path.empty()) {
        sounder::write_text_file(a.csv_path, sounder::to_bipolar_csv(seq));
        std::cerr << "wrote " << a.csv_path << "\n";
    }
}

struct SpectrumArgs {
    int degree = 5;
    std::string taps;
    std::uint32_t seed = 1;
    double chip_rate_hz = 1.0e9;
    int oversampling = 8;
    int periods = 1;
    std::size_t nfft = 0;
    std::string csv_path;
};

void run_spectrum(const SpectrumArgs& a) {
    warn_chip_rate(a.chip_rate_hz);
    const auto cfg = a.taps.empty()
                         ? sounder::LfsrConfig::with_default_taps(a.degree, a.seed)
                         : sounder::LfsrConfig(a.degree, parse_taps_flag(a.taps), a.seed);
    const auto sig = sounder::synthesize_nrz(sounder::generate_pn(cfg), a.chip_rate_hz,
                                             a.oversampling, a.periods);
    const auto spec = sounder::power_spectrum(sig, a.nfft);
    std::cout << "first_null_hz = " << fmt(sounder::first_null_hz(spec)) << "\n";
    std::cout << "null_to_null_hz = " << fmt(sounder::null_to_null_bandwidth_hz(spec)) << "\n";
    if (!a.csv_path.empty()) {
        sounder::write_spectrum_csv(a.csv_path, spec);
        std::cerr << "wrote " << a.csv_path << "\n";
    }
}

struct SoundArgs {
    std::vector<std::string> configs;
    bool parallel = false;
};

void print_sounding(const std::string& path, const sounder::SoundingResult& r) {
    std::cout << "config " << path << "\n";
    std::cout << "  sliding_factor = " << fmt(r.summary.sliding_factor) << "\n";
    std::cout << "  slide_period_s = " << fmt(r.summary.slide_period_s) << "\n";
    std::cout << "  resolution_s = " << fmt(r.summary.resolution_s) << "\n";
    std::cout << "  null_to_null_hz = " << fmt(r.summary.null_to_null_hz) << "\n";
    std::cout << "  t_zero_s = " << fmt(r.summary.t_zero_s) << "\n";
    std::cout << "  paths = " << r.paths.size() << "\n";
    for (const auto& p : r.paths)
        std::cout << "    " << fmt(p.delay_s * 1.0e9) << " ns  " << fmt(p.relative_power_db)
                  << " dB\n";
    for (const auto& f : r.artifacts)
        std::cout << "  wrote " << f << "\n";
}

sounder::SoundingResult sound_one(const std::string& path) {
    try {
        const auto cfg = sounder::parse_config_file(path);
        warn_chip_rate(cfg.alpha_hz);
        return sounder::run_sounding_to_files(cfg);
    } catch (const sounder::Error& e) {
        throw sounder::Error(path + ": " + e.what());
    }
}

void run_sound(const SoundArgs& a) {
    if (a.parallel) {
        std::vector<std::future<sounder::SoundingResult>> futures;
        futures.reserve(a.configs.size());
        for (const auto& path : a.configs)
            futures.push_back(std::async(std::launch::async, sound_one, path));
        for (std::size_t i = 0; i < futures.size(); ++i)
            print_sounding(a.configs[i], futures[i].get());
    } else {
        for (const auto& path : a.configs)
            print_sounding(path, sound_one(path));
    }
}

struct PcbArgs {
    double h = 0.0, w = 0.0, t = 0.0, er = 0.0, d = 0.0;
    bool has_w = false, has_d = false, mm = false, json = false;
    std::optional<double> solve_target;
};

void run_pcb(const PcbArgs& a) {
    const double scale = a.mm ? sounder::kMilsPerMm : 1.0;
    const double h = a.h * scale;
    const double t = a.t * scale;

    if (a.solve_target) {
        const double w = sounder::solve_width(*a.solve_target, h, t, a.er);
        for (const auto& warning :
             sounder::stackup_warnings(sounder::StackupParams(h, w, t, a.er)))
            std::cerr << "warning: " << warning << "\n";
        const char* unit = a.mm ? "width_mm" : "width_mils";
        if (a.json) {
            nlohmann::ordered_json out{{"target_ohms", *a.solve_target}, {unit, w / scale}};
            std::cout << out.dump(2) << "\n";
        } else {
            std::cout << fmt(w / scale) << "\n";
        }
        return;
    }

    if (!a.has_w)
        throw sounder::InvalidArgument("--w is required unless --solve-width is given");
    const sounder::StackupParams p(h, a.w * scale, t, a.er,
                                   a.has_d ? std::optional<double>(a.d * scale) : std::nullopt);
    for (const auto& warning : sounder::stackup_warnings(p))
        std::cerr << "warning: " << warning << "\n";
    const double z0 = sounder::microstrip_impedance(p);
    if (a.json) {
        nlohmann::ordered_json out{{"microstrip_ohms", z0}};
        if (a.has_d)
            out["differential_ohms"] = sounder::differential_impedance(p);
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << fmt2(z0) << "\n";
        if (a.has_d)
            std::cout << fmt2(sounder::differential_impedance(p)) << "\n";
    }
}

struct PowerArgs {
    std::vector<std::string> active;
    bool json = false;
};

void run_power(const PowerArgs& a) {
    const auto table = sounder::PowerTable::builtin();
    const auto report =
        sounder::power_budget(table, std::set<std::string>(a.active.begin(), a.active.end()));
    if (a.json) {
        nlohmann::ordered_json rails;
        for (const auto& [rail, amps] : report.rail_current_a)
            rails[rail] = amps;
        nlohmann::ordered_json out{{"rails_a", rails},
                                   {"overhead_a", report.overhead_a},
                                   {"input_current_a", report.input_current_a},
                                   {"board_ceiling_a", report.board_ceiling_a}};
        std::cout << out.dump(2) << "\n";
        return;
    }
    for (const auto& [rail, amps] : report.rail_current_a)
        std::cout << rail << " rail: " << fmt(amps * 1.0e3) << " mA\n";
    std::cout << "input current: " << fmt(report.input_current_a * 1.0e3) << " mA\n";
    std::cout << "board ceiling: " << fmt(report.board_ceiling_a * 1.0e3) << " mA\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sliding-correlator channel sounding toolkit"};
    app.require_subcommand(1);

    PnArgs pn;
    auto* pn_cmd = app.add_subcommand("pn", "generate a maximal-length PN sequence");
    pn_cmd->add_option("--degree", pn.degree, "shift-register length (5..12)")
        ->capture_default_str();
    pn_cmd->add_option("--taps", pn.taps, "feedback tap mask, hex or decimal (default: table)");
    pn_cmd->add_option("--seed", pn.seed, "initial register state")->capture_default_str();
    pn_cmd->add_option("--csv", pn.csv_path, "also write the bipolar chips to this CSV file");

    SpectrumArgs sp;
    auto* sp_cmd = app.add_subcommand("spectrum", "power spectrum of the PN waveform");
    sp_cmd->add_option("--degree", sp.degree, "shift-register length (5..12)")
        ->capture_default_str();
    sp_cmd->add_option("--taps", sp.taps, "feedback tap mask, hex or decimal (default: table)");
    sp_cmd->add_option("--seed", sp.seed, "initial register state")->capture_default_str();
    sp_cmd->add_option("--chip-rate", sp.chip_rate_hz, "chip rate in Hz")
        ->capture_default_str();
    sp_cmd->add_option("--oversampling", sp.oversampling, "samples per chip (>= 4)")
        ->capture_default_str();
    sp_cmd->add_option("--periods", sp.periods, "sequence periods to synthesize")
        ->capture_default_str();
    sp_cmd->add_option("--nfft", sp.nfft, "FFT length (0 = signal length)");
    sp_cmd->add_option("--csv", sp.csv_path, "write freq_hz,power_db rows to this file");

    SoundArgs so;
    auto* so_cmd = app.add_subcommand("sound", "run sounding pipelines from config files");
    so_cmd->add_option("configs", so.configs, "experiment config files")
        ->required()
        ->expected(-1);
    so_cmd->add_flag("--parallel", so.parallel,
                     "run independent configs concurrently (give each its own output dir)");

    PcbArgs pcb;
    auto* pcb_cmd = app.add_subcommand("pcb", "microstrip impedance calculations");
    pcb_cmd->set_help_flag("--help", "print this help message and exit"); // frees -h for --h
    pcb_cmd->add_option("--h", pcb.h, "dielectric height")->required();
    auto* w_opt = pcb_cmd->add_option("--w", pcb.w, "trace width");
    pcb_cmd->add_option("--t", pcb.t, "copper thickness")->required();
    pcb_cmd->add_option("--er", pcb.er, "dielectric constant")->required();
    auto* d_opt = pcb_cmd->add_option("--d", pcb.d, "differential pair edge separation");
    pcb_cmd->add_flag("--mm", pcb.mm, "lengths are millimetres instead of mils");
    double solve_value = 0.0;
    auto* solve_opt = pcb_cmd->add_option("--solve-width", solve_value,
                                          "solve for the width reaching this impedance (ohm)");
    pcb_cmd->add_flag("--json", pcb.json, "print JSON instead of plain numbers");

    PowerArgs pw;
    auto* pw_cmd = app.add_subcommand("power", "board power budget from the current-draw table");
    pw_cmd->add_option("--active", pw.active,
                       "units switched on: clock_buffer, diff_converter, balun");
    pw_cmd->add_flag("--json", pw.json, "print JSON instead of rail lines");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    pcb.has_w = w_opt->count() > 0;
    pcb.has_d = d_opt->count() > 0;
    if (solve_opt->count() > 0)
        pcb.solve_target = solve_value;

    try {
        if (pn_cmd->parsed())
            run_pn(pn);
        else if (sp_cmd->parsed())
            run_spectrum(sp);
        else if (so_cmd->parsed())
            run_sound(so);
        else if (pcb_cmd->parsed())
            run_pcb(pcb);
        else if (pw_cmd->parsed())
            run_power(pw);
    } catch (const sounder::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const sounder::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
