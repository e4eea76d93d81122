#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace sounder {

/// 1 mm expressed in mils (1 mil = 0.001 inch).
inline constexpr double kMilsPerMm = 39.3701;

/// Microstrip geometry, all lengths in mils. `d_mil` is the edge separation
/// of a differential pair and only required for the differential formula.
struct StackupParams {
    double h_mil; // trace-to-ground dielectric height
    double w_mil; // trace width
    double t_mil; // copper thickness
    double er;    // dielectric constant
    std::optional<double> d_mil; // pair edge separation

    StackupParams(double h_mil_, double w_mil_, double t_mil_, double er_,
                  std::optional<double> d_mil_ = std::nullopt)
        : h_mil(h_mil_), w_mil(w_mil_), t_mil(t_mil_), er(er_), d_mil(d_mil_) {
        if (!(h_mil > 0.0) || !(w_mil > 0.0) || !(t_mil > 0.0))
            throw InvalidArgument("stackup lengths must be positive (h=" + std::to_string(h_mil) +
                                  ", w=" + std::to_string(w_mil) + ", t=" + std::to_string(t_mil) +
                                  " mil)");
        if (!(er > 1.0))
            throw InvalidArgument("dielectric constant must exceed 1, got " + std::to_string(er));
        if (d_mil && !(*d_mil > 0.0))
            throw InvalidArgument("pair separation must be positive, got " +
                                  std::to_string(*d_mil));
    }
};

/// The closed forms are fitted for 0.1 <= w/h <= 3; outside that window they
/// still evaluate but the result drifts from a field solution, so flag it.
inline std::vector<std::string> stackup_warnings(const StackupParams& p) {
    std::vector<std::string> warnings;
    const double ratio = p.w_mil / p.h_mil;
    if (ratio < 0.1 || ratio > 3.0)
        warnings.push_back("w/h = " + std::to_string(ratio) +
                           " lies outside the closed-form validity window [0.1, 3]");
    return warnings;
}

/// Characteristic impedance of a surface microstrip:
/// 87/sqrt(er + 1.41) * ln(5.98 h / (0.8 w + t)).
inline double microstrip_impedance(const StackupParams& p) {
    const double arg = 5.98 * p.h_mil / (0.8 * p.w_mil + p.t_mil);
    if (!(arg > 1.0))
        throw PreconditionError("nonphysical geometry: 5.98 h = " +
                                std::to_string(5.98 * p.h_mil) + " mil does not exceed 0.8 w + t = " +
                                std::to_string(0.8 * p.w_mil + p.t_mil) + " mil");
    return 87.0 / std::sqrt(p.er + 1.41) * std::log(arg);
}

/// Edge-coupled differential impedance: twice the single-ended value scaled
/// by the proximity factor (1 - 0.48 exp(-0.96 d/h)).
inline double differential_impedance(const StackupParams& p) {
    if (!p.d_mil)
        throw InvalidArgument("differential impedance needs the pair separation d");
    const double single = microstrip_impedance(p); // validates the geometry
    return 2.0 * single * (1.0 - 0.48 * std::exp(-0.96 * *p.d_mil / p.h_mil));
}

/// Trace width achieving `target_z0`, the exact algebraic inverse of
/// microstrip_impedance in w.
inline double solve_width(double target_z0, double h_mil, double t_mil, double er) {
    if (!(target_z0 > 0.0))
        throw InvalidArgument("target impedance must be positive, got " +
                              std::to_string(target_z0));
    if (!(h_mil > 0.0) || !(t_mil > 0.0))
        throw InvalidArgument("stackup lengths must be positive");
    if (!(er > 1.0))
        throw InvalidArgument("dielectric constant must exceed 1, got " + std::to_string(er));
    const double arg = std::exp(target_z0 * std::sqrt(er + 1.41) / 87.0);
    const double w = (5.98 * h_mil / arg - t_mil) / 0.8;
    if (!(w > 0.0))
        throw InvalidArgument(std::to_string(target_z0) +
                              " ohm is unachievable with this stackup: it needs width " +
                              std::to_string(w) + " mil");
    return w;
}

} // namespace sounder
