// SPDX-License-Identifier: Apache-2.0
#ifndef CEDONUT_FADING_HPP
#define CEDONUT_FADING_HPP

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cedonut/error.hpp"
#include "cedonut/numeric.hpp"
#include "cedonut/rng.hpp"

namespace cedonut {

/// Complex channel gains h in C^N with the l1, l2 and l-infinity norms cached.
class ChannelVector {
public:
    ChannelVector() = default;

    explicit ChannelVector(std::vector<complex> gains) : gains_(std::move(gains))
    {
        require(!gains_.empty(), "channel must have at least one antenna");
        CompensatedSum l1, l2sq;
        for (const auto& g : gains_) {
            const double a = std::abs(g);
            l1.add(a);
            l2sq.add(std::norm(g));
            linf_ = std::max(linf_, a);
        }
        l1_ = l1.value();
        l2_ = std::sqrt(l2sq.value());
    }

    [[nodiscard]] std::size_t size() const { return gains_.size(); }
    [[nodiscard]] const std::vector<complex>& gains() const { return gains_; }
    [[nodiscard]] const complex& operator[](std::size_t i) const { return gains_[i]; }

    [[nodiscard]] double norm_l1() const { return l1_; }
    [[nodiscard]] double norm_l2() const { return l2_; }
    [[nodiscard]] double norm_l2_squared() const { return l2_ * l2_; }
    [[nodiscard]] double norm_linf() const { return linf_; }

    /// First `count` antennas, h^(count) = (h_1, ..., h_count).
    [[nodiscard]] ChannelVector prefix(std::size_t count) const
    {
        require(count >= 1 && count <= gains_.size(), "prefix length out of range");
        return ChannelVector(std::vector<complex>(gains_.begin(), gains_.begin() + static_cast<std::ptrdiff_t>(count)));
    }

private:
    std::vector<complex> gains_;
    double l1_ = 0.0;
    double l2_ = 0.0;
    double linf_ = 0.0;
};

enum class FadingKind { IidRayleigh, IidBoundedMagnitude, Dlos };

/// Channel distribution. `parameter` is the magnitude bound for IidBoundedMagnitude
/// (|h_i| ~ U[0, bound]) and the common magnitude for Dlos; unused for Rayleigh.
struct FadingModel {
    FadingKind kind = FadingKind::IidRayleigh;
    double parameter = 1.0;
    std::size_t n_antennas = 1;

    static FadingModel rayleigh(std::size_t n) { return {FadingKind::IidRayleigh, 1.0, n}; }
    static FadingModel bounded(double bound, std::size_t n) { return {FadingKind::IidBoundedMagnitude, bound, n}; }
    static FadingModel dlos(double magnitude, std::size_t n) { return {FadingKind::Dlos, magnitude, n}; }

    void validate() const
    {
        require(n_antennas >= 1, "number of antennas must be at least 1");
        if (kind != FadingKind::IidRayleigh)
            require(parameter > 0.0 && std::isfinite(parameter), "fading magnitude parameter must be positive");
    }
};

inline ChannelVector draw_channel(const FadingModel& model, RngStream& stream)
{
    model.validate();
    std::vector<complex> gains(model.n_antennas);
    for (auto& g : gains) {
        switch (model.kind) {
        case FadingKind::IidRayleigh:
            g = stream.complex_normal(1.0);
            break;
        case FadingKind::IidBoundedMagnitude: {
            const double magnitude = stream.uniform(0.0, model.parameter);
            g = std::polar(magnitude, stream.uniform_phase());
            break;
        }
        case FadingKind::Dlos:
            g = std::polar(model.parameter, stream.uniform_phase());
            break;
        }
    }
    return ChannelVector(std::move(gains));
}

/// Channel for trial `trial_index` of an experiment seeded with `master_seed`.
inline ChannelVector draw_channel(const FadingModel& model, std::uint64_t master_seed, std::uint64_t trial_index)
{
    RngStream stream(master_seed, trial_index);
    return draw_channel(model, stream);
}

/// Parses `rayleigh`, `bounded:<B>` or `dlos:<A>`.
inline FadingModel parse_fading(std::string_view text, std::size_t n_antennas)
{
    auto parse_value = [&](std::string_view rest) {
        std::string s(rest);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw InvalidArgument("malformed fading parameter '" + s + "'");
        }
        require(used == s.size(), "malformed fading parameter '" + s + "'");
        return v;
    };
    FadingModel model;
    model.n_antennas = n_antennas;
    if (text == "rayleigh") {
        model.kind = FadingKind::IidRayleigh;
    } else if (text.starts_with("bounded:")) {
        model.kind = FadingKind::IidBoundedMagnitude;
        model.parameter = parse_value(text.substr(8));
    } else if (text.starts_with("dlos:")) {
        model.kind = FadingKind::Dlos;
        model.parameter = parse_value(text.substr(5));
    } else {
        throw InvalidArgument("unknown fading model '" + std::string(text) + "' (expected rayleigh|bounded:<B>|dlos:<A>)");
    }
    model.validate();
    return model;
}

inline std::string to_string(const FadingModel& model)
{
    switch (model.kind) {
    case FadingKind::IidRayleigh: return "rayleigh";
    case FadingKind::IidBoundedMagnitude: return "bounded:" + std::to_string(model.parameter);
    case FadingKind::Dlos: return "dlos:" + std::to_string(model.parameter);
    }
    return "unknown";
}

} // namespace cedonut

#endif // CEDONUT_FADING_HPP
