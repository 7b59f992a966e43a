#include "hodge/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hodge/errors.hpp"
#include "hodge/random.hpp"

namespace hodge {

std::string_view to_string(Preset preset)
{
    switch (preset) {
    case Preset::FourDisks: return "four-disks";
    case Preset::Annulus: return "annulus";
    case Preset::TwoClusters: return "two-clusters";
    }
    return "unknown";
}

Preset parse_preset(std::string_view name)
{
    if (name == "four-disks") return Preset::FourDisks;
    if (name == "annulus") return Preset::Annulus;
    if (name == "two-clusters") return Preset::TwoClusters;
    throw InputError("unknown preset '" + std::string(name) + "'");
}

SyntheticCloud generate(Preset preset, Index n, std::uint64_t seed, const PresetShape& shape)
{
    if (n < 3) throw InputError("generate: need at least 3 points");
    if (!(shape.radius > 0) || !(shape.annulus_outer > shape.radius)) throw InputError("generate: bad preset shape");

    SyntheticCloud out;
    const double r = shape.radius, side = 4.0 * r;
    switch (preset) {
    case Preset::FourDisks: out.centres = {{0, 0}, {side, 0}, {0, side}, {side, side}}; break;
    case Preset::TwoClusters: out.centres = {{0, 0}, {side, 0}}; break;
    case Preset::Annulus: out.centres = {{0, 0}}; break;
    }
    const auto groups = static_cast<Index>(out.centres.size());
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(preset)));
    out.cloud.points.resize(n, 2);
    Index row = 0;
    for (Index g = 0; g < groups; ++g) {
        const Index count = n / groups + (g < n % groups ? 1 : 0);
        for (Index i = 0; i < count; ++i, ++row) {
            // Area-uniform radius: inverse CDF of r² on [inner², outer²].
            const double inner = preset == Preset::Annulus ? r : 0.0;
            const double outer = preset == Preset::Annulus ? shape.annulus_outer : r;
            const double rho = std::sqrt(inner * inner + (outer * outer - inner * inner) * rng.uniform());
            const double angle = 2.0 * std::numbers::pi * rng.uniform();
            const Eigen::Vector2d& c = out.centres[static_cast<std::size_t>(g)];
            out.cloud.points(row, 0) = c.x() + rho * std::cos(angle);
            out.cloud.points(row, 1) = c.y() + rho * std::sin(angle);
            out.group.push_back(static_cast<int>(g));
        }
    }
    check_distinct(out.cloud);
    return out;
}

}  // namespace hodge
