#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "hodge/geometry.hpp"

namespace hodge {

enum class Preset { FourDisks, Annulus, TwoClusters };

std::string_view to_string(Preset preset);
Preset parse_preset(std::string_view name);

/// Generator geometry. Four disks of radius `radius` sit on the corners of a square of side
/// 4·radius; two-clusters uses the first two of those disks; the annulus spans
/// [radius, annulus_outer] around the origin.
struct PresetShape {
    double radius = 1.0;
    double annulus_outer = 1.6;
};

struct SyntheticCloud {
    PointCloud cloud;
    std::vector<int> group;  ///< generating disk per point (0 for the annulus)
    std::vector<Eigen::Vector2d> centres;
};

/// Uniform samples, n split as evenly as possible between groups (earlier groups take the
/// remainder). Deterministic in (preset, n, seed).
SyntheticCloud generate(Preset preset, Index n, std::uint64_t seed, const PresetShape& shape = {});

}  // namespace hodge
