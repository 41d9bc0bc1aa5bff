#pragma once

#include <filesystem>
#include <string_view>

#include <json.hpp>

#include "gwlife/distributions.hpp"

namespace gwlife {

struct ModelSpec {
    OffspringSpec offspring;
    LifetimeSpec lifetime;
};

struct Model {
    OffspringModel offspring;
    LifetimeModel lifetime;
};

/// Parses {"offspring": {"kind": ...}, "lifetime": {"kind": ...}}.
///
/// Offspring kinds: pmf (p), geometric (mean), poisson (mean), point (j).
/// Lifetime kinds: pmf (h), geometric (mean), power_tilt (a, b).
/// A geometric or poisson offspring mean may be the string "critical",
/// meaning 1 / l. Throws ModelError on anything else.
ModelSpec parse_model_spec(const nlohmann::json& doc);
ModelSpec parse_model_spec(std::string_view text);
ModelSpec load_model_spec(const std::filesystem::path& path);

Model build_model(const ModelSpec& spec);

nlohmann::ordered_json to_json(const ModelSpec& spec);

} // namespace gwlife
