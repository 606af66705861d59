#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "errors.hpp"

namespace trait_tuner {

/// The Big Five dimensions. The enumerator order is the serialization order
/// used everywhere (files, reports, prediction lines).
enum class TraitName : std::size_t {
    agreeableness = 0,
    openness,
    conscientiousness,
    extraversion,
    neuroticism,
};

inline constexpr std::size_t trait_count = 5;

inline constexpr std::array<TraitName, trait_count> all_traits{
    TraitName::agreeableness, TraitName::openness, TraitName::conscientiousness,
    TraitName::extraversion, TraitName::neuroticism,
};

inline constexpr std::array<std::string_view, trait_count> trait_names{
    "agreeableness", "openness", "conscientiousness", "extraversion", "neuroticism",
};

/// Three-letter column codes used by published binary baselines.
inline constexpr std::array<std::string_view, trait_count> trait_codes{
    "AGR", "OPN", "CON", "EXT", "NEU",
};

constexpr std::size_t index_of(TraitName t) noexcept { return static_cast<std::size_t>(t); }

constexpr std::string_view name_of(TraitName t) noexcept { return trait_names[index_of(t)]; }

inline std::optional<TraitName> trait_from_name(std::string_view name) {
    for (std::size_t i = 0; i < trait_count; ++i)
        if (trait_names[i] == name) return all_traits[i];
    return std::nullopt;
}

inline std::optional<TraitName> trait_from_code(std::string_view code) {
    for (std::size_t i = 0; i < trait_count; ++i)
        if (trait_codes[i] == code) return all_traits[i];
    return std::nullopt;
}

/// One score per trait. Normalized vectors live in [0,1]; raw-unit vectors
/// (before normalization) use the same type.
struct TraitVector {
    std::array<double, trait_count> scores{};

    double& operator[](TraitName t) noexcept { return scores[index_of(t)]; }
    double operator[](TraitName t) const noexcept { return scores[index_of(t)]; }
    double& operator[](std::size_t i) noexcept { return scores[i]; }
    double operator[](std::size_t i) const noexcept { return scores[i]; }

    bool in_unit_range() const noexcept {
        for (double s : scores)
            if (!(s >= 0.0 && s <= 1.0)) return false;
        return true;
    }

    friend bool operator==(const TraitVector&, const TraitVector&) = default;
};

inline nlohmann::json to_json_object(const TraitVector& v) {
    nlohmann::json j = nlohmann::json::object();
    for (TraitName t : all_traits) j[std::string(name_of(t))] = v[t];
    return j;
}

/// Reads the five trait keys; throws ParseError naming the first missing or
/// non-numeric key. Extra keys are ignored.
inline TraitVector trait_vector_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("traits must be an object");
    TraitVector v;
    for (TraitName t : all_traits) {
        const std::string key(name_of(t));
        auto it = j.find(key);
        if (it == j.end()) throw ParseError("missing trait field '" + key + "'");
        if (!it->is_number()) throw ParseError("trait field '" + key + "' is not numeric");
        v[t] = it->get<double>();
    }
    return v;
}

} // namespace trait_tuner
