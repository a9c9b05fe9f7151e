#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "common.hpp"

namespace glmb {

/// Object identity: (birth scan, index among objects born that scan).
/// Lexicographic order gives every container a deterministic iteration order.
struct Label {
    std::int32_t birth_time = 0;
    std::int32_t birth_index = 0;

    auto operator<=>(const Label&) const = default;

    [[nodiscard]] std::string str() const {
        return std::to_string(birth_time) + "." + std::to_string(birth_index);
    }

    [[nodiscard]] std::uint64_t hash() const noexcept {
        return hash_combine(static_cast<std::uint64_t>(static_cast<std::uint32_t>(birth_time)),
                            static_cast<std::uint64_t>(static_cast<std::uint32_t>(birth_index)));
    }
};

}  // namespace glmb
