#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace glmb {

enum class ErrorCode {
    AllZeroWeights,
    UniverseTooLarge,
    SupportMismatch,
    LabelCollision,
    PartitionMismatch,
    ProblemTooLarge,
    SingularInnovation,
    ConfigInvalid,
    IoFailure,
};

/// Exception carrying a stable error code, mapped to a C status at the API
/// boundary and to process exit codes by the CLI.
class GlmbError : public std::runtime_error {
public:
    GlmbError(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// ---- Deterministic hashing ----
//
// All opaque identifiers and derived RNG seeds flow through these mixers so
// that a run is reproducible from a single top-level seed.

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept {
    return splitmix64(seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

inline std::uint64_t hash_string(std::uint64_t seed, const std::string& s) noexcept {
    std::uint64_t h = seed;
    for (unsigned char c : s) h = hash_combine(h, c);
    return h;
}

/// Sub-stream seed for (component name, scan, group id); keeps every parallel
/// group's randomness independent of scheduling.
inline std::uint64_t derive_seed(std::uint64_t root, const std::string& component,
                                 std::int64_t scan, std::uint64_t group_id) noexcept {
    std::uint64_t h = hash_string(root, component);
    h = hash_combine(h, static_cast<std::uint64_t>(scan));
    return hash_combine(h, group_id);
}

}  // namespace glmb
