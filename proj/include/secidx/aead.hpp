#pragma once

#include "secidx/rng.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace secidx::aead {

// AES-256-GCM with a fresh random nonce per seal; blob = nonce || ct || tag.

struct Key {
    std::array<std::uint8_t, 32> bytes{};
};

Key random_key(Rng& rng);

std::vector<std::uint8_t> seal(const Key& key, const std::vector<std::uint8_t>& plaintext,
                               Rng& rng);

// Throws DomainError when authentication fails.
std::vector<std::uint8_t> open(const Key& key, const std::vector<std::uint8_t>& blob);

void save_key(const Key& key, const std::filesystem::path& file);
Key load_key(const std::filesystem::path& file);

void write_sealed_file(const Key& key, const std::filesystem::path& file,
                       const std::string& plaintext, Rng& rng);
std::string read_sealed_file(const Key& key, const std::filesystem::path& file);

} // namespace secidx::aead
