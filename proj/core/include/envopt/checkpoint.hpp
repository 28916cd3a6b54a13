#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "envopt/policy.hpp"

namespace envopt {

// Versioned parameter snapshot: JSON header (kind, architecture, seed,
// iteration) plus base64 of the raw little-endian doubles, so round-trips are
// bit-exact.
struct Checkpoint {
    int version = 1;
    std::string policy_kind;  // "grid" | "gnn" | "tabular"
    std::string arch;         // architecture config, JSON text
    std::vector<double> theta;
    std::vector<double> omega;
    std::vector<double> lambda;
    uint64_t seed = 0;
    int iteration = 0;
};

void save_checkpoint(const Checkpoint& c, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

std::string arch_to_json(const GridPolicyConfig& cfg);
std::string arch_to_json(const GnnPolicyConfig& cfg);
std::string arch_to_json(const TabularConfig& cfg);
GridPolicyConfig grid_config_from_json(const std::string& text);
GnnPolicyConfig gnn_config_from_json(const std::string& text);
TabularConfig tabular_config_from_json(const std::string& text);

std::string base64_encode(const uint8_t* data, size_t len);
std::vector<uint8_t> base64_decode(const std::string& text);

} // namespace envopt
