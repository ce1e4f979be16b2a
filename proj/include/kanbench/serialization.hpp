#pragma once

#include <filesystem>

#include <json.hpp>

#include "kanbench/network.hpp"

namespace kanbench {

inline constexpr int kNetworkFormatVersion = 1;

// {"format": "kanbench.network", "version": 1, "arch", "input_dim",
//  "hidden_widths", "head", "classes", "grid": {...}, "params": [...]}
nlohmann::json network_to_json(const Network& net);
Network network_from_json(const nlohmann::json& doc);

void save_network(const Network& net, const std::filesystem::path& path);
Network load_network(const std::filesystem::path& path);

}  // namespace kanbench
