#include "kanbench/serialization.hpp"

#include <fstream>

#include "kanbench/error.hpp"

namespace kanbench {

using nlohmann::json;

json network_to_json(const Network& net) {
  const NetworkSpec& spec = net.spec();
  json doc;
  doc["format"] = "kanbench.network";
  doc["version"] = kNetworkFormatVersion;
  doc["arch"] = std::string(to_string(spec.arch));
  doc["input_dim"] = spec.input_dim;
  doc["hidden_widths"] = spec.hidden_widths;
  doc["head"] = std::string(to_string(spec.head));
  doc["classes"] = spec.classes;
  if (spec.arch == Arch::kan) {
    doc["grid"] = {{"domain_min", spec.grid.domain_min},
                   {"domain_max", spec.grid.domain_max},
                   {"intervals", spec.grid.intervals},
                   {"order", spec.grid.order}};
  }
  doc["params"] = net.flatten_params();
  return doc;
}

Network network_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != "kanbench.network") {
      throw DataError("network json: unexpected format tag");
    }
    const int version = doc.at("version").get<int>();
    if (version != kNetworkFormatVersion) {
      throw DataError("network json: unsupported version " + std::to_string(version) +
                      " (expected " + std::to_string(kNetworkFormatVersion) + ")");
    }
    NetworkSpec spec;
    spec.arch = parse_arch(doc.at("arch").get<std::string>());
    spec.input_dim = doc.at("input_dim").get<std::size_t>();
    spec.hidden_widths = doc.at("hidden_widths").get<std::vector<std::size_t>>();
    spec.head = parse_head(doc.at("head").get<std::string>());
    spec.classes = doc.at("classes").get<std::size_t>();
    if (spec.arch == Arch::kan) {
      const json& g = doc.at("grid");
      spec.grid = {g.at("domain_min").get<double>(), g.at("domain_max").get<double>(),
                   g.at("intervals").get<int>(), g.at("order").get<int>()};
    }
    Network net(spec);
    net.set_params(doc.at("params").get<std::vector<double>>());
    return net;
  } catch (const json::exception& e) {
    throw DataError(std::string("network json: ") + e.what());
  }
}

void save_network(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << network_to_json(net).dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError("network json " + path.string() + ": " + e.what());
  }
  return network_from_json(doc);
}

}  // namespace kanbench
