#include "findhccs/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <toml.hpp>

#include "findhccs/types.hpp"

namespace findhccs {

using nlohmann::json;

namespace {

json to_json(const toml::node& node) {
  if (auto t = node.as_table()) {
    json out = json::object();
    for (const auto& [key, value] : *t) out[std::string(key.str())] = to_json(value);
    return out;
  }
  if (auto a = node.as_array()) {
    json out = json::array();
    for (const auto& value : *a) out.push_back(to_json(value));
    return out;
  }
  if (auto v = node.as_string()) return v->get();
  if (auto v = node.as_integer()) return v->get();
  if (auto v = node.as_floating_point()) return v->get();
  if (auto v = node.as_boolean()) return v->get();
  std::ostringstream s;  // dates and times stay textual
  node.visit([&](const auto& v) {
    if constexpr (toml::is_date<decltype(v)> || toml::is_time<decltype(v)> || toml::is_date_time<decltype(v)>)
      s << v;
  });
  return s.str();
}

}  // namespace

json parse_toml(std::string_view text, std::string_view source) {
  try {
    return to_json(toml::parse(text, source));
  } catch (const toml::parse_error& e) {
    const auto& where = e.source().begin;
    throw ContractError(fmt::format("{}:{}:{}: {}", source, where.line, where.column, e.description()));
  }
}

json load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read config file '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (std::filesystem::path(path).extension() == ".toml") return parse_toml(text, path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ContractError(fmt::format("{}: {}", path, e.what()));
  }
}

}  // namespace findhccs
