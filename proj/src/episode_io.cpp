#include <json.hpp>
#include <set>
#include <sstream>

#include "patrol/env.hpp"
#include "patrol/error.hpp"
#include "patrol/io.hpp"

namespace patrol {

using nlohmann::ordered_json;

namespace {
constexpr const char* kEpisodeFormat = "patrol-episode";
constexpr int kEpisodeVersion = 1;
}  // namespace

std::string serialize_episode(const EpisodeLog& log) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"format\": \"" << kEpisodeFormat << "\",\n";
  out << "  \"version\": " << kEpisodeVersion << ",\n";
  out << "  \"seed\": " << log.seed << ",\n";
  out << "  \"config_hash\": " << ordered_json(log.config_hash).dump() << ",\n";
  out << "  \"num_nodes\": " << log.num_nodes << ",\n";
  out << "  \"horizon\": " << log.horizon << ",\n";
  out << "  \"routes\": [\n";
  for (std::size_t a = 0; a < log.routes.size(); ++a) {
    out << "    [";
    for (std::size_t t = 0; t < log.routes[a].size(); ++t) out << (t ? ", " : "") << log.routes[a][t];
    out << "]" << (a + 1 < log.routes.size() ? "," : "") << "\n";
  }
  out << "  ]\n}\n";
  return out.str();
}

EpisodeLog parse_episode(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, describe_parse_error(text, e.byte, e.what()));
  }
  const std::set<std::string> allowed{"format", "version", "seed", "config_hash", "num_nodes", "horizon", "routes"};
  if (!doc.is_object()) throw Error(ErrorCode::kParseError, "episode: top level must be an object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!allowed.count(it.key())) throw Error(ErrorCode::kParseError, "episode: unknown field '" + it.key() + "'");
  }
  for (const auto& key : allowed) {
    if (!doc.contains(key)) throw Error(ErrorCode::kParseError, "episode: missing field '" + key + "'");
  }
  if (doc.at("format") != kEpisodeFormat || doc.at("version") != kEpisodeVersion) {
    throw Error(ErrorCode::kParseError, "episode: unsupported format or version");
  }
  EpisodeLog log;
  try {
    log.seed = doc.at("seed").get<std::uint64_t>();
    log.config_hash = doc.at("config_hash").get<std::string>();
    log.num_nodes = doc.at("num_nodes").get<std::size_t>();
    log.horizon = doc.at("horizon").get<int>();
    log.routes = doc.at("routes").get<std::vector<std::vector<NodeId>>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("episode: ") + e.what());
  }
  for (std::size_t a = 0; a < log.routes.size(); ++a) {
    if (log.routes[a].size() != static_cast<std::size_t>(log.horizon) + 1) {
      throw Error(ErrorCode::kParseError, "episode.routes[" + std::to_string(a) + "]: expected horizon+1 entries");
    }
  }
  return log;
}

void save_episode(const EpisodeLog& log, const std::filesystem::path& path) {
  write_text_file(path, serialize_episode(log));
}

EpisodeLog load_episode(const std::filesystem::path& path) { return parse_episode(read_text_file(path)); }

}  // namespace patrol
