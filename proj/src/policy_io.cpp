#include <cstdio>
#include <json.hpp>
#include <set>

#include "patrol/error.hpp"
#include "patrol/io.hpp"
#include "patrol/learner.hpp"

namespace patrol {

using nlohmann::ordered_json;

namespace {
constexpr const char* kPolicyFormat = "patrol-policy";
constexpr int kPolicyVersion = 1;
}  // namespace

std::string serialize_params(const PolicyParams& params) {
  ordered_json doc;
  doc["format"] = kPolicyFormat;
  doc["version"] = kPolicyVersion;
  doc["schema"] = feature_schema();
  doc["schema_hash"] = feature_schema_hash();
  doc["policy"] = params.policy;
  doc["value"] = params.value;
  return doc.dump(2) + "\n";
}

PolicyParams parse_params(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, describe_parse_error(text, e.byte, e.what()));
  }
  if (!doc.is_object()) throw Error(ErrorCode::kParseError, "policy: top level must be an object");
  const std::set<std::string> allowed{"format", "version", "schema", "schema_hash", "policy", "value"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!allowed.count(it.key())) throw Error(ErrorCode::kParseError, "policy: unknown field '" + it.key() + "'");
  }
  PolicyParams params;
  try {
    if (doc.at("format") != kPolicyFormat || doc.at("version") != kPolicyVersion) {
      throw Error(ErrorCode::kParseError, "policy: unsupported format or version");
    }
    const auto stored = doc.at("schema_hash").get<std::string>();
    if (stored != feature_schema_hash()) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "policy was trained with feature schema " + stored + ", this build uses " + feature_schema_hash());
    }
    params.policy = doc.at("policy").get<std::vector<double>>();
    params.value = doc.at("value").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("policy: ") + e.what());
  }
  if (params.policy.size() != kActionFeatures || params.value.size() != kValueFeatures) {
    throw Error(ErrorCode::kSchemaMismatch, "policy: weight vector lengths do not match the feature schema");
  }
  return params;
}

void save_params(const PolicyParams& params, const std::filesystem::path& path) {
  write_text_file(path, serialize_params(params));
}

PolicyParams load_params(const std::filesystem::path& path) { return parse_params(read_text_file(path)); }

std::string serialize_curve(std::span<const double> curve) {
  std::string out = "update,mean_joint_reward\n";
  char buf[64];
  for (std::size_t i = 0; i < curve.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f\n", i, curve[i]);
    out += buf;
  }
  return out;
}

}  // namespace patrol
