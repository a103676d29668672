#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mano/error.hpp"
#include "mano/io.hpp"

namespace mano::io {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& pointer, const std::string& msg) {
  throw Error(Errc::schema, "manifest " + (pointer.empty() ? std::string("/") : pointer) + ": " + msg);
}

std::string required_string(const json& obj, const std::string& key, const std::string& pointer) {
  const auto it = obj.find(key);
  if (it == obj.end()) schema_error(pointer, "missing required field '" + key + "'");
  if (!it->is_string()) schema_error(pointer + "/" + key, "must be a string");
  auto value = it->get<std::string>();
  if (value.empty()) schema_error(pointer + "/" + key, "must not be empty");
  return value;
}

std::filesystem::path resolve(const std::filesystem::path& base_dir, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : (base_dir / path).lexically_normal();
}

}  // namespace

const ManifestEntry* DatasetManifest::validation() const {
  for (const auto& e : entries)
    if (e.role == Role::validation) return &e;
  return nullptr;
}

DatasetManifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse, std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) schema_error("", "must be a JSON object");

  DatasetManifest manifest;
  const auto version = doc.find("schema_version");
  if (version == doc.end()) schema_error("", "missing required field 'schema_version'");
  if (!version->is_number_integer()) schema_error("/schema_version", "must be an integer");
  manifest.schema_version = version->get<int>();
  if (manifest.schema_version != 1) {
    schema_error("/schema_version", "unsupported version " + std::to_string(manifest.schema_version));
  }

  const auto entries = doc.find("entries");
  if (entries == doc.end()) schema_error("", "missing required field 'entries'");
  if (!entries->is_array()) schema_error("/entries", "must be an array");
  if (entries->empty()) schema_error("/entries", "must contain at least one entry");

  std::set<std::string> ids;
  bool has_validation = false;
  for (std::size_t i = 0; i < entries->size(); ++i) {
    const std::string pointer = "/entries/" + std::to_string(i);
    const json& e = (*entries)[i];
    if (!e.is_object()) schema_error(pointer, "must be an object");

    ManifestEntry entry;
    entry.id = required_string(e, "id", pointer);
    if (!ids.insert(entry.id).second) schema_error(pointer + "/id", "duplicate id '" + entry.id + "'");
    entry.logits_path = resolve(base_dir, required_string(e, "logits", pointer));
    if (e.contains("labels") && !e.at("labels").is_null()) {
      entry.labels_path = resolve(base_dir, required_string(e, "labels", pointer));
    }
    if (e.contains("role")) {
      const auto& role = e.at("role");
      if (role == "validation") {
        entry.role = Role::validation;
      } else if (role == "test") {
        entry.role = Role::test;
      } else {
        schema_error(pointer + "/role", "must be \"validation\" or \"test\"");
      }
    }
    if (entry.role == Role::validation) {
      if (has_validation) schema_error(pointer + "/role", "at most one validation entry is allowed");
      has_validation = true;
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_manifest(buffer.str(), path.parent_path());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  const auto base = path.parent_path();
  auto relative = [&](const std::filesystem::path& p) {
    const auto rel = p.lexically_relative(base);
    return (rel.empty() ? p : rel).generic_string();
  };

  json doc;
  doc["schema_version"] = manifest.schema_version;
  doc["entries"] = json::array();
  for (const auto& e : manifest.entries) {
    json entry;
    entry["id"] = e.id;
    entry["logits"] = relative(e.logits_path);
    if (e.labels_path) entry["labels"] = relative(*e.labels_path);
    entry["role"] = e.role == Role::validation ? "validation" : "test";
    doc["entries"].push_back(std::move(entry));
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw Error(Errc::io, "write to '" + path.string() + "' failed");
}

}  // namespace mano::io
