#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include <json.hpp>

#include "cloze/error.hpp"

namespace cloze {

using json = nlohmann::json;

// Line-delimited JSON artifacts. The first line is a meta object
// {"_meta": {...}} carrying at least "kind" and "config_hash"; every
// following line is one record.

class JsonlWriter {
 public:
  JsonlWriter(const std::filesystem::path& path, json meta) : out_(path) {
    require(out_.good(), "cannot open for writing: ", path.string());
    path_ = path;
    out_ << json{{"_meta", std::move(meta)}}.dump() << "\n";
  }

  void write(const json& record) { out_ << record.dump() << "\n"; }

  void close() {
    out_.flush();
    require(out_.good(), "write failed: ", path_.string());
    out_.close();
  }

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

// Reads the meta line, then invokes `fn` per record line. Returns the meta.
inline json read_jsonl(const std::filesystem::path& path,
                       const std::function<void(const json&)>& fn) {
  std::ifstream in(path);
  require(in.good(), "cannot open: ", path.string());
  std::string line;
  json meta;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const std::exception& e) {
      fail("malformed JSONL line in ", path.string(), ": ", e.what());
    }
    if (first) {
      first = false;
      if (j.is_object() && j.contains("_meta")) {
        meta = j["_meta"];
        continue;
      }
    }
    fn(j);
  }
  require(!first, "empty JSONL file: ", path.string());
  return meta;
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open: ", path.string());
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail("malformed JSON in ", path.string(), ": ", e.what());
  }
  return j;
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  require(out.good(), "cannot open for writing: ", path.string());
  out << j.dump(2) << "\n";
  out.flush();
  require(out.good(), "write failed: ", path.string());
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open: ", path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace cloze
