#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace attn {

// Shortest round-trip decimal for a double, C locale, '.' separator.
// Every number we emit (JSON and CSV alike) goes through this one formatter.
std::string fmt17(double x);

// Minimal deterministic JSON emitter. Insertion order is preserved and
// numbers are formatted by fmt17, so identical inputs give identical bytes.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array(const std::string& key = "");
  JsonWriter& end_array();
  JsonWriter& key(const std::string& k);
  JsonWriter& value(double v);
  JsonWriter& value(std::int64_t v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value_bool(bool v);
  JsonWriter& value_null();
  JsonWriter& field(const std::string& k, double v);
  JsonWriter& field(const std::string& k, std::int64_t v);
  JsonWriter& field(const std::string& k, const std::string& v);
  JsonWriter& field_bool(const std::string& k, bool v);
  std::string str() const { return out_; }

 private:
  void separator();
  std::string out_;
  std::vector<bool> first_in_scope_;
  bool pending_key_ = false;
};

// CSV table: optional `# key=value` comment lines, then a header row, then
// data rows. All line endings are '\n'.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string str() const;
};

std::string json_escape(const std::string& s);

}  // namespace attn
