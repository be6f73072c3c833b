#pragma once

#include <memory>
#include <string>
#include <vector>

namespace wavered {

// Deterministic key/value report document. Keys keep insertion order, floats
// render as %.12e, nested sections indent by two spaces; identical inputs
// produce byte-identical text.
class Report {
 public:
  void put(const std::string& key, const std::string& value);
  void put(const std::string& key, const char* value);
  void put(const std::string& key, double value);
  void put(const std::string& key, int value);
  void put(const std::string& key, long long value);
  void put(const std::string& key, bool value);

  Report& child(const std::string& name);

  std::string render() const;

 private:
  struct Entry {
    std::string key;
    std::string value;           // empty for section entries
    std::shared_ptr<Report> section;
  };
  std::vector<Entry> entries_;

  void render_into(std::string& out, int depth) const;
};

std::string format_double(double value);  // %.12e

}  // namespace wavered
