#include "wavered/report.hpp"

#include <cstdio>

namespace wavered {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", value);
  return buf;
}

void Report::put(const std::string& key, const std::string& value) {
  entries_.push_back({key, value, nullptr});
}

void Report::put(const std::string& key, const char* value) {
  put(key, std::string(value));
}

void Report::put(const std::string& key, double value) { put(key, format_double(value)); }

void Report::put(const std::string& key, int value) { put(key, std::to_string(value)); }

void Report::put(const std::string& key, long long value) { put(key, std::to_string(value)); }

void Report::put(const std::string& key, bool value) {
  put(key, std::string(value ? "true" : "false"));
}

Report& Report::child(const std::string& name) {
  entries_.push_back({name, "", std::make_shared<Report>()});
  return *entries_.back().section;
}

void Report::render_into(std::string& out, int depth) const {
  const std::string indent(2 * depth, ' ');
  for (const auto& e : entries_) {
    if (e.section) {
      out += indent + e.key + ":\n";
      e.section->render_into(out, depth + 1);
    } else {
      out += indent + e.key + ": " + e.value + "\n";
    }
  }
}

std::string Report::render() const {
  std::string out;
  render_into(out, 0);
  return out;
}

}  // namespace wavered
