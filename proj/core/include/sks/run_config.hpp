#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sks {

/// Flat key=value run configuration. Lines are `key = value`, `#` starts a
/// comment. Unknown keys are rejected; missing keys take the documented
/// defaults. The fully resolved document can be echoed back out.
class RunConfig {
  public:
    /// Built-in schema with defaults and one-line descriptions.
    RunConfig();

    static RunConfig from_file(const std::string& path);
    static RunConfig from_string(const std::string& text);

    void set(const std::string& key, const std::string& value);  // throws on unknown key
    bool has_default(const std::string& key) const;              // still at default?

    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    const std::string& get_string(const std::string& key) const;
    std::vector<double> get_list(const std::string& key) const;

    /// Full resolved document, schema order, with descriptions as comments.
    std::string resolved_text() const;

    const std::vector<std::string>& keys() const { return order_; }

  private:
    struct Entry {
        std::string value;
        std::string description;
        bool overridden = false;
    };
    std::map<std::string, Entry> entries_;
    std::vector<std::string> order_;

    void add(const std::string& key, const std::string& def, const std::string& desc);
    const Entry& lookup(const std::string& key) const;
};

}  // namespace sks
