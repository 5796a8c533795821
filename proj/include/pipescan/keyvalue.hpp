#pragma once

#include <map>
#include <string>
#include <vector>

namespace pipescan {

// Line-oriented "name = value" text files with '#' comments. Used for rig
// and scene descriptions and for scan-level metadata.
class KeyValueFile {
public:
    KeyValueFile() = default;

    static KeyValueFile load(const std::string& path);
    static KeyValueFile parse(const std::string& text);
    void save(const std::string& path) const;
    std::string serialize() const;

    bool has(const std::string& key) const;

    // Typed getters; the no-default forms raise InvalidConfig when missing.
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, long long value);
    void set(const std::string& key, int value) { set(key, static_cast<long long>(value)); }

    // Keys in first-seen order, so saved files keep a stable layout.
    const std::vector<std::string>& keys() const { return order_; }

private:
    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
};

} // namespace pipescan
