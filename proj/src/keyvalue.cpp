#include "pipescan/keyvalue.hpp"

#include <fstream>
#include <sstream>

#include "pipescan/errors.hpp"

namespace pipescan {

namespace {

std::string trim(const std::string& s) {
    const char* ws = " \t\r\n";
    const auto a = s.find_first_not_of(ws);
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(ws);
    return s.substr(a, b - a + 1);
}

} // namespace

KeyValueFile KeyValueFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::IoFailure, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse(ss.str());
    } catch (const Error& e) {
        throw Error(e.kind(), path + ": " + e.what());
    }
}

KeyValueFile KeyValueFile::parse(const std::string& text) {
    KeyValueFile kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            raise(ErrorKind::InvalidConfig, "line " + std::to_string(lineno) + " has no '='");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            raise(ErrorKind::InvalidConfig, "line " + std::to_string(lineno) + " has empty key");
        kv.set(key, value);
    }
    return kv;
}

std::string KeyValueFile::serialize() const {
    std::ostringstream out;
    for (const auto& key : order_) out << key << " = " << values_.at(key) << "\n";
    return out.str();
}

void KeyValueFile::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) raise(ErrorKind::IoFailure, "cannot write " + path);
    out << serialize();
    if (!out) raise(ErrorKind::IoFailure, "write failed for " + path);
}

bool KeyValueFile::has(const std::string& key) const { return values_.count(key) != 0; }

std::string KeyValueFile::get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) raise(ErrorKind::InvalidConfig, "missing key '" + key + "'");
    return it->second;
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KeyValueFile::get_double(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        raise(ErrorKind::InvalidConfig, "key '" + key + "' is not a number: '" + v + "'");
    }
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long KeyValueFile::get_int(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        raise(ErrorKind::InvalidConfig, "key '" + key + "' is not an integer: '" + v + "'");
    }
}

long long KeyValueFile::get_int(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get_string(key);
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    raise(ErrorKind::InvalidConfig, "key '" + key + "' is not a boolean: '" + v + "'");
}

void KeyValueFile::set(const std::string& key, const std::string& value) {
    if (values_.find(key) == values_.end()) order_.push_back(key);
    values_[key] = value;
}

void KeyValueFile::set(const std::string& key, double value) {
    std::ostringstream ss;
    ss.precision(17);
    ss << value;
    set(key, ss.str());
}

void KeyValueFile::set(const std::string& key, long long value) { set(key, std::to_string(value)); }

} // namespace pipescan
