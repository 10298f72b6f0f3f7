#include "airage/kv.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "airage/errors.hpp"

namespace airage {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace

KvMap read_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open config file: " + path);
    KvMap kv;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto pos = line.find('=');
        if (pos == std::string::npos)
            throw data_error("malformed config line in " + path + ": " + line);
        kv[trim(line.substr(0, pos))] = trim(line.substr(pos + 1));
    }
    return kv;
}

void write_kv_file(const KvMap& kv, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write config file: " + path);
    for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
}

double kv_double(const KvMap& kv, const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw data_error("missing config key: " + key);
    const std::string& text = it->second;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw data_error("config key " + key + " is not a number: " + text);
    return value;
}

double kv_double_or(const KvMap& kv, const std::string& key, double fallback) {
    return kv.count(key) != 0 ? kv_double(kv, key) : fallback;
}

std::string kv_string_or(const KvMap& kv, const std::string& key, const std::string& fallback) {
    const auto it = kv.find(key);
    return it != kv.end() ? it->second : fallback;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        const std::string item = text.substr(start, end - start);
        const std::string t = [&] {
            const auto f = item.find_first_not_of(" \t");
            if (f == std::string::npos) return std::string();
            const auto l = item.find_last_not_of(" \t");
            return item.substr(f, l - f + 1);
        }();
        if (!t.empty()) {
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (ec != std::errc{} || ptr != t.data() + t.size())
                throw data_error("not a number in list: " + t);
            values.push_back(v);
        }
        if (end == text.size()) break;
        start = end + 1;
    }
    return values;
}

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace airage
