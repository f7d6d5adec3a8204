#include "cobandit/textio.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cobandit {

std::string fmt_double(double v) {
    // %.17g round-trips any double; prefer the shortest representation that
    // still parses back to the same bits, for readable files.
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_int(std::int64_t v) { return std::to_string(v); }

bool KvFile::has(const std::string& key) const {
    for (const auto& r : records)
        if (r.key == key) return true;
    return false;
}

const KvRecord& KvFile::get(const std::string& key) const {
    for (const auto& r : records)
        if (r.key == key) return r;
    throw std::runtime_error("missing key '" + key + "'");
}

std::vector<const KvRecord*> KvFile::all(const std::string& key) const {
    std::vector<const KvRecord*> out;
    for (const auto& r : records)
        if (r.key == key) out.push_back(&r);
    return out;
}

KvFile parse_kv_text(const std::string& text, const std::string& origin) {
    KvFile file;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        KvRecord rec;
        rec.key = key;
        std::string tok;
        while (ls >> tok) rec.values.push_back(tok);
        (void)origin;
        (void)lineno;
        file.records.push_back(std::move(rec));
    }
    return file;
}

KvFile read_kv_file(const std::string& path) {
    return parse_kv_text(read_text_file(path), path);
}

double parse_double(const std::string& s, const std::string& context) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE)
        throw std::runtime_error(context + ": cannot parse '" + s + "' as a real");
    return v;
}

std::int64_t parse_int(const std::string& s, const std::string& context) {
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE)
        throw std::runtime_error(context + ": cannot parse '" + s + "' as an integer");
    return static_cast<std::int64_t>(v);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace cobandit
