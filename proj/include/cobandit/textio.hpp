#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Line-oriented key/value text format shared by instance files, config files
// and summaries. One record per line: "key v1 v2 ...". '#' starts a comment.
// Emission is deterministic so replayed runs produce byte-identical files.

namespace cobandit {

// Shortest round-trip-exact decimal for a double.
std::string fmt_double(double v);

std::string fmt_int(std::int64_t v);

struct KvRecord {
    std::string key;
    std::vector<std::string> values;
};

// Parsed file: records in file order. Keys may repeat (e.g. local_set lines).
struct KvFile {
    std::vector<KvRecord> records;

    bool has(const std::string& key) const;
    // First record with this key; throws std::runtime_error if absent.
    const KvRecord& get(const std::string& key) const;
    std::vector<const KvRecord*> all(const std::string& key) const;
};

KvFile parse_kv_text(const std::string& text, const std::string& origin);
KvFile read_kv_file(const std::string& path);

double parse_double(const std::string& s, const std::string& context);
std::int64_t parse_int(const std::string& s, const std::string& context);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace cobandit
