#pragma once

// Internal helpers for the JSON file formats: typed field access that reports the JSON
// pointer of the offending value.

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "vsearch/errors.hpp"

namespace vsearch::detail {

using json = nlohmann::json;

inline json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what(), "byte " + std::to_string(e.byte));
    }
}

inline const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw FormatError("expected an object", where.empty() ? "/" : where);
    auto it = obj.find(key);
    if (it == obj.end()) throw FormatError(std::string("missing field '") + key + "'", where.empty() ? "/" : where);
    return *it;
}

inline double get_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw FormatError("expected a number", where);
    return v.get<double>();
}

inline long long get_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw FormatError("expected an integer", where);
    return v.get<long long>();
}

inline std::uint64_t get_count(const json& v, const std::string& where) {
    long long x = get_integer(v, where);
    if (x < 0) throw FormatError("expected a non-negative integer", where);
    return static_cast<std::uint64_t>(x);
}

inline bool get_bool(const json& v, const std::string& where) {
    if (!v.is_boolean()) throw FormatError("expected a boolean", where);
    return v.get<bool>();
}

inline std::string get_string(const json& v, const std::string& where) {
    if (!v.is_string()) throw FormatError("expected a string", where);
    return v.get<std::string>();
}

inline const json& get_array(const json& v, const std::string& where) {
    if (!v.is_array()) throw FormatError("expected an array", where);
    return v;
}

inline double number_field(const json& obj, const char* key, const std::string& where) {
    return get_number(field(obj, key, where), where + "/" + key);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << content;
    if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace vsearch::detail
