#pragma once
// Minimal strict TOML subset used for scenario configs:
//
//   key = "string" | number | true | false | [v, v, ...]
//   [table]
//   [[array-of-tables]]
//
// Single-segment names, flat homogeneous arrays, # comments. Anything
// outside the subset is a parse error with file:line context. The
// schema layer on top rejects unknown keys.

#include <map>
#include <string>
#include <vector>

namespace plbm::iobench::toml {

struct Value {
    enum class Type { String, Number, Boolean, Array };
    Type type = Type::Number;
    std::string str;
    double num = 0.0;
    bool boolean = false;
    std::vector<Value> array;
    int line = 0;
};

struct Table {
    std::map<std::string, Value> kv;
    std::map<std::string, Table> subs;
    std::map<std::string, std::vector<Table>> lists;
    int line = 0;
};

Table parse(const std::string& text, const std::string& source_name);
Table parse_file(const std::string& path);

} // namespace plbm::iobench::toml
