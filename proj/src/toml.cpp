#include "plbm/toml.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace plbm::iobench::toml {

namespace {

[[noreturn]] void fail(const std::string& src, int line,
                       const std::string& msg) {
    throw std::runtime_error(src + ":" + std::to_string(line) + ": " + msg);
}

bool is_bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

// Strips a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        else if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

Value parse_scalar(const std::string& tok, const std::string& src, int line) {
    Value v;
    v.line = line;
    if (tok.empty()) fail(src, line, "empty value");
    if (tok.front() == '"') {
        if (tok.size() < 2 || tok.back() != '"')
            fail(src, line, "unterminated string");
        const std::string body = tok.substr(1, tok.size() - 2);
        if (body.find('"') != std::string::npos ||
            body.find('\\') != std::string::npos)
            fail(src, line, "escapes and embedded quotes are not supported");
        v.type = Value::Type::String;
        v.str = body;
        return v;
    }
    if (tok == "true" || tok == "false") {
        v.type = Value::Type::Boolean;
        v.boolean = tok == "true";
        return v;
    }
    char* end = nullptr;
    v.num = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        fail(src, line, "bad value '" + tok + "'");
    v.type = Value::Type::Number;
    return v;
}

// Splits "[a, b, c]" contents at commas that are outside strings.
std::vector<std::string> split_array_items(const std::string& body,
                                           const std::string& src, int line) {
    std::vector<std::string> items;
    std::string cur;
    bool in_str = false;
    for (char c : body) {
        if (c == '"') in_str = !in_str;
        if (c == ',' && !in_str) {
            items.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    const std::string last = trim(cur);
    if (!last.empty()) items.push_back(last);
    if (in_str) fail(src, line, "unterminated string in array");
    for (const auto& it : items)
        if (it.empty()) fail(src, line, "empty array element");
    return items;
}

Value parse_value(const std::string& tok, const std::string& src, int line) {
    if (!tok.empty() && tok.front() == '[') {
        if (tok.back() != ']') fail(src, line, "unterminated array");
        Value v;
        v.type = Value::Type::Array;
        v.line = line;
        for (const auto& item :
             split_array_items(tok.substr(1, tok.size() - 2), src, line))
            v.array.push_back(parse_scalar(item, src, line));
        for (std::size_t i = 1; i < v.array.size(); ++i)
            if (v.array[i].type != v.array[0].type)
                fail(src, line, "mixed types in array");
        return v;
    }
    return parse_scalar(tok, src, line);
}

std::string parse_name(const std::string& inner, const std::string& src,
                       int line) {
    const std::string name = trim(inner);
    if (name.empty()) fail(src, line, "empty table name");
    for (char c : name)
        if (!is_bare_key_char(c))
            fail(src, line, "table name '" + name +
                                "' (dotted/quoted names not supported)");
    return name;
}

} // namespace

Table parse(const std::string& text, const std::string& src) {
    Table root;
    Table* current = &root;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            const bool is_list = line.size() > 1 && line[1] == '[';
            const std::string close = is_list ? "]]" : "]";
            if (line.size() < 2 * close.size() ||
                line.substr(line.size() - close.size()) != close)
                fail(src, lineno, "malformed table header");
            const std::string name =
                parse_name(line.substr(close.size(),
                                       line.size() - 2 * close.size()),
                           src, lineno);
            if (is_list) {
                auto& vec = root.lists[name];
                vec.emplace_back();
                vec.back().line = lineno;
                current = &vec.back();
            } else {
                if (root.subs.count(name))
                    fail(src, lineno, "duplicate table [" + name + "]");
                Table t;
                t.line = lineno;
                current = &root.subs.emplace(name, std::move(t)).first->second;
            }
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(src, lineno, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) fail(src, lineno, "empty key");
        for (char c : key)
            if (!is_bare_key_char(c))
                fail(src, lineno, "bad key '" + key + "'");
        if (current->kv.count(key))
            fail(src, lineno, "duplicate key '" + key + "'");
        current->kv.emplace(
            key, parse_value(trim(line.substr(eq + 1)), src, lineno));
    }
    return root;
}

Table parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

} // namespace plbm::iobench::toml
