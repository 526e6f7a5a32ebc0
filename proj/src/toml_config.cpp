#include "hybridsp/toml_config.hpp"

#include "hybridsp/types.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <vector>

namespace hybridsp::toml {

using nlohmann::json;

namespace {

bool is_bare_key_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    json document() {
        json root = json::object();
        std::vector<std::string> current;
        while (true) {
            skip_blank_lines();
            if (eof()) break;
            if (peek() == '[') {
                current = header(root);
            } else {
                key_value(table_at(root, current));
            }
            end_of_line();
        }
        return root;
    }

    json single_value() {
        skip_ws();
        json v = value();
        skip_ws();
        if (!eof()) fail("trailing characters after value");
        return v;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::set<std::string> defined_;

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("toml line " + std::to_string(line_) + ": " + what);
    }

    bool eof() const { return pos_ >= s_.size(); }
    char peek(std::size_t k = 0) const { return pos_ + k < s_.size() ? s_[pos_ + k] : '\0'; }
    bool starts_with(std::string_view p) const { return s_.substr(pos_, p.size()) == p; }

    void advance() {
        if (s_[pos_] == '\n') ++line_;
        ++pos_;
    }

    void skip_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) advance();
    }

    void skip_comment() {
        if (peek() == '#') {
            while (!eof() && peek() != '\n') advance();
        }
    }

    void skip_blank_lines() {
        while (!eof()) {
            skip_ws();
            skip_comment();
            if (peek() == '\r') advance();
            if (peek() == '\n') {
                advance();
            } else {
                break;
            }
        }
    }

    /// Whitespace, newlines and comments inside arrays.
    void skip_array_space() {
        while (!eof()) {
            skip_ws();
            skip_comment();
            if (peek() == '\n' || peek() == '\r') {
                advance();
            } else {
                break;
            }
        }
    }

    void end_of_line() {
        skip_ws();
        skip_comment();
        if (peek() == '\r') advance();
        if (eof()) return;
        if (peek() != '\n') fail("expected end of line");
        advance();
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        advance();
    }

    std::string key_part() {
        skip_ws();
        if (peek() == '"') return basic_string();
        if (peek() == '\'') return literal_string();
        const std::size_t start = pos_;
        while (!eof() && is_bare_key_char(peek())) advance();
        if (pos_ == start) fail("expected a key");
        return std::string(s_.substr(start, pos_ - start));
    }

    std::vector<std::string> key_path() {
        std::vector<std::string> path{key_part()};
        skip_ws();
        while (peek() == '.') {
            advance();
            path.push_back(key_part());
            skip_ws();
        }
        return path;
    }

    static std::string join(const std::vector<std::string>& path) {
        std::string out;
        for (const auto& p : path) {
            if (!out.empty()) out += '.';
            out += p;
        }
        return out;
    }

    json& table_at(json& root, const std::vector<std::string>& path) {
        json* t = &root;
        for (const auto& k : path) {
            json& next = (*t)[k];
            if (next.is_null()) next = json::object();
            if (!next.is_object()) fail("key '" + k + "' is not a table");
            t = &next;
        }
        return *t;
    }

    std::vector<std::string> header(json& root) {
        advance();
        if (peek() == '[') fail("arrays of tables are not supported");
        auto path = key_path();
        expect(']');
        const std::string name = join(path);
        if (!defined_.insert(name).second) fail("table [" + name + "] defined twice");
        table_at(root, path);
        return path;
    }

    void key_value(json& table) {
        auto path = key_path();
        skip_ws();
        expect('=');
        skip_ws();
        json v = value();
        const std::string last = path.back();
        path.pop_back();
        json& target = path.empty() ? table : table_at(table, path);
        if (target.contains(last)) fail("duplicate key '" + last + "'");
        target[last] = std::move(v);
    }

    json value() {
        const char c = peek();
        if (c == '"') {
            if (starts_with("\"\"\"")) fail("multi-line strings are not supported");
            return basic_string();
        }
        if (c == '\'') {
            if (starts_with("'''")) fail("multi-line strings are not supported");
            return literal_string();
        }
        if (c == '[') return array();
        if (c == '{') fail("inline tables are not supported");
        if (starts_with("true") && !is_bare_key_char(peek(4))) {
            pos_ += 4;
            return true;
        }
        if (starts_with("false") && !is_bare_key_char(peek(5))) {
            pos_ += 5;
            return false;
        }
        return number();
    }

    json array() {
        advance();
        json arr = json::array();
        while (true) {
            skip_array_space();
            if (peek() == ']') {
                advance();
                return arr;
            }
            if (eof()) fail("unterminated array");
            arr.push_back(value());
            skip_array_space();
            if (peek() == ',') {
                advance();
            } else if (peek() != ']') {
                fail("expected ',' or ']' in array");
            }
        }
    }

    std::string basic_string() {
        advance();
        std::string out;
        while (true) {
            if (eof() || peek() == '\n') fail("unterminated string");
            const char c = peek();
            advance();
            if (c == '"') return out;
            if (c != '\\') {
                out += c;
                continue;
            }
            const char e = peek();
            advance();
            switch (e) {
                case 'b': out += '\b'; break;
                case 't': out += '\t'; break;
                case 'n': out += '\n'; break;
                case 'f': out += '\f'; break;
                case 'r': out += '\r'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'u': out += unicode_escape(4); break;
                case 'U': out += unicode_escape(8); break;
                default: fail("invalid escape sequence");
            }
        }
    }

    std::string unicode_escape(int digits) {
        if (pos_ + static_cast<std::size_t>(digits) > s_.size()) fail("truncated unicode escape");
        unsigned long cp = 0;
        const auto* first = s_.data() + pos_;
        const auto [ptr, ec] = std::from_chars(first, first + digits, cp, 16);
        if (ec != std::errc() || ptr != first + digits) fail("invalid unicode escape");
        pos_ += static_cast<std::size_t>(digits);
        std::string out;
        if (cp < 0x80) {
            out += static_cast<char>(cp);
        } else if (cp < 0x800) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x110000) {
            out += static_cast<char>(0xF0 | (cp >> 18));
            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            fail("unicode escape out of range");
        }
        return out;
    }

    std::string literal_string() {
        advance();
        const std::size_t start = pos_;
        while (!eof() && peek() != '\'' && peek() != '\n') advance();
        if (peek() != '\'') fail("unterminated literal string");
        std::string out(s_.substr(start, pos_ - start));
        advance();
        return out;
    }

    json number() {
        const std::size_t start = pos_;
        while (!eof() && (is_bare_key_char(peek()) || peek() == '.' || peek() == '+')) advance();
        std::string tok(s_.substr(start, pos_ - start));
        if (tok.empty()) fail("expected a value");

        std::string body = tok;
        bool negative = false;
        if (body[0] == '+' || body[0] == '-') {
            negative = body[0] == '-';
            body.erase(0, 1);
        }
        if (body == "inf") return negative ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
        if (body == "nan") return std::numeric_limits<double>::quiet_NaN();

        std::string clean;
        for (std::size_t i = 0; i < tok.size(); ++i) {
            if (tok[i] == '_') {
                const bool ok = i > 0 && i + 1 < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i - 1])) &&
                                std::isdigit(static_cast<unsigned char>(tok[i + 1]));
                if (!ok) fail("misplaced '_' in number '" + tok + "'");
                continue;
            }
            clean += tok[i];
        }
        const std::size_t digits_at = (clean[0] == '+' || clean[0] == '-') ? 1 : 0;
        if (clean.size() > digits_at + 1 && clean[digits_at] == '0' && std::isdigit(static_cast<unsigned char>(clean[digits_at + 1]))) {
            fail("leading zeros are not allowed in '" + tok + "'");
        }
        const bool is_float = clean.find_first_of(".eE") != std::string::npos;
        const char* first = clean.data() + (clean[0] == '+' ? 1 : 0);
        const char* last = clean.data() + clean.size();
        if (is_float) {
            double d = 0.0;
            const auto [ptr, ec] = std::from_chars(first, last, d);
            if (ec != std::errc() || ptr != last) fail("invalid number '" + tok + "'");
            return d;
        }
        std::int64_t i = 0;
        const auto [ptr, ec] = std::from_chars(first, last, i);
        if (ec != std::errc() || ptr != last) fail("invalid value '" + tok + "'");
        return i;
    }
};

bool bare_key(const std::string& k) {
    if (k.empty()) return false;
    for (const char c : k) {
        if (!is_bare_key_char(c)) return false;
    }
    return true;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(c));
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out + "\"";
}

std::string key_repr(const std::string& k) { return bare_key(k) ? k : quote(k); }

std::string float_repr(double d) {
    if (std::isnan(d)) return "nan";
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    std::string out = buf;
    if (out.find_first_of(".e") == std::string::npos) out += ".0";
    return out;
}

std::string value_repr(const json& v) {
    switch (v.type()) {
        case json::value_t::boolean: return v.get<bool>() ? "true" : "false";
        case json::value_t::number_integer: return std::to_string(v.get<std::int64_t>());
        case json::value_t::number_unsigned: return std::to_string(v.get<std::uint64_t>());
        case json::value_t::number_float: return float_repr(v.get<double>());
        case json::value_t::string: return quote(v.get<std::string>());
        case json::value_t::array: {
            std::string out = "[";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out += ", ";
                out += value_repr(v[i]);
            }
            return out + "]";
        }
        case json::value_t::object: throw ConfigError("toml emit: tables inside arrays are not supported");
        default: throw ConfigError("toml emit: null values have no TOML form");
    }
}

void emit_table(std::ostringstream& out, const json& table, const std::string& prefix) {
    for (const auto& [k, v] : table.items()) {
        if (!v.is_object()) {
            out << key_repr(k) << " = " << value_repr(v) << '\n';
        }
    }
    for (const auto& [k, v] : table.items()) {
        if (v.is_object()) {
            const std::string name = prefix.empty() ? key_repr(k) : prefix + "." + key_repr(k);
            out << '\n' << '[' << name << "]\n";
            emit_table(out, v, name);
        }
    }
}

}  // namespace

json parse(std::string_view text) { return Parser(text).document(); }

json parse_value(std::string_view text) { return Parser(text).single_value(); }

std::string emit(const json& table) {
    if (!table.is_object()) {
        throw ConfigError("toml emit: document must be a table");
    }
    std::ostringstream out;
    emit_table(out, table, "");
    return out.str();
}

}  // namespace hybridsp::toml
