#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "setforge/patricia.hpp"
#include "setforge/wbtree.hpp"

// Text form of the two tree kinds, as read and written by the CLI:
//
//   wbset := "tip" | "(" "bin" SIZE ELEM wbset wbset ")"
//   pset  := "nil" | "(" "tip" PREFIX BITMAP ")"
//                  | "(" "bin" PREFIX MASK pset pset ")"
//
// SIZE is a decimal non-negative integer, ELEM a decimal 64-bit signed
// integer, and PREFIX/MASK/BITMAP decimal or 0x-hex 64-bit unsigned
// literals.  Tokens are whitespace-separated and case-sensitive.
// Parsing builds nodes verbatim, so corrupt dumps parse fine and are left
// for the validity checkers to judge.

namespace setforge::textio {

class parse_error : public std::runtime_error {
  public:
    parse_error(int line, int col, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(col) +
                             ": " + msg),
          line_(line),
          col_(col) {}

    int line() const { return line_; }
    int col() const { return col_; }

  private:
    int line_;
    int col_;
};

namespace detail {

struct token {
    std::string_view text;
    int line = 0;
    int col = 0;
};

// '(' and ')' are tokens of their own; everything else splits on blanks.
inline std::vector<token> tokenize(std::string_view input) {
    std::vector<token> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;
    while (i < input.size()) {
        const char c = input[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f') {
            ++col;
            ++i;
            continue;
        }
        if (c == '(' || c == ')') {
            out.push_back({input.substr(i, 1), line, col});
            ++col;
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < input.size() && input[j] != ' ' && input[j] != '\t' && input[j] != '\n' &&
               input[j] != '\r' && input[j] != '\v' && input[j] != '\f' && input[j] != '(' &&
               input[j] != ')')
            ++j;
        out.push_back({input.substr(i, j - i), line, col});
        col += static_cast<int>(j - i);
        i = j;
    }
    return out;
}

inline constexpr int max_nesting = 10000;

class reader {
  public:
    explicit reader(std::string_view input) : tokens_(tokenize(input)) {}

    const token& peek() {
        if (pos_ >= tokens_.size()) throw parse_error(last_line(), last_col(), "unexpected end of input");
        return tokens_[pos_];
    }

    token next() {
        const token& t = peek();
        ++pos_;
        return t;
    }

    void expect(std::string_view text) {
        const token t = next();
        if (t.text != text)
            throw parse_error(t.line, t.col,
                              "expected '" + std::string(text) + "', got '" + std::string(t.text) +
                                  "'");
    }

    void expect_end() {
        if (pos_ < tokens_.size()) {
            const token& t = tokens_[pos_];
            throw parse_error(t.line, t.col, "trailing garbage '" + std::string(t.text) + "'");
        }
    }

    std::int64_t parse_size() {
        const token t = next();
        std::int64_t v = 0;
        const auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{} || p != t.text.data() + t.text.size() || v < 0)
            throw parse_error(t.line, t.col,
                              "expected non-negative size, got '" + std::string(t.text) + "'");
        return v;
    }

    std::int64_t parse_elem() {
        const token t = next();
        std::int64_t v = 0;
        const auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{} || p != t.text.data() + t.text.size())
            throw parse_error(t.line, t.col,
                              "expected 64-bit signed integer, got '" + std::string(t.text) + "'");
        return v;
    }

    std::uint64_t parse_word() {
        const token t = next();
        std::string_view s = t.text;
        int base = 10;
        if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
            s.remove_prefix(2);
            base = 16;
        }
        std::uint64_t v = 0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
        if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
            throw parse_error(t.line, t.col,
                              "expected 64-bit unsigned literal, got '" + std::string(t.text) +
                                  "'");
        return v;
    }

    void enter() {
        if (++depth_ > max_nesting) {
            const token& t = tokens_[pos_ > 0 ? pos_ - 1 : 0];
            throw parse_error(t.line, t.col, "nesting deeper than the supported maximum");
        }
    }

    void leave() { --depth_; }

  private:
    int last_line() const { return tokens_.empty() ? 1 : tokens_.back().line; }
    int last_col() const { return tokens_.empty() ? 1 : tokens_.back().col; }

    std::vector<token> tokens_;
    std::size_t pos_ = 0;
    int depth_ = 0;
};

inline wb::tree<std::int64_t> parse_wb_node(reader& r) {
    const token t = r.next();
    if (t.text == "tip") return {};
    if (t.text != "(")
        throw parse_error(t.line, t.col, "expected 'tip' or '(', got '" + std::string(t.text) + "'");
    r.enter();
    r.expect("bin");
    const std::int64_t sz = r.parse_size();
    const std::int64_t elem = r.parse_elem();
    wb::tree<std::int64_t> l = parse_wb_node(r);
    wb::tree<std::int64_t> rr = parse_wb_node(r);
    r.expect(")");
    r.leave();
    return wb::make_node(sz, elem, std::move(l), std::move(rr));
}

inline pt::tree parse_pt_node(reader& r) {
    const token t = r.next();
    if (t.text == "nil") return {};
    if (t.text != "(")
        throw parse_error(t.line, t.col, "expected 'nil' or '(', got '" + std::string(t.text) + "'");
    r.enter();
    const token kind = r.next();
    if (kind.text == "tip") {
        const std::uint64_t prefix = r.parse_word();
        const std::uint64_t bitmap = r.parse_word();
        r.expect(")");
        r.leave();
        return pt::make_tip(prefix, bitmap);
    }
    if (kind.text != "bin")
        throw parse_error(kind.line, kind.col,
                          "expected 'tip' or 'bin', got '" + std::string(kind.text) + "'");
    const std::uint64_t prefix = r.parse_word();
    const std::uint64_t mask = r.parse_word();
    pt::tree l = parse_pt_node(r);
    pt::tree rr = parse_pt_node(r);
    r.expect(")");
    r.leave();
    return pt::make_bin(prefix, mask, std::move(l), std::move(rr));
}

inline void print_wb_node(const wb::node<std::int64_t>* n, std::string& out) {
    if (!n) {
        out += "tip";
        return;
    }
    out += "(bin ";
    out += std::to_string(n->size);
    out += ' ';
    out += std::to_string(n->elem);
    out += ' ';
    print_wb_node(n->left.get(), out);
    out += ' ';
    print_wb_node(n->right.get(), out);
    out += ')';
}

inline void print_pt_node(const pt::node* n, std::string& out) {
    if (!n) {
        out += "nil";
        return;
    }
    if (!n->is_bin) {
        out += "(tip ";
        out += std::to_string(n->prefix);
        out += ' ';
        out += std::to_string(n->bitmap);
        out += ')';
        return;
    }
    out += "(bin ";
    out += std::to_string(n->prefix);
    out += ' ';
    out += std::to_string(n->mask);
    out += ' ';
    print_pt_node(n->left.get(), out);
    out += ' ';
    print_pt_node(n->right.get(), out);
    out += ')';
}

}  // namespace detail

inline wb::tree<std::int64_t> parse_wbset(std::string_view input) {
    detail::reader r(input);
    auto t = detail::parse_wb_node(r);
    r.expect_end();
    return t;
}

inline pt::tree parse_pset(std::string_view input) {
    detail::reader r(input);
    auto t = detail::parse_pt_node(r);
    r.expect_end();
    return t;
}

inline std::string print_wbset(const wb::tree<std::int64_t>& t) {
    std::string out;
    detail::print_wb_node(t.get(), out);
    return out;
}

inline std::string print_pset(const pt::tree& t) {
    std::string out;
    detail::print_pt_node(t.get(), out);
    return out;
}

}  // namespace setforge::textio
