#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "rsbm/error.hpp"

namespace rsbm::dsl {

enum class Tok {
    Ident,
    Number,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Comma,
    Colon,
    Assign, // =
    Eq,     // ==
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    AndAnd,
    OrOr,
    Bang,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
};

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

inline std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    std::size_t line = 1;
    std::size_t col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (src.substr(i, 2) == "//") {
            while (i < src.size() && src[i] != '\n') {
                advance(1);
            }
            continue;
        }
        if (src.substr(i, 2) == "/*") {
            std::size_t l = line, cc = col;
            advance(2);
            while (i < src.size() && src.substr(i, 2) != "*/") {
                advance(1);
            }
            if (i >= src.size()) {
                throw ParseError("unterminated comment", l, cc);
            }
            advance(2);
            continue;
        }
        std::size_t l = line, cc = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
                ++j;
            }
            out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), l, cc});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
                ++j;
            }
            if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
                    ++j;
                }
            }
            out.push_back({Tok::Number, std::string(src.substr(i, j - i)), l, cc});
            advance(j - i);
            continue;
        }
        struct Punct {
            const char* text;
            Tok kind;
        };
        static constexpr Punct puncts[] = {
            {"==", Tok::Eq}, {"!=", Tok::Ne},     {"<=", Tok::Le},    {">=", Tok::Ge},    {"&&", Tok::AndAnd},
            {"||", Tok::OrOr}, {"->", Tok::Arrow}, {"{", Tok::LBrace}, {"}", Tok::RBrace}, {"(", Tok::LParen},
            {")", Tok::RParen}, {";", Tok::Semi},  {",", Tok::Comma},  {":", Tok::Colon},  {"=", Tok::Assign},
            {"<", Tok::Lt},    {">", Tok::Gt},     {"!", Tok::Bang},   {"+", Tok::Plus},   {"-", Tok::Minus},
            {"*", Tok::Star},  {"/", Tok::Slash},
        };
        bool matched = false;
        for (const auto& p : puncts) {
            std::string_view t(p.text);
            if (src.substr(i, t.size()) == t) {
                out.push_back({p.kind, std::string(t), l, cc});
                advance(t.size());
                matched = true;
                break;
            }
        }
        if (!matched) {
            throw ParseError(std::string("unexpected character '") + c + "'", l, cc);
        }
    }
    out.push_back({Tok::Eof, "", line, col});
    return out;
}

} // namespace rsbm::dsl
