#include "patmine/java_lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "patmine/errors.hpp"

namespace patmine {

namespace {

constexpr std::array<std::string_view, 50> kKeywords = {
    "abstract", "assert",     "boolean",   "break",     "byte",         "case",      "catch",
    "char",     "class",      "const",     "continue",  "default",      "do",        "double",
    "else",     "enum",       "extends",   "final",     "finally",      "float",     "for",
    "goto",     "if",         "implements", "import",   "instanceof",   "int",       "interface",
    "long",     "native",     "new",       "package",   "private",      "protected", "public",
    "return",   "short",      "static",    "strictfp",  "super",        "switch",    "synchronized",
    "this",     "throw",      "throws",    "transient", "try",          "void",      "volatile",
    "while",
};

// Longest first so maximal munch works with a linear scan.
constexpr std::array<std::string_view, 32> kOperators = {
    ">>>=", "<<=", ">>=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=",
    "*=",   "/=",  "%=",  "&=",  "|=", "^=", "<<", "(",  ")",  "{",  "}",  "[",  "]",  ";",  ",",  ".",
};

bool ident_start(unsigned char c) {
    return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}

bool ident_part(unsigned char c) { return ident_start(c) || std::isdigit(c); }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space_and_comments();
            if (pos_ >= src_.size()) break;
            out.push_back(next());
        }
        Token end;
        end.kind = TokenKind::End;
        end.line = line_;
        end.column = col_;
        out.push_back(end);
        return out;
    }

private:
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance(std::size_t n = 1) {
        for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
            if (src_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
    }

    void skip_space_and_comments() {
        while (pos_ < src_.size()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && peek() != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                const auto line = line_;
                const auto col = col_;
                advance(2);
                while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
                if (pos_ >= src_.size()) throw SyntaxError("unterminated comment", line, col);
                advance(2);
            } else {
                break;
            }
        }
    }

    Token make(TokenKind kind, std::size_t begin, std::size_t line, std::size_t col) const {
        Token t;
        t.kind = kind;
        t.text = std::string(src_.substr(begin, pos_ - begin));
        t.line = line;
        t.column = col;
        return t;
    }

    Token next() {
        const auto begin = pos_;
        const auto line = line_;
        const auto col = col_;
        const auto c = static_cast<unsigned char>(peek());

        if (ident_start(c)) {
            while (pos_ < src_.size() && ident_part(static_cast<unsigned char>(peek()))) advance();
            Token t = make(TokenKind::Identifier, begin, line, col);
            if (t.text == "true" || t.text == "false" || t.text == "null") {
                t.kind = TokenKind::Literal;
            } else if (is_java_keyword(t.text)) {
                t.kind = TokenKind::Keyword;
            }
            return t;
        }
        if (std::isdigit(c) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            lex_number();
            return make(TokenKind::Literal, begin, line, col);
        }
        if (c == '"' || c == '\'') {
            lex_quoted(static_cast<char>(c), line, col);
            return make(TokenKind::Literal, begin, line, col);
        }
        for (auto op : kOperators) {
            if (src_.substr(pos_, op.size()) == op) {
                advance(op.size());
                return make(TokenKind::Punct, begin, line, col);
            }
        }
        advance();
        return make(TokenKind::Punct, begin, line, col);
    }

    void lex_number() {
        while (pos_ < src_.size()) {
            const char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
                const bool exponent = (c == 'e' || c == 'E' || c == 'p' || c == 'P');
                advance();
                if (exponent && (peek() == '+' || peek() == '-')) advance();
            } else {
                break;
            }
        }
    }

    void lex_quoted(char quote, std::size_t line, std::size_t col) {
        advance();
        while (true) {
            if (pos_ >= src_.size() || peek() == '\n') {
                throw SyntaxError(quote == '"' ? "unterminated string literal"
                                               : "unterminated character literal",
                                  line, col);
            }
            const char c = peek();
            if (c == '\\') {
                advance(2);
            } else if (c == quote) {
                advance();
                return;
            } else {
                advance();
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

}  // namespace

bool is_java_keyword(std::string_view word) noexcept {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize_java(std::string_view source) { return Lexer(source).run(); }

}  // namespace patmine
