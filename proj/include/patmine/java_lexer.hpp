#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace patmine {

enum class TokenKind { Identifier, Keyword, Literal, Punct, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;

    bool is(std::string_view s) const { return (kind == TokenKind::Punct || kind == TokenKind::Keyword) && text == s; }
    bool is_ident() const { return kind == TokenKind::Identifier; }
};

bool is_java_keyword(std::string_view word) noexcept;

/// Tokenizes Java source, dropping comments. `>` is always emitted on its
/// own (except `>=`, `>>=`, `>>>=`) so nested generic closers stay
/// separate tokens. The result always ends with an End token.
/// Throws SyntaxError on unterminated literals or comments.
std::vector<Token> tokenize_java(std::string_view source);

}  // namespace patmine
