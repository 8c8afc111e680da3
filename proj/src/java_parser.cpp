#include "patmine/java_parser.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

#include "patmine/errors.hpp"
#include "patmine/java_lexer.hpp"

namespace patmine {

// ---------------------------------------------------------------------------
// Model helpers

namespace {

struct ModifierName {
    Modifier modifier;
    std::string_view name;
};

constexpr std::array<ModifierName, 12> kModifierNames = {{
    {Modifier::Public, "public"},
    {Modifier::Protected, "protected"},
    {Modifier::Private, "private"},
    {Modifier::Default, "default"},
    {Modifier::Abstract, "abstract"},
    {Modifier::Static, "static"},
    {Modifier::Final, "final"},
    {Modifier::Synchronized, "synchronized"},
    {Modifier::Native, "native"},
    {Modifier::Transient, "transient"},
    {Modifier::Volatile, "volatile"},
    {Modifier::Strictfp, "strictfp"},
}};

}  // namespace

std::vector<std::string_view> Modifiers::names() const {
    std::vector<std::string_view> out;
    for (const auto& m : kModifierNames) {
        if (has(m.modifier)) out.push_back(m.name);
    }
    return out;
}

std::optional<Modifier> modifier_from_keyword(std::string_view word) noexcept {
    for (const auto& m : kModifierNames) {
        if (m.modifier != Modifier::Default && m.name == word) return m.modifier;
    }
    return std::nullopt;
}

std::string_view to_string(TypeKind kind) noexcept {
    switch (kind) {
        case TypeKind::Class: return "class";
        case TypeKind::Interface: return "interface";
        case TypeKind::Enum: return "enum";
    }
    return "class";
}

std::string_view to_string(StatementKind kind) noexcept {
    switch (kind) {
        case StatementKind::Assignment: return "assignment";
        case StatementKind::LocalDeclaration: return "local-declaration";
        case StatementKind::Conditional: return "conditional";
        case StatementKind::Loop: return "loop";
        case StatementKind::Return: return "return";
        case StatementKind::Invocation: return "invocation";
        case StatementKind::Other: return "other";
    }
    return "other";
}

const ParsedFile* CodeModel::find(const FileKey& key) const {
    for (const auto& f : files) {
        if (f.file == key) return &f;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

constexpr std::array<std::string_view, 8> kPrimitives = {"boolean", "byte",  "char", "short",
                                                         "int",     "long",  "float", "double"};

constexpr std::array<std::string_view, 12> kAssignOps = {"=",  "+=", "-=", "*=",  "/=",  "%=",
                                                         "&=", "|=", "^=", "<<=", ">>=", ">>>="};

bool is_primitive(const Token& t) {
    return t.kind == TokenKind::Keyword &&
           std::find(kPrimitives.begin(), kPrimitives.end(), t.text) != kPrimitives.end();
}

bool is_assign_op(const Token& t) {
    return t.kind == TokenKind::Punct &&
           std::find(kAssignOps.begin(), kAssignOps.end(), t.text) != kAssignOps.end();
}

bool starts_upper(const std::string& s) { return !s.empty() && s[0] >= 'A' && s[0] <= 'Z'; }

using Scope = std::unordered_map<std::string, std::string>;

/// Context for parsing one method body. Anonymous and local class bodies
/// nested inside write into the same context.
struct BodyContext {
    MethodModel* method;
    const Scope* fields;
    std::optional<std::string> super_type;
    Scope locals;
};

struct PendingBody {
    std::size_t class_index;
    std::size_t method_index;
    std::size_t open;  // index of '{'
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) { match_brackets(); }

    std::vector<ClassModel> run() {
        skip_package_and_imports();
        while (!at_end()) {
            if (tok().is(";")) {
                ++pos_;
                continue;
            }
            parse_type_declaration("", {});
        }
        return std::move(classes_);
    }

private:
    // -- token access -------------------------------------------------------

    const Token& tok(std::size_t ahead = 0) const {
        const auto i = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[i];
    }

    const Token& at(std::size_t i) const { return toks_[std::min(i, toks_.size() - 1)]; }

    bool at_end() const { return tok().kind == TokenKind::End; }

    [[noreturn]] void fail(const std::string& what, const Token& where) const {
        throw SyntaxError(what, where.line, where.column);
    }

    void expect(std::string_view s) {
        if (!tok().is(s)) fail("expected '" + std::string(s) + "' but found '" + tok().text + "'", tok());
        ++pos_;
    }

    std::string expect_ident() {
        if (!tok().is_ident()) fail("expected identifier but found '" + tok().text + "'", tok());
        return toks_[pos_++].text;
    }

    void match_brackets() {
        match_.assign(toks_.size(), 0);
        std::vector<std::size_t> stack;
        for (std::size_t i = 0; i < toks_.size(); ++i) {
            const auto& t = toks_[i];
            if (t.kind != TokenKind::Punct) continue;
            if (t.text == "(" || t.text == "[" || t.text == "{") {
                stack.push_back(i);
            } else if (t.text == ")" || t.text == "]" || t.text == "}") {
                if (stack.empty()) fail("unbalanced '" + t.text + "'", t);
                const auto open = stack.back();
                const char want = t.text == ")" ? '(' : t.text == "]" ? '[' : '{';
                if (toks_[open].text[0] != want) {
                    fail("mismatched '" + t.text + "' (opened by '" + toks_[open].text + "' at " +
                             std::to_string(toks_[open].line) + ":" +
                             std::to_string(toks_[open].column) + ")",
                         t);
                }
                match_[open] = i;
                match_[i] = open;
                stack.pop_back();
            } else if (t.text == "->" || t.text == "::") {
                fail("Java 8 lambda/method reference syntax is not supported", t);
            }
        }
        if (!stack.empty()) fail("unclosed '" + toks_[stack.back()].text + "'", toks_[stack.back()]);
    }

    // -- declarations -------------------------------------------------------

    void skip_package_and_imports() {
        while (true) {
            const auto save = pos_;
            skip_annotations();
            if (tok().is("package") || tok().is("import")) {
                while (!at_end() && !tok().is(";")) ++pos_;
                expect(";");
            } else {
                pos_ = save;
                return;
            }
        }
    }

    void skip_annotation() {
        // '@' Name ('.' Name)* [ '(' ... ')' ]
        ++pos_;
        expect_ident();
        while (tok().is(".") && tok(1).is_ident()) pos_ += 2;
        if (tok().is("(")) pos_ = match_[pos_] + 1;
    }

    void skip_annotations() {
        while (tok().is("@") && !tok(1).is("interface")) skip_annotation();
    }

    Modifiers parse_modifiers() {
        Modifiers mods;
        while (true) {
            if (tok().is("@") && !tok(1).is("interface")) {
                skip_annotation();
            } else if (tok().kind == TokenKind::Keyword) {
                auto m = modifier_from_keyword(tok().text);
                if (!m) break;
                mods.add(*m);
                ++pos_;
            } else {
                break;
            }
        }
        return mods;
    }

    /// Skips `<...>` starting at pos_; restores pos_ and returns false when
    /// the tokens cannot be type arguments.
    bool try_skip_type_arguments() {
        const auto save = pos_;
        int depth = 0;
        do {
            if (at_end() || tok().is("(") || tok().is("{") || tok().is(";") || tok().is(")") ||
                tok().is("=")) {
                pos_ = save;
                return false;
            }
            if (tok().is("<")) {
                ++depth;
            } else if (tok().is(">")) {
                --depth;
            }
            ++pos_;
        } while (depth > 0);
        return true;
    }

    void skip_type_arguments() {
        if (!try_skip_type_arguments()) fail("malformed type arguments", tok());
    }

    /// Parses a type and returns its erased spelling, or nullopt without
    /// consuming anything when no type starts here.
    std::optional<std::string> try_parse_type() {
        const auto save = pos_;
        std::string name;
        if (is_primitive(tok()) || tok().is("void")) {
            name = toks_[pos_++].text;
        } else if (tok().is_ident()) {
            name = toks_[pos_++].text;
            if (tok().is("<") && !try_skip_type_arguments()) {
                pos_ = save;
                return std::nullopt;
            }
            while (tok().is(".") && tok(1).is_ident()) {
                name += "." + tok(1).text;
                pos_ += 2;
                if (tok().is("<") && !try_skip_type_arguments()) {
                    pos_ = save;
                    return std::nullopt;
                }
            }
        } else {
            pos_ = save;
            return std::nullopt;
        }
        while (tok().is("[") && tok(1).is("]")) {
            name += "[]";
            pos_ += 2;
        }
        return name;
    }

    std::string parse_type() {
        auto t = try_parse_type();
        if (!t) fail("expected type but found '" + tok().text + "'", tok());
        return *t;
    }

    std::vector<std::string> parse_type_list() {
        std::vector<std::string> out;
        out.push_back(parse_type());
        while (tok().is(",")) {
            ++pos_;
            out.push_back(parse_type());
        }
        return out;
    }

    void add_unique(std::vector<std::string>& names, const std::string& name) {
        if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    }

    void parse_type_declaration(const std::string& prefix, const std::vector<std::size_t>& outer) {
        Modifiers mods = parse_modifiers();
        mods.close_access();

        ClassModel cls;
        cls.modifiers = mods;
        cls.line = tok().line;
        bool annotation_type = false;
        if (tok().is("class")) {
            cls.kind = TypeKind::Class;
        } else if (tok().is("interface")) {
            cls.kind = TypeKind::Interface;
        } else if (tok().is("enum")) {
            cls.kind = TypeKind::Enum;
        } else if (tok().is("@") && tok(1).is("interface")) {
            cls.kind = TypeKind::Interface;
            annotation_type = true;
            ++pos_;
        } else {
            fail("expected type declaration but found '" + tok().text + "'", tok());
        }
        ++pos_;
        const std::string simple = expect_ident();
        cls.name = prefix.empty() ? simple : prefix + "." + simple;
        if (tok().is("<")) skip_type_arguments();

        if (cls.kind == TypeKind::Class) {
            if (tok().is("extends")) {
                ++pos_;
                cls.extends_name = parse_type();
            }
            if (tok().is("implements")) {
                ++pos_;
                for (auto& t : parse_type_list()) add_unique(cls.implements_names, t);
            }
        } else if (cls.kind == TypeKind::Interface && !annotation_type) {
            if (tok().is("extends")) {
                ++pos_;
                auto supers = parse_type_list();
                cls.extends_name = supers.front();
                for (std::size_t i = 1; i < supers.size(); ++i) add_unique(cls.implements_names, supers[i]);
            }
        } else if (cls.kind == TypeKind::Enum) {
            if (tok().is("implements")) {
                ++pos_;
                for (auto& t : parse_type_list()) add_unique(cls.implements_names, t);
            }
        }
        if (!tok().is("{")) fail("expected '{' to open body of " + cls.name, tok());

        const auto index = classes_.size();
        classes_.push_back(std::move(cls));
        auto chain = outer;
        chain.push_back(index);
        parse_class_body(index, simple, chain);
    }

    void parse_enum_constants(std::size_t close) {
        while (pos_ < close && !tok().is(";")) {
            if (tok().is("{") || tok().is("(")) {
                pos_ = match_[pos_] + 1;
            } else {
                ++pos_;
            }
        }
        if (tok().is(";")) ++pos_;
    }

    void parse_class_body(std::size_t index, const std::string& simple,
                          const std::vector<std::size_t>& chain) {
        const auto open = pos_;
        const auto close = match_[open];
        pos_ = open + 1;
        if (classes_[index].kind == TypeKind::Enum) parse_enum_constants(close);

        std::vector<PendingBody> bodies;
        while (pos_ < close) {
            if (tok().is(";")) {
                ++pos_;
                continue;
            }
            if (tok().is("{")) {  // instance initializer
                pos_ = match_[pos_] + 1;
                continue;
            }
            const auto member_start = pos_;
            Modifiers mods = parse_modifiers();
            if (tok().is("{")) {  // static initializer
                pos_ = match_[pos_] + 1;
                continue;
            }
            if (tok().is("class") || tok().is("interface") || tok().is("enum") ||
                (tok().is("@") && tok(1).is("interface"))) {
                pos_ = member_start;
                parse_type_declaration(classes_[index].name, chain);
                continue;
            }
            if (tok().is("<")) skip_type_arguments();

            MethodModel method;
            method.line = tok().line;
            if (tok().is_ident() && tok().text == simple && tok(1).is("(")) {
                method.name = expect_ident();
                method.return_type = std::string(kConstructorReturn);
            } else {
                const std::string type = parse_type();
                const std::string name = expect_ident();
                if (!tok().is("(")) {
                    parse_field_declarators(index, type, name, close);
                    continue;
                }
                method.name = name;
                method.return_type = type;
            }
            mods.close_access();
            method.modifiers = mods;
            method.parameters = parse_parameters();
            while (tok().is("[") && tok(1).is("]")) pos_ += 2;
            if (tok().is("throws")) {
                ++pos_;
                parse_type_list();
            }
            if (tok().is("default")) {  // annotation element default value
                while (pos_ < close && !tok().is(";")) {
                    pos_ = (tok().is("(") || tok().is("{")) ? match_[pos_] + 1 : pos_ + 1;
                }
            }
            auto& methods = classes_[index].methods;
            if (tok().is("{")) {
                method.has_body = true;
                const auto body_close = match_[pos_];
                const auto open_line = tok().line;
                const auto close_line = at(body_close).line;
                method.line_count = close_line > open_line + 1 ? close_line - open_line - 1 : 0;
                bodies.push_back({index, methods.size(), pos_});
                pos_ = body_close + 1;
            } else {
                expect(";");
            }
            methods.push_back(std::move(method));
        }
        pos_ = close + 1;

        // Bodies are parsed once every field of the class is known.
        Scope fields;
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            for (const auto& f : classes_[*it].fields) fields.emplace(f.name, f.type);
        }
        const auto saved = pos_;
        for (const auto& body : bodies) {
            auto& method = classes_[body.class_index].methods[body.method_index];
            BodyContext ctx{&method, &fields, classes_[index].extends_name, {}};
            for (const auto& p : method.parameters) ctx.locals[p.name] = p.type;
            parse_block_at(body.open, ctx);
        }
        pos_ = saved;
    }

    void parse_field_declarators(std::size_t index, const std::string& type, std::string name,
                                 std::size_t close) {
        while (true) {
            std::string declared = type;
            while (tok().is("[") && tok(1).is("]")) {
                declared += "[]";
                pos_ += 2;
            }
            classes_[index].fields.push_back({name, declared});
            // Skip the initializer up to ',' or ';' at this nesting level.
            while (pos_ < close && !tok().is(",") && !tok().is(";")) {
                pos_ = (tok().is("(") || tok().is("{") || tok().is("[")) ? match_[pos_] + 1 : pos_ + 1;
            }
            if (tok().is(",")) {
                ++pos_;
                name = expect_ident();
                continue;
            }
            expect(";");
            return;
        }
    }

    std::vector<NameAndType> parse_parameters() {
        const auto close = match_[pos_];
        expect("(");
        std::vector<NameAndType> params;
        while (pos_ < close) {
            parse_modifiers();
            std::string type = parse_type();
            if (tok().is("...")) {
                type += "[]";
                ++pos_;
            }
            std::string name = expect_ident();
            while (tok().is("[") && tok(1).is("]")) {
                type += "[]";
                pos_ += 2;
            }
            params.push_back({std::move(name), std::move(type)});
            if (tok().is(",")) {
                ++pos_;
            } else if (pos_ != close) {
                fail("unexpected '" + tok().text + "' in parameter list", tok());
            }
        }
        pos_ = close + 1;
        return params;
    }

    // -- statements ---------------------------------------------------------

    void record(BodyContext& ctx, StatementKind kind, std::size_t line) {
        ctx.method->statements.push_back({kind, line});
        if (kind == StatementKind::LocalDeclaration) ++ctx.method->local_variable_count;
    }

    void parse_block_at(std::size_t open, BodyContext& ctx) {
        const auto close = match_[open];
        pos_ = open + 1;
        while (pos_ < close) parse_statement(ctx, close);
        pos_ = close + 1;
    }

    /// Index of the next ';' at the current nesting level, bounded by `limit`.
    std::size_t find_semicolon(std::size_t from, std::size_t limit) const {
        std::size_t i = from;
        while (i < limit && !at(i).is(";")) {
            const auto& t = at(i);
            i = (t.is("(") || t.is("{") || t.is("[")) ? match_[i] + 1 : i + 1;
        }
        return i;
    }

    void parse_statement(BodyContext& ctx, std::size_t limit) {
        const Token& t = tok();
        const auto line = t.line;

        if (t.is("{")) {
            parse_block_at(pos_, ctx);
            return;
        }
        if (t.is(";")) {
            ++pos_;
            return;
        }
        if (t.is("if")) {
            record(ctx, StatementKind::Conditional, line);
            ++pos_;
            scan_parenthesized(ctx);
            parse_statement(ctx, limit);
            if (tok().is("else")) {
                ++pos_;
                parse_statement(ctx, limit);
            }
            return;
        }
        if (t.is("switch")) {
            record(ctx, StatementKind::Conditional, line);
            ++pos_;
            scan_parenthesized(ctx);
            if (!tok().is("{")) fail("expected '{' after switch", tok());
            const auto close = match_[pos_];
            ++pos_;
            while (pos_ < close) {
                if (tok().is("case")) {
                    ++pos_;
                    const auto begin = pos_;
                    while (pos_ < close && !tok().is(":")) {
                        pos_ = tok().is("(") ? match_[pos_] + 1 : pos_ + 1;
                    }
                    scan_expression(ctx, begin, pos_);
                    ++pos_;
                } else if (tok().is("default") && tok(1).is(":")) {
                    pos_ += 2;
                } else {
                    parse_statement(ctx, close);
                }
            }
            pos_ = close + 1;
            return;
        }
        if (t.is("while")) {
            record(ctx, StatementKind::Loop, line);
            ++pos_;
            scan_parenthesized(ctx);
            parse_statement(ctx, limit);
            return;
        }
        if (t.is("do")) {
            record(ctx, StatementKind::Loop, line);
            ++pos_;
            parse_statement(ctx, limit);
            if (tok().is("while")) {
                ++pos_;
                scan_parenthesized(ctx);
            }
            if (tok().is(";")) ++pos_;
            return;
        }
        if (t.is("for")) {
            record(ctx, StatementKind::Loop, line);
            ++pos_;
            parse_for_header(ctx);
            parse_statement(ctx, limit);
            return;
        }
        if (t.is("return")) {
            record(ctx, StatementKind::Return, line);
            finish_simple(ctx, pos_ + 1, limit);
            return;
        }
        if (t.is("throw") || t.is("assert") || t.is("break") || t.is("continue")) {
            record(ctx, StatementKind::Other, line);
            finish_simple(ctx, pos_ + 1, limit);
            return;
        }
        if (t.is("try")) {
            record(ctx, StatementKind::Other, line);
            parse_try(ctx);
            return;
        }
        if (t.is("synchronized") && tok(1).is("(")) {
            record(ctx, StatementKind::Other, line);
            ++pos_;
            scan_parenthesized(ctx);
            if (tok().is("{")) parse_block_at(pos_, ctx);
            return;
        }
        if ((t.is("this") || t.is("super")) && tok(1).is("(")) {
            // explicit constructor invocation; not a method call
            record(ctx, StatementKind::Other, line);
            const auto close = match_[pos_ + 1];
            scan_expression(ctx, pos_ + 2, close);
            finish_simple(ctx, close + 1, limit);
            return;
        }
        if (t.is_ident() && tok(1).is(":")) {  // label
            pos_ += 2;
            parse_statement(ctx, limit);
            return;
        }
        if (is_local_class_start()) {
            record(ctx, StatementKind::Other, line);
            fold_local_class(ctx);
            return;
        }
        if (try_local_declaration(ctx, limit)) return;

        // expression statement
        const auto begin = pos_;
        const auto end = find_semicolon(begin, limit);
        const bool top_level_call = scan_expression(ctx, begin, end);
        StatementKind kind = StatementKind::Other;
        if (has_top_level_assignment(begin, end)) {
            kind = StatementKind::Assignment;
        } else if (end > begin && (at(begin).is("++") || at(begin).is("--") || at(end - 1).is("++") ||
                                   at(end - 1).is("--"))) {
            kind = StatementKind::Assignment;
        } else if (top_level_call) {
            kind = StatementKind::Invocation;
        }
        record(ctx, kind, line);
        pos_ = end < limit ? end + 1 : limit;
    }

    void finish_simple(BodyContext& ctx, std::size_t from, std::size_t limit) {
        const auto end = find_semicolon(from, limit);
        scan_expression(ctx, from, end);
        pos_ = end < limit ? end + 1 : limit;
    }

    void scan_parenthesized(BodyContext& ctx) {
        if (!tok().is("(")) fail("expected '(' but found '" + tok().text + "'", tok());
        const auto close = match_[pos_];
        scan_expression(ctx, pos_ + 1, close);
        pos_ = close + 1;
    }

    bool has_top_level_assignment(std::size_t begin, std::size_t end) const {
        for (std::size_t i = begin; i < end;) {
            const auto& t = at(i);
            if (t.is("(") || t.is("[") || t.is("{")) {
                i = match_[i] + 1;
                continue;
            }
            if (is_assign_op(t)) return true;
            ++i;
        }
        return false;
    }

    bool is_local_class_start() const {
        std::size_t i = pos_;
        while (at(i).is("final") || at(i).is("abstract") || at(i).is("static")) ++i;
        return at(i).is("class") || at(i).is("interface") || at(i).is("enum");
    }

    void fold_local_class(BodyContext& ctx) {
        while (!tok().is("{") && !at_end()) ++pos_;
        fold_class_body(pos_, ctx);
    }

    /// Parses a local declaration if one starts at pos_. Leaves pos_
    /// untouched and returns false otherwise.
    bool try_local_declaration(BodyContext& ctx, std::size_t limit) {
        const auto save = pos_;
        const auto line = tok().line;
        while (tok().is("final") || (tok().is("@") && !tok(1).is("interface"))) {
            if (tok().is("final")) {
                ++pos_;
            } else {
                skip_annotation();
            }
        }
        std::optional<std::string> type;
        if (!tok().is("void")) type = try_parse_type();
        if (!type || !tok().is_ident() ||
            !(tok(1).is("=") || tok(1).is(";") || tok(1).is(",") || tok(1).is("["))) {
            pos_ = save;
            return false;
        }
        record(ctx, StatementKind::LocalDeclaration, line);
        while (true) {
            const std::string name = expect_ident();
            std::string declared = *type;
            while (tok().is("[") && tok(1).is("]")) {
                declared += "[]";
                pos_ += 2;
            }
            ctx.locals[name] = declared;
            if (tok().is("=")) {
                ++pos_;
                const auto begin = pos_;
                auto end = begin;
                while (end < limit && !at(end).is(",") && !at(end).is(";")) {
                    const auto& t = at(end);
                    end = (t.is("(") || t.is("{") || t.is("[")) ? match_[end] + 1 : end + 1;
                }
                scan_expression(ctx, begin, end);
                pos_ = end;
            }
            if (tok().is(",") && pos_ < limit) {
                ++pos_;
                continue;
            }
            if (tok().is(";")) ++pos_;
            return true;
        }
    }

    void parse_for_header(BodyContext& ctx) {
        if (!tok().is("(")) fail("expected '(' after for", tok());
        const auto close = match_[pos_];
        ++pos_;
        // Enhanced for: a ':' at the top level of the header.
        std::size_t colon = close;
        for (std::size_t i = pos_; i < close;) {
            if (at(i).is("(") || at(i).is("[") || at(i).is("{")) {
                i = match_[i] + 1;
                continue;
            }
            if (at(i).is(":")) {
                colon = i;
                break;
            }
            if (at(i).is("?") || at(i).is(";")) break;
            ++i;
        }
        if (colon != close) {
            while (tok().is("final") || tok().is("@")) {
                if (tok().is("final")) {
                    ++pos_;
                } else {
                    skip_annotation();
                }
            }
            auto type = try_parse_type();
            if (type && tok().is_ident() && pos_ + 1 == colon) ctx.locals[tok().text] = *type;
            scan_expression(ctx, colon + 1, close);
            pos_ = close + 1;
            return;
        }
        // Classic for: init ; condition ; update
        const auto first_semi = find_semicolon(pos_, close);
        {
            const auto save = pos_;
            while (tok().is("final")) ++pos_;
            const auto type = try_parse_type();
            if (type && tok().is_ident() && (tok(1).is("=") || tok(1).is(",") || tok(1).is(";"))) {
                std::size_t i = pos_;
                while (i < first_semi) {
                    if (at(i).is_ident() && (i == pos_ || at(i - 1).is(","))) ctx.locals[at(i).text] = *type;
                    i = (at(i).is("(") || at(i).is("{") || at(i).is("[")) ? match_[i] + 1 : i + 1;
                }
            } else {
                pos_ = save;
            }
        }
        scan_expression(ctx, pos_, first_semi);
        scan_expression(ctx, std::min(first_semi + 1, close), close);
        pos_ = close + 1;
    }

    void parse_try(BodyContext& ctx) {
        ++pos_;  // try
        if (tok().is("(")) {  // try-with-resources
            const auto close = match_[pos_];
            ++pos_;
            while (pos_ < close) {
                const auto end = find_semicolon(pos_, close);
                const auto save = pos_;
                while (tok().is("final")) ++pos_;
                auto type = try_parse_type();
                if (type && tok().is_ident() && tok(1).is("=")) {
                    ctx.locals[tok().text] = *type;
                    scan_expression(ctx, pos_ + 2, end);
                } else {
                    pos_ = save;
                    scan_expression(ctx, save, end);
                }
                pos_ = end < close ? end + 1 : close;
            }
            pos_ = close + 1;
        }
        if (tok().is("{")) parse_block_at(pos_, ctx);
        while (tok().is("catch")) {
            ++pos_;
            if (!tok().is("(")) fail("expected '(' after catch", tok());
            const auto close = match_[pos_];
            ++pos_;
            parse_modifiers();
            std::string type = parse_type();
            while (tok().is("|")) {
                ++pos_;
                parse_type();
            }
            if (tok().is_ident()) ctx.locals[tok().text] = type;
            pos_ = close + 1;
            if (tok().is("{")) parse_block_at(pos_, ctx);
        }
        if (tok().is("finally")) {
            ++pos_;
            if (tok().is("{")) parse_block_at(pos_, ctx);
        }
    }

    // -- expressions --------------------------------------------------------

    /// Records a CallSite for every method invocation in [begin, end) and
    /// folds anonymous class bodies. Returns true if an invocation sits at
    /// the top nesting level of the range.
    bool scan_expression(BodyContext& ctx, std::size_t begin, std::size_t end) {
        bool top_level_call = false;
        int depth = 0;
        std::vector<std::size_t> closers;
        for (std::size_t i = begin; i < end;) {
            while (!closers.empty() && closers.back() == i) {
                closers.pop_back();
                --depth;
            }
            const Token& t = at(i);
            if (t.is("new")) {
                i = scan_creation(ctx, i, end);
                continue;
            }
            if (t.is_ident() && at(i + 1).is("(")) {
                record_call(ctx, i);
                if (depth == 0) top_level_call = true;
            }
            if (t.is("(") || t.is("[") || t.is("{")) {
                closers.push_back(match_[i]);
                ++depth;
            }
            ++i;
        }
        return top_level_call;
    }

    /// Handles `new Type(args) [body]` or `new Type[...] [{...}]` starting at
    /// index `i`; returns the index just past the construct's head so the
    /// caller keeps scanning arguments and initializers.
    std::size_t scan_creation(BodyContext& ctx, std::size_t i, std::size_t end) {
        std::size_t j = i + 1;
        // Skip the type: identifiers, dots, type arguments, primitives.
        while (j < end) {
            const auto& t = at(j);
            if (t.is_ident() || t.is(".") || is_primitive(t)) {
                ++j;
            } else if (t.is("<")) {
                int depth = 0;
                do {
                    if (at(j).is("<")) ++depth;
                    if (at(j).is(">")) --depth;
                    ++j;
                } while (depth > 0 && j < end);
            } else {
                break;
            }
        }
        if (j < end && at(j).is("(")) {
            const auto close = match_[j];
            scan_expression(ctx, j + 1, close);
            if (close + 1 < end && at(close + 1).is("{")) {
                const auto body_close = match_[close + 1];
                const auto saved = pos_;
                fold_class_body(close + 1, ctx);
                pos_ = saved;
                return body_close + 1;
            }
            return close + 1;
        }
        return j;
    }

    /// Walks an anonymous or local class body and parses each method body
    /// into the enclosing method.
    void fold_class_body(std::size_t open, BodyContext& ctx) {
        const auto close = match_[open];
        pos_ = open + 1;
        while (pos_ < close) {
            if (tok().is("{")) {
                parse_block_at(pos_, ctx);
                continue;
            }
            if (tok().is("(")) {
                pos_ = match_[pos_] + 1;
                continue;
            }
            if (tok().is("class") || tok().is("interface") || tok().is("enum")) {
                while (pos_ < close && !tok().is("{")) ++pos_;
                if (pos_ < close) fold_class_body(pos_, ctx);
                continue;
            }
            // A method header is `name ( params ) [throws ...] {`.
            if (tok().is_ident() && tok(1).is("(")) {
                const auto pclose = match_[pos_ + 1];
                std::size_t k = pclose + 1;
                while (k < close && !at(k).is("{") && !at(k).is(";") && !at(k).is("=")) ++k;
                if (at(k).is("{") && (at(pclose + 1).is("{") || at(pclose + 1).is("throws"))) {
                    ++pos_;
                    try {
                        for (auto& p : parse_parameters()) ctx.locals[p.name] = p.type;
                    } catch (const SyntaxError&) {
                    }
                    parse_block_at(k, ctx);
                    continue;
                }
            }
            if (tok().is("=")) {  // field initializer
                const auto end = find_semicolon(pos_ + 1, close);
                scan_expression(ctx, pos_ + 1, end);
                pos_ = end + 1;
                continue;
            }
            ++pos_;
        }
        pos_ = close + 1;
    }

    std::size_t argument_count(std::size_t open) const {
        const auto close = match_[open];
        if (close == open + 1) return 0;
        std::size_t count = 1;
        for (std::size_t i = open + 1; i < close;) {
            const auto& t = at(i);
            if (t.is("(") || t.is("[") || t.is("{")) {
                i = match_[i] + 1;
                continue;
            }
            if (t.is("<")) {
                // Generic type arguments in `new Map<K, V>()` would add commas.
                std::size_t j = i + 1;
                int depth = 1;
                bool generic = true;
                while (j < close && depth > 0) {
                    const auto& u = at(j);
                    if (u.is("<")) ++depth;
                    else if (u.is(">")) --depth;
                    else if (!(u.is_ident() || u.is(",") || u.is(".") || u.is("?") ||
                               u.is("extends") || u.is("super") || u.is("[") || u.is("]") ||
                               is_primitive(u))) {
                        generic = false;
                        break;
                    }
                    ++j;
                }
                if (generic && depth == 0 && i > open + 1 && at(i - 1).is_ident() &&
                    (at(j).is("(") || at(j).is("[") || at(j).is("{"))) {
                    i = j;
                    continue;
                }
            }
            if (t.is(",")) ++count;
            ++i;
        }
        return count;
    }

    std::optional<std::string> lookup(const BodyContext& ctx, const std::string& name) const {
        if (auto it = ctx.locals.find(name); it != ctx.locals.end()) return it->second;
        if (auto it = ctx.fields->find(name); it != ctx.fields->end()) return it->second;
        return std::nullopt;
    }

    void record_call(BodyContext& ctx, std::size_t i) {
        CallSite site;
        site.callee_name = at(i).text;
        site.argument_count = argument_count(i + 1);
        site.line = at(i).line;

        if (i == 0 || !at(i - 1).is(".")) {
            site.receiver = ReceiverKind::ImplicitThis;
            ctx.method->call_sites.push_back(std::move(site));
            return;
        }
        // Collect the dotted receiver chain to the left: a.b.c.name(
        std::vector<std::string> chain;
        std::size_t k = i - 1;  // at '.'
        bool clean = true;
        while (true) {
            if (k == 0) {
                clean = false;
                break;
            }
            const auto& seg = at(k - 1);
            if (!(seg.is_ident() || seg.is("this") || seg.is("super"))) {
                clean = false;
                break;
            }
            chain.insert(chain.begin(), seg.text);
            if (k - 1 > 0 && at(k - 2).is(".")) {
                k -= 2;
                continue;
            }
            break;
        }
        site.receiver = ReceiverKind::Unknown;
        if (clean && !chain.empty()) {
            site.receiver_name.clear();
            for (std::size_t s = 0; s < chain.size(); ++s) {
                if (s) site.receiver_name += ".";
                site.receiver_name += chain[s];
            }
            resolve_receiver(ctx, chain, site);
        }
        ctx.method->call_sites.push_back(std::move(site));
    }

    void resolve_receiver(const BodyContext& ctx, const std::vector<std::string>& chain,
                          CallSite& site) const {
        if (chain.size() == 1) {
            const auto& name = chain[0];
            if (name == "this") {
                site.receiver = ReceiverKind::ImplicitThis;
            } else if (name == "super") {
                if (ctx.super_type) {
                    site.receiver = ReceiverKind::TypedVariable;
                    site.receiver_type = *ctx.super_type;
                }
            } else if (auto type = lookup(ctx, name)) {
                site.receiver = ReceiverKind::TypedVariable;
                site.receiver_type = *type;
            } else if (starts_upper(name)) {
                site.receiver = ReceiverKind::StaticType;
                site.receiver_type = name;
            }
            return;
        }
        if (chain.size() == 2 && chain[0] == "this") {
            if (auto it = ctx.fields->find(chain[1]); it != ctx.fields->end()) {
                site.receiver = ReceiverKind::TypedVariable;
                site.receiver_type = it->second;
            }
            return;
        }
        // Qualified static call: either Outer.Inner.m() or pkg.name.Type.m().
        if (lookup(ctx, chain[0]) || chain[0] == "this" || chain[0] == "super") return;
        const bool all_upper = std::all_of(chain.begin(), chain.end(), starts_upper);
        if (all_upper) {
            site.receiver = ReceiverKind::StaticType;
            site.receiver_type = site.receiver_name;
            return;
        }
        const bool package_then_type =
            starts_upper(chain.back()) &&
            std::all_of(chain.begin(), chain.end() - 1, [](const std::string& s) { return !starts_upper(s); });
        if (package_then_type) {
            site.receiver = ReceiverKind::StaticType;
            site.receiver_type = site.receiver_name;
        }
    }

    std::vector<Token> toks_;
    std::vector<std::size_t> match_;
    std::size_t pos_ = 0;
    std::vector<ClassModel> classes_;
};

}  // namespace

std::vector<ClassModel> parse_source(std::string_view content) {
    return Parser(tokenize_java(content)).run();
}

namespace {

void parse_into(const SourceFile& file, ParsedFile& parsed, std::optional<Diagnostic>& diag) {
    parsed.file = file.key();
    try {
        parsed.classes = parse_source(file.content);
    } catch (const SyntaxError& e) {
        diag = Diagnostic{file.key(), e.what()};
    }
}

CodeModel assemble(std::vector<ParsedFile>& parsed, std::vector<std::optional<Diagnostic>>& diags) {
    CodeModel model;
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        if (diags[i]) {
            model.diagnostics.push_back(std::move(*diags[i]));
        } else {
            model.files.push_back(std::move(parsed[i]));
        }
    }
    return model;
}

}  // namespace

CodeModel parse_corpus(const CorpusManifest& manifest) {
    const auto n = static_cast<std::ptrdiff_t>(manifest.files.size());
    std::vector<ParsedFile> parsed(manifest.files.size());
    std::vector<std::optional<Diagnostic>> diags(manifest.files.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        parse_into(manifest.files[static_cast<std::size_t>(i)], parsed[static_cast<std::size_t>(i)],
                   diags[static_cast<std::size_t>(i)]);
    }
    return assemble(parsed, diags);
}

CodeModel parse_corpus_serial(const CorpusManifest& manifest) {
    std::vector<ParsedFile> parsed(manifest.files.size());
    std::vector<std::optional<Diagnostic>> diags(manifest.files.size());
    for (std::size_t i = 0; i < manifest.files.size(); ++i) parse_into(manifest.files[i], parsed[i], diags[i]);
    return assemble(parsed, diags);
}

}  // namespace patmine
