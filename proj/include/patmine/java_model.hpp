#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "patmine/corpus.hpp"

namespace patmine {

enum class Modifier : std::uint16_t {
    Public = 1u << 0,
    Protected = 1u << 1,
    Private = 1u << 2,
    Default = 1u << 3,  // no access keyword
    Abstract = 1u << 4,
    Static = 1u << 5,
    Final = 1u << 6,
    Synchronized = 1u << 7,
    Native = 1u << 8,
    Transient = 1u << 9,
    Volatile = 1u << 10,
    Strictfp = 1u << 11,
};

class Modifiers {
public:
    Modifiers() = default;

    void add(Modifier m) noexcept { bits_ |= static_cast<std::uint16_t>(m); }
    bool has(Modifier m) const noexcept { return (bits_ & static_cast<std::uint16_t>(m)) != 0; }
    bool empty() const noexcept { return bits_ == 0; }
    std::uint16_t bits() const noexcept { return bits_; }

    /// Adds Default when no access keyword is present.
    void close_access() noexcept {
        if (!has(Modifier::Public) && !has(Modifier::Protected) && !has(Modifier::Private)) {
            add(Modifier::Default);
        }
    }

    /// Keyword spellings in canonical (declaration) order.
    std::vector<std::string_view> names() const;

    bool operator==(const Modifiers&) const = default;

private:
    std::uint16_t bits_ = 0;
};

std::optional<Modifier> modifier_from_keyword(std::string_view word) noexcept;

enum class TypeKind { Class, Interface, Enum };

std::string_view to_string(TypeKind kind) noexcept;

enum class StatementKind : int {
    Assignment,
    LocalDeclaration,
    Conditional,
    Loop,
    Return,
    Invocation,
    Other,
};

inline constexpr std::size_t kStatementKindCount = 7;

std::string_view to_string(StatementKind kind) noexcept;

struct StatementInfo {
    StatementKind kind = StatementKind::Other;
    std::size_t line = 0;

    bool operator==(const StatementInfo&) const = default;
};

enum class ReceiverKind {
    ImplicitThis,   // `foo()` or `this.foo()`
    TypedVariable,  // local, parameter or field with a declared type
    StaticType,     // `Type.foo()`
    Unknown,
};

struct CallSite {
    ReceiverKind receiver = ReceiverKind::Unknown;
    std::string receiver_name;  // variable or type name as written
    std::string receiver_type;  // erased declared type, TypedVariable/StaticType only
    std::string callee_name;
    std::size_t argument_count = 0;
    std::size_t line = 0;

    bool operator==(const CallSite&) const = default;
};

struct NameAndType {
    std::string name;
    std::string type;

    bool operator==(const NameAndType&) const = default;
};

inline constexpr std::string_view kConstructorReturn = "constructor";

struct MethodModel {
    std::string name;
    Modifiers modifiers;
    std::vector<NameAndType> parameters;
    std::string return_type;  // type, "void" or "constructor"
    std::vector<StatementInfo> statements;
    std::size_t local_variable_count = 0;
    std::vector<CallSite> call_sites;
    std::size_t line_count = 0;
    std::size_t line = 0;
    bool has_body = false;

    bool is_constructor() const { return return_type == kConstructorReturn; }

    bool operator==(const MethodModel&) const = default;
};

struct ClassModel {
    std::string name;  // nested types are "Outer.Inner"
    TypeKind kind = TypeKind::Class;
    Modifiers modifiers;
    std::optional<std::string> extends_name;
    std::vector<std::string> implements_names;
    std::vector<MethodModel> methods;
    std::vector<NameAndType> fields;
    std::size_t line = 0;

    bool operator==(const ClassModel&) const = default;
};

struct ParsedFile {
    FileKey file;
    std::vector<ClassModel> classes;
};

struct Diagnostic {
    FileKey file;
    std::string message;
};

/// Parsed corpus; `files` follows manifest order.
struct CodeModel {
    std::vector<ParsedFile> files;
    std::vector<Diagnostic> diagnostics;

    const ParsedFile* find(const FileKey& key) const;
};

}  // namespace patmine
