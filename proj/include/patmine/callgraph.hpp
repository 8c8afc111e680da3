#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "patmine/java_model.hpp"

namespace patmine {

/// Overloads with equal arity share one identity.
struct MethodId {
    std::string class_name;
    std::string method_name;
    std::size_t arity = 0;

    std::string str() const;

    auto operator<=>(const MethodId&) const = default;
};

/// Class name used for callees whose receiver type could not be determined.
inline constexpr std::string_view kUnknownClass = "?";

enum class EdgeStatus { Resolved, External };

struct CallEdge {
    MethodId caller;
    MethodId callee;
    EdgeStatus status = EdgeStatus::Resolved;

    auto operator<=>(const CallEdge&) const = default;
};

/// Immutable once built; safe for concurrent queries.
class CallGraph {
public:
    const std::set<MethodId>& nodes() const noexcept { return nodes_; }
    /// Deduplicated, sorted.
    const std::vector<CallEdge>& edges() const noexcept { return edges_; }

    bool contains(const MethodId& m) const { return nodes_.count(m) != 0; }

    /// Distinct callees of `m` (resolved and external), ordered by
    /// (class, name, arity). With `external_only`, only callees whose class
    /// differs from m's class. Throws UnknownMethodError.
    std::vector<MethodId> callees(const MethodId& m, bool external_only = false) const;

    /// Distinct resolved callers of `m`. Throws UnknownMethodError.
    std::vector<MethodId> callers(const MethodId& m) const;

    std::string to_dot() const;

private:
    friend CallGraph build_call_graph(const CodeModel& model);

    std::set<MethodId> nodes_;
    std::vector<CallEdge> edges_;
    std::map<MethodId, std::set<MethodId>> out_;
    std::map<MethodId, std::set<MethodId>> in_;
};

MethodId method_id(const ClassModel& owner, const MethodModel& method);

/// One node per declared method; one edge per call site, resolved by
/// (receiver type or enclosing class, name, arity) with superclass-first
/// ancestor lookup inside the corpus.
CallGraph build_call_graph(const CodeModel& model);

}  // namespace patmine
