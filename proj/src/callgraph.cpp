#include "patmine/callgraph.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "patmine/errors.hpp"

namespace patmine {

std::string MethodId::str() const {
    return class_name + "." + method_name + "/" + std::to_string(arity);
}

MethodId method_id(const ClassModel& owner, const MethodModel& method) {
    return {owner.name, method.name, method.parameters.size()};
}

std::vector<MethodId> CallGraph::callees(const MethodId& m, bool external_only) const {
    if (!contains(m)) throw UnknownMethodError("method not in call graph: " + m.str());
    std::vector<MethodId> out;
    if (auto it = out_.find(m); it != out_.end()) {
        for (const auto& callee : it->second) {
            if (!external_only || callee.class_name != m.class_name) out.push_back(callee);
        }
    }
    return out;
}

std::vector<MethodId> CallGraph::callers(const MethodId& m) const {
    if (!contains(m)) throw UnknownMethodError("method not in call graph: " + m.str());
    if (auto it = in_.find(m); it != in_.end()) return {it->second.begin(), it->second.end()};
    return {};
}

std::string CallGraph::to_dot() const {
    auto quote = [](const MethodId& m) { return "\"" + m.str() + "\""; };
    std::string out = "digraph callgraph {\n";
    for (const auto& n : nodes_) out += "  " + quote(n) + ";\n";
    for (const auto& e : edges_) {
        out += "  " + quote(e.caller) + " -> " + quote(e.callee);
        if (e.status == EdgeStatus::External) out += " [style=dashed]";
        out += ";\n";
    }
    return out + "}\n";
}

namespace {

std::string strip_generics_and_arrays(const std::string& type, bool& is_array) {
    is_array = type.find('[') != std::string::npos;
    return is_array ? type.substr(0, type.find('[')) : type;
}

std::string last_segment(const std::string& qualified) {
    const auto dot = qualified.rfind('.');
    return dot == std::string::npos ? qualified : qualified.substr(dot + 1);
}

class Resolver {
public:
    explicit Resolver(const CodeModel& model) {
        for (const auto& file : model.files) {
            for (const auto& cls : file.classes) {
                if (classes_.emplace(cls.name, &cls).second) {
                    by_simple_[last_segment(cls.name)].push_back(cls.name);
                }
                for (const auto& m : cls.methods) {
                    declared_.insert(method_id(cls, m));
                    const auto key = m.name + "/" + std::to_string(m.parameters.size());
                    owners_by_signature_[key].insert(cls.name);
                }
            }
        }
    }

    /// Corpus class for a type spelling, by exact or unique simple name.
    const ClassModel* find_class(const std::string& type) const {
        bool is_array = false;
        const auto base = strip_generics_and_arrays(type, is_array);
        if (is_array) return nullptr;
        if (auto it = classes_.find(base); it != classes_.end()) return it->second;
        if (auto it = by_simple_.find(last_segment(base)); it != by_simple_.end() && it->second.size() == 1) {
            return classes_.at(it->second.front());
        }
        return nullptr;
    }

    /// Searches `start` then its ancestors (superclass chain before
    /// interfaces, breadth first) for a declared (name, arity).
    std::optional<MethodId> lookup(const ClassModel& start, const std::string& name,
                                   std::size_t arity) const {
        std::deque<const ClassModel*> queue{&start};
        std::unordered_set<const ClassModel*> seen{&start};
        while (!queue.empty()) {
            const ClassModel* cls = queue.front();
            queue.pop_front();
            MethodId id{cls->name, name, arity};
            if (declared_.count(id)) return id;
            auto enqueue = [&](const std::string& type) {
                if (const ClassModel* parent = find_class(type); parent && seen.insert(parent).second) {
                    queue.push_back(parent);
                }
            };
            if (cls->extends_name) enqueue(*cls->extends_name);
            for (const auto& iface : cls->implements_names) enqueue(iface);
        }
        return std::nullopt;
    }

    /// The first superclass outside the corpus, if the chain leaves it.
    std::optional<std::string> external_ancestor(const ClassModel& start) const {
        const ClassModel* cls = &start;
        std::unordered_set<const ClassModel*> seen{cls};
        while (cls->extends_name) {
            const ClassModel* parent = find_class(*cls->extends_name);
            if (!parent) return *cls->extends_name;
            if (!seen.insert(parent).second) break;
            cls = parent;
        }
        return std::nullopt;
    }

    /// The unique corpus class declaring (name, arity), if exactly one does.
    std::optional<MethodId> unique_owner(const std::string& name, std::size_t arity) const {
        auto it = owners_by_signature_.find(name + "/" + std::to_string(arity));
        if (it == owners_by_signature_.end() || it->second.size() != 1) return std::nullopt;
        return MethodId{*it->second.begin(), name, arity};
    }

private:
    std::unordered_map<std::string, const ClassModel*> classes_;
    std::unordered_map<std::string, std::vector<std::string>> by_simple_;
    std::set<MethodId> declared_;
    std::unordered_map<std::string, std::set<std::string>> owners_by_signature_;
};

CallEdge resolve_call(const Resolver& resolver, const ClassModel& owner, const MethodId& caller,
                      const CallSite& site) {
    const auto& name = site.callee_name;
    const auto arity = site.argument_count;
    switch (site.receiver) {
        case ReceiverKind::ImplicitThis: {
            if (auto id = resolver.lookup(owner, name, arity)) return {caller, *id, EdgeStatus::Resolved};
            const auto cls = resolver.external_ancestor(owner).value_or(owner.name);
            return {caller, {cls, name, arity}, EdgeStatus::External};
        }
        case ReceiverKind::TypedVariable:
        case ReceiverKind::StaticType: {
            if (const ClassModel* target = resolver.find_class(site.receiver_type)) {
                if (auto id = resolver.lookup(*target, name, arity)) {
                    return {caller, *id, EdgeStatus::Resolved};
                }
                const auto cls = resolver.external_ancestor(*target).value_or(target->name);
                return {caller, {cls, name, arity}, EdgeStatus::External};
            }
            return {caller, {site.receiver_type, name, arity}, EdgeStatus::External};
        }
        case ReceiverKind::Unknown:
            break;
    }
    if (auto id = resolver.unique_owner(name, arity)) return {caller, *id, EdgeStatus::Resolved};
    return {caller, {std::string(kUnknownClass), name, arity}, EdgeStatus::External};
}

}  // namespace

CallGraph build_call_graph(const CodeModel& model) {
    const Resolver resolver(model);
    CallGraph graph;
    for (const auto& file : model.files) {
        for (const auto& cls : file.classes) {
            for (const auto& m : cls.methods) graph.nodes_.insert(method_id(cls, m));
        }
    }
    std::set<CallEdge> edges;
    for (const auto& file : model.files) {
        for (const auto& cls : file.classes) {
            for (const auto& m : cls.methods) {
                const auto caller = method_id(cls, m);
                for (const auto& site : m.call_sites) edges.insert(resolve_call(resolver, cls, caller, site));
            }
        }
    }
    graph.edges_.assign(edges.begin(), edges.end());
    for (const auto& e : graph.edges_) {
        graph.out_[e.caller].insert(e.callee);
        if (e.status == EdgeStatus::Resolved) graph.in_[e.callee].insert(e.caller);
    }
    return graph;
}

}  // namespace patmine
