#include "patmine/features.hpp"

#include <cmath>

namespace patmine {

ClassFeatureRecord extract_class_features(const ClassModel& c) {
    ClassFeatureRecord r;
    r.class_name = c.name;
    r.class_modifiers = c.modifiers;
    r.class_implements = c.implements_names.empty() ? 0 : 1;
    r.class_extends = c.extends_name ? 1 : 0;
    return r;
}

MethodFeatureRecord extract_method_features(const MethodModel& m, const ClassModel& owner,
                                            const CallGraph& g) {
    const MethodId id = method_id(owner, m);
    MethodFeatureRecord r;
    r.class_name = owner.name;
    r.method_name = m.name;
    r.method_params = m.parameters;
    r.return_type = m.return_type;
    for (const auto& s : m.statements) ++r.body_line_types[static_cast<std::size_t>(s.kind)];
    r.num_variables = m.local_variable_count;
    r.num_method_calls = m.call_sites.size();
    r.num_lines = m.line_count;

    for (const auto& callee : g.callees(id, /*external_only=*/true)) {
        r.incoming_names.push_back(callee.method_name);
    }
    r.incoming_method_count = r.incoming_names.size();
    for (const auto& caller : g.callers(id)) r.outgoing_names.push_back(caller.method_name);
    r.outgoing_method_count = r.outgoing_names.size();
    return r;
}

std::vector<ClassFeatures> extract_file_features(const ParsedFile& file, const CallGraph& g) {
    std::vector<ClassFeatures> out;
    out.reserve(file.classes.size());
    for (const auto& cls : file.classes) {
        ClassFeatures cf;
        cf.record = extract_class_features(cls);
        for (const auto& m : cls.methods) cf.methods.push_back(extract_method_features(m, cls, g));
        out.push_back(std::move(cf));
    }
    return out;
}

std::array<double, kNumericFeatureCount> numeric_features(const ClassFeatures& cls) {
    std::array<double, kNumericFeatureCount> out{};
    out[0] = cls.record.class_implements;
    out[1] = cls.record.class_extends;
    if (cls.methods.empty()) return out;
    double vars = 0, calls = 0, lines = 0, incoming = 0, outgoing = 0;
    for (const auto& m : cls.methods) {
        vars += static_cast<double>(m.num_variables);
        calls += static_cast<double>(m.num_method_calls);
        lines += static_cast<double>(m.num_lines);
        incoming += static_cast<double>(m.incoming_method_count);
        outgoing += static_cast<double>(m.outgoing_method_count);
    }
    const double n = static_cast<double>(cls.methods.size());
    out[2] = std::log1p(vars / n);
    out[3] = std::log1p(calls / n);
    out[4] = std::log1p(lines / n);
    out[5] = std::log1p(incoming / n);
    out[6] = std::log1p(outgoing / n);
    return out;
}

namespace {

template <class Range>
std::string join(const Range& items, char sep) {
    std::string out;
    bool first = true;
    for (const auto& s : items) {
        if (!first) out += sep;
        out += s;
        first = false;
    }
    return out;
}

}  // namespace

std::string class_features_csv(const std::vector<ClassFeatures>& classes) {
    std::string out = "class_name,class_modifiers,class_implements,class_extends\n";
    for (const auto& c : classes) {
        const auto& r = c.record;
        out += r.class_name + "," + join(r.class_modifiers.names(), ' ') + "," +
               std::to_string(r.class_implements) + "," + std::to_string(r.class_extends) + "\n";
    }
    return out;
}

std::string method_features_csv(const std::vector<ClassFeatures>& classes) {
    std::string out =
        "class_name,method_name,method_params,return_type,body_line_types,num_variables,"
        "num_method_calls,num_lines,incoming_method_count,incoming_names,outgoing_method_count,"
        "outgoing_names\n";
    for (const auto& c : classes) {
        for (const auto& m : c.methods) {
            std::vector<std::string> params;
            for (const auto& p : m.method_params) params.push_back(p.type + ":" + p.name);
            std::vector<std::string> kinds;
            for (std::size_t k = 0; k < kStatementKindCount; ++k) {
                if (m.body_line_types[k]) {
                    kinds.push_back(std::string(to_string(static_cast<StatementKind>(k))) + "=" +
                                    std::to_string(m.body_line_types[k]));
                }
            }
            out += m.class_name + "," + m.method_name + "," + join(params, ' ') + "," + m.return_type +
                   "," + join(kinds, ' ') + "," + std::to_string(m.num_variables) + "," +
                   std::to_string(m.num_method_calls) + "," + std::to_string(m.num_lines) + "," +
                   std::to_string(m.incoming_method_count) + "," + join(m.incoming_names, ' ') + "," +
                   std::to_string(m.outgoing_method_count) + "," + join(m.outgoing_names, ' ') + "\n";
        }
    }
    return out;
}

}  // namespace patmine
