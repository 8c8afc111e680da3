#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "patmine/callgraph.hpp"
#include "patmine/java_model.hpp"

namespace patmine {

/// Class-level features F1-F4.
struct ClassFeatureRecord {
    std::string class_name;   // F1
    Modifiers class_modifiers;  // F2
    int class_implements = 0;   // F3, binary
    int class_extends = 0;      // F4, binary

    bool operator==(const ClassFeatureRecord&) const = default;
};

/// Multiset of statement kinds, indexed by StatementKind.
using StatementKindCounts = std::array<std::size_t, kStatementKindCount>;

/// Method-level features F5-F15. "Incoming" counts methods this method calls in other
/// classes; "outgoing" counts the methods that call it.
struct MethodFeatureRecord {
    std::string class_name;
    std::string method_name;               // F5
    std::vector<NameAndType> method_params;  // F6
    std::string return_type;               // F7
    StatementKindCounts body_line_types{};  // F8
    std::size_t num_variables = 0;          // F9
    std::size_t num_method_calls = 0;       // F10, call expressions
    std::size_t num_lines = 0;              // F11
    std::size_t incoming_method_count = 0;  // F12, distinct callees in other classes
    std::vector<std::string> incoming_names;  // F13
    std::size_t outgoing_method_count = 0;  // F14, distinct resolved callers
    std::vector<std::string> outgoing_names;  // F15

    bool operator==(const MethodFeatureRecord&) const = default;
};

ClassFeatureRecord extract_class_features(const ClassModel& c);

/// Throws UnknownMethodError when the method has no node in `g`.
MethodFeatureRecord extract_method_features(const MethodModel& m, const ClassModel& owner,
                                            const CallGraph& g);

struct ClassFeatures {
    ClassFeatureRecord record;
    std::vector<MethodFeatureRecord> methods;
};

/// Features for every class in a parsed file, in source order.
std::vector<ClassFeatures> extract_file_features(const ParsedFile& file, const CallGraph& g);

/// The numeric subset F3, F4, F9, F10, F11, F12, F14 for one class, with
/// method counts averaged over methods and log1p-scaled.
inline constexpr std::size_t kNumericFeatureCount = 7;
std::array<double, kNumericFeatureCount> numeric_features(const ClassFeatures& cls);

/// CSV dumps: one row per class / per method.
std::string class_features_csv(const std::vector<ClassFeatures>& classes);
std::string method_features_csv(const std::vector<ClassFeatures>& classes);

}  // namespace patmine
