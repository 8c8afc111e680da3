#include "patmine/labels.hpp"

#include "patmine/errors.hpp"

namespace patmine {

namespace {

constexpr std::array<std::string_view, kPatternLabelCount> kNames = {
    "Adapter", "Builder",   "Decorator", "Facade",    "Factory", "Memento", "Observer",
    "Prototype", "Proxy", "Singleton", "Visitor", "Wrapper", "None",
};

}  // namespace

std::string_view to_string(PatternLabel label) noexcept {
    return kNames[static_cast<std::size_t>(label)];
}

std::optional<PatternLabel> parse_label(std::string_view token) noexcept {
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (kNames[i] == token) return kAllPatternLabels[i];
    }
    return std::nullopt;
}

PatternLabel label_from_string(std::string_view token) {
    if (auto label = parse_label(token)) return *label;
    throw UnknownLabelError("unknown pattern label '" + std::string(token) + "'");
}

}  // namespace patmine
