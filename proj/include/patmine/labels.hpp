#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace patmine {

/// The closed label set. `Factory` covers both Abstract Factory and
/// Factory Method; `None` marks files implementing no pattern.
enum class PatternLabel : int {
    Adapter,
    Builder,
    Decorator,
    Facade,
    Factory,
    Memento,
    Observer,
    Prototype,
    Proxy,
    Singleton,
    Visitor,
    Wrapper,
    None,
};

inline constexpr std::size_t kPatternLabelCount = 13;

inline constexpr std::array<PatternLabel, kPatternLabelCount> kAllPatternLabels = {
    PatternLabel::Adapter,   PatternLabel::Builder,  PatternLabel::Decorator,
    PatternLabel::Facade,    PatternLabel::Factory,  PatternLabel::Memento,
    PatternLabel::Observer,  PatternLabel::Prototype, PatternLabel::Proxy,
    PatternLabel::Singleton, PatternLabel::Visitor,  PatternLabel::Wrapper,
    PatternLabel::None,
};

std::string_view to_string(PatternLabel label) noexcept;

/// Case-sensitive lookup of the exact enum name.
std::optional<PatternLabel> parse_label(std::string_view token) noexcept;

/// Parses or throws UnknownLabelError.
PatternLabel label_from_string(std::string_view token);

inline int label_index(PatternLabel label) noexcept { return static_cast<int>(label); }

}  // namespace patmine
