#pragma once

#include <optional>
#include <span>
#include <string_view>

// Data files (prompt templates, tagger lexicons) compiled into the library so
// the tools run without a data directory. Names are paths relative to data/.
namespace tvf::embedded {

struct EmbeddedFile {
    std::string_view name;
    std::string_view content;
};

[[nodiscard]] std::span<const EmbeddedFile> files() noexcept;

[[nodiscard]] inline std::optional<std::string_view> find(std::string_view name) noexcept {
    for (const auto& f : files()) {
        if (f.name == name) return f.content;
    }
    return std::nullopt;
}

} // namespace tvf::embedded
