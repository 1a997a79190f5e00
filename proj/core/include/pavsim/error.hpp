#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pavsim {

/// A non-fatal note produced while parsing (e.g. a collapsed duplicate CS).
struct Diagnostic {
    std::size_t offset = 0;
    std::string message;
};

/// Malformed design text. `offset` is a byte offset into the text that was
/// handed to the parser; `line`/`cell` are filled in by the `.rw` reader.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset, const std::string& message)
        : std::runtime_error(message), offset_(offset), detail_(message) {}

    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }
    [[nodiscard]] std::optional<std::size_t> line() const noexcept { return line_; }
    [[nodiscard]] std::optional<std::size_t> cell() const noexcept { return cell_; }

    [[nodiscard]] ParseError located(std::size_t line, std::optional<std::size_t> cell) const;

private:
    std::size_t offset_;
    std::string detail_;
    std::optional<std::size_t> line_;
    std::optional<std::size_t> cell_;
};

struct FieldIssue {
    std::string field;
    std::string message;
};

/// Parameter or request validation failure; lists every offending field.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<FieldIssue> issues);
    ValidationError(std::string field, std::string message);

    [[nodiscard]] const std::vector<FieldIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<FieldIssue> issues_;
};

class Cancelled : public std::runtime_error {
public:
    Cancelled() : std::runtime_error("simulation cancelled") {}
};

}  // namespace pavsim
