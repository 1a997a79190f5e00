#include "pavsim/error.hpp"

namespace pavsim {

ParseError ParseError::located(std::size_t line, std::optional<std::size_t> cell) const {
    std::string where = "line " + std::to_string(line);
    if (cell) {
        where += ", cell " + std::to_string(*cell);
    }
    ParseError copy(offset_, where + ": " + detail_ + " (offset " + std::to_string(offset_) + ")");
    copy.detail_ = detail_;
    copy.line_ = line;
    copy.cell_ = cell;
    return copy;
}

namespace {
std::string summarize(const std::vector<FieldIssue>& issues) {
    std::string out = "invalid parameters:";
    for (const auto& issue : issues) {
        out += " " + issue.field + " (" + issue.message + ");";
    }
    return out;
}
}  // namespace

ValidationError::ValidationError(std::vector<FieldIssue> issues)
    : std::runtime_error(summarize(issues)), issues_(std::move(issues)) {}

ValidationError::ValidationError(std::string field, std::string message)
    : ValidationError(std::vector<FieldIssue>{{std::move(field), std::move(message)}}) {}

}  // namespace pavsim
