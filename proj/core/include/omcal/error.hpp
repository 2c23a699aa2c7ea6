#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace omcal {

enum class ErrorKind {
    InvalidParameter,
    MalformedConfig,
    MissingFile,
    ShapeMismatch,
    NonFiniteValue,
    MalformedMeta,
    IoError,
    LengthMismatch,
    AllZeroGraph,
    NumericalBreakdown,
};

std::string_view to_string(ErrorKind kind);

/// Exception carrying a machine-readable kind next to a located message,
/// e.g. `ShapeMismatch: views/b.csv: expected 4 rows, found 5`.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }
    /// Message without the kind prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

/// Non-fatal conditions (degenerate views, rank-deficient Procrustes input,
/// unconverged QP) are collected here instead of being thrown. Repeated
/// messages are stored once with a count.
class Diagnostics {
public:
    struct Entry {
        std::string message;
        int count = 1;
    };

    void warn(std::string message);
    const std::vector<Entry>& warnings() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }
    void merge(const Diagnostics& other);

private:
    std::vector<Entry> entries_;
};

inline void warn(Diagnostics* diag, std::string message) {
    if (diag != nullptr) diag->warn(std::move(message));
}

} // namespace omcal
