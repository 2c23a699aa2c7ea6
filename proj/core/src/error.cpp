#include "omcal/error.hpp"

#include <algorithm>

namespace omcal {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::MalformedConfig: return "MalformedConfig";
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::MalformedMeta: return "MalformedMeta";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::AllZeroGraph: return "AllZeroGraph";
    case ErrorKind::NumericalBreakdown: return "NumericalBreakdown";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind), detail_(message) {}

void Diagnostics::warn(std::string message) {
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&](const Entry& e) { return e.message == message; });
    if (it != entries_.end()) {
        ++it->count;
        return;
    }
    entries_.push_back({std::move(message), 1});
}

void Diagnostics::merge(const Diagnostics& other) {
    for (const auto& e : other.entries_) {
        for (int i = 0; i < e.count; ++i) warn(e.message);
    }
}

} // namespace omcal
