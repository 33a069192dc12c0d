#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mvhinge {

enum class ErrorCode {
    // mhd_io
    MissingKey,
    BadValue,
    UnsupportedDims,
    UnsupportedElementType,
    UnsupportedCompression,
    UnsafeDataPath,
    LengthMismatch,
    UnknownLabel,
    Io,
    // labelmap
    ShapeMismatch,
    // hinge
    NoContact,
    // stats
    EmptySamples,
    TooFewSamples,
    TooManySamples,
    ZeroVariance,
    SpacingMismatch,
    MissingCell,
    // phantom
    SpecOutOfBounds,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above; the
/// message holds the human-readable detail (key name, lengths, cell, ...).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::BadValue: return "BadValue";
    case ErrorCode::UnsupportedDims: return "UnsupportedDims";
    case ErrorCode::UnsupportedElementType: return "UnsupportedElementType";
    case ErrorCode::UnsupportedCompression: return "UnsupportedCompression";
    case ErrorCode::UnsafeDataPath: return "UnsafeDataPath";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::Io: return "Io";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NoContact: return "NoContact";
    case ErrorCode::EmptySamples: return "EmptySamples";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::TooManySamples: return "TooManySamples";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::SpacingMismatch: return "SpacingMismatch";
    case ErrorCode::MissingCell: return "MissingCell";
    case ErrorCode::SpecOutOfBounds: return "SpecOutOfBounds";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

} // namespace mvhinge
