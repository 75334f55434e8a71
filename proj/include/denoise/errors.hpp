#pragma once

#include <stdexcept>
#include <string>

namespace denoise {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// signal-core
struct ConstantSignal : Error { using Error::Error; };
struct SignalTooShort : Error { using Error::Error; };

// dataset
struct MalformedRow : Error {
    MalformedRow(const std::string& msg, std::size_t line_no)
        : Error(msg), line(line_no) {}
    std::size_t line;
};
struct EmptyFile : Error { using Error::Error; };
struct ColumnOutOfRange : Error { using Error::Error; };
struct EmptyCorpus : Error { using Error::Error; };
struct AliasedHarmonic : Error { using Error::Error; };

// fetch
struct NetworkFailure : Error { using Error::Error; };
struct ChecksumMismatch : Error { using Error::Error; };
struct ExtractionFailure : Error { using Error::Error; };

// noise
struct UnsupportedRate : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct RateMismatch : Error { using Error::Error; };

// nn / training
struct ChannelMismatch : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct LengthNotDivisible : Error { using Error::Error; };
struct StaleCache : Error { using Error::Error; };
struct EmptyTrainSet : Error { using Error::Error; };
struct EmptyTestSet : Error { using Error::Error; };
struct NonFiniteLoss : Error { using Error::Error; };

// io
struct IoFailure : Error { using Error::Error; };

}  // namespace denoise
