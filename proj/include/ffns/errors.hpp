#pragma once

#include <stdexcept>
#include <string>

namespace ffns {

enum class ErrorCode {
    InsufficientHistory,
    SurfaceTouchesBottom,
    NoAdmissibleA,
    DiffeoViolated,
    ChartFolds,
    NotConverged,
    IndefiniteOperator,
    CflViolation,
    TaylorViolated,
    CompatibilityNotReached,
    DegenerateData,
    UnknownInequality,
    ConfigError,
    IoError,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::InsufficientHistory: return "InsufficientHistory";
        case ErrorCode::SurfaceTouchesBottom: return "SurfaceTouchesBottom";
        case ErrorCode::NoAdmissibleA: return "NoAdmissibleA";
        case ErrorCode::DiffeoViolated: return "DiffeoViolated";
        case ErrorCode::ChartFolds: return "ChartFolds";
        case ErrorCode::NotConverged: return "NotConverged";
        case ErrorCode::IndefiniteOperator: return "IndefiniteOperator";
        case ErrorCode::CflViolation: return "CflViolation";
        case ErrorCode::TaylorViolated: return "TaylorViolated";
        case ErrorCode::CompatibilityNotReached: return "CompatibilityNotReached";
        case ErrorCode::DegenerateData: return "DegenerateData";
        case ErrorCode::UnknownInequality: return "UnknownInequality";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace ffns
