#pragma once

#include <stdexcept>
#include <string>

namespace ctoed {

/// Broad failure categories; the CLI maps them onto distinct exit codes
/// (config errors = 2, data errors = 3, runtime errors = 4).
enum class ErrorCategory { Config, Data, Runtime };

class Error : public std::runtime_error {
  public:
    Error(ErrorCategory cat, const std::string& msg)
        : std::runtime_error(msg), category_(cat) {}
    ErrorCategory category() const noexcept { return category_; }

  private:
    ErrorCategory category_;
};

#define CTOED_ERROR(NAME, CATEGORY)                           \
    class NAME : public Error {                               \
      public:                                                 \
        explicit NAME(const std::string& msg)                 \
            : Error(ErrorCategory::CATEGORY, msg) {}          \
    }

// phantom_gen
CTOED_ERROR(SpecOutOfRange, Data);
CTOED_ERROR(ShapeClipped, Data);

// ct_core
CTOED_ERROR(DuplicateAngle, Runtime);
CTOED_ERROR(EmptyAngleSet, Runtime);
CTOED_ERROR(ShapeMismatch, Runtime);
CTOED_ERROR(EmptySinogram, Runtime);

// metrics
CTOED_ERROR(ZeroReference, Runtime);

// scan_env
CTOED_ERROR(AngleRepeated, Runtime);
CTOED_ERROR(EpisodeExhausted, Runtime);

// policy_net
CTOED_ERROR(MissingTarget, Runtime);
CTOED_ERROR(ArchitectureMismatch, Runtime);

// data_ingest
CTOED_ERROR(NetworkError, Data);
CTOED_ERROR(ChecksumMismatch, Data);
CTOED_ERROR(GeometryMissing, Data);

// eval_harness
CTOED_ERROR(EmptyRunSet, Runtime);

// cli / config
CTOED_ERROR(UnknownKey, Config);
CTOED_ERROR(ConfigTypeError, Config);
CTOED_ERROR(MissingRequired, Config);

#undef CTOED_ERROR

}  // namespace ctoed
