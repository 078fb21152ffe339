#pragma once

#include <stdexcept>
#include <string>

namespace prewet {

// Every library failure derives from Error so callers (the CLI in
// particular) can map them onto exit codes in one place.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

    // Validation errors are caused by bad user input; everything else is a
    // runtime failure.
    virtual bool is_validation() const noexcept { return false; }

private:
    std::string code_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what, std::string code = "validation")
        : Error(std::move(code), what) {}
    bool is_validation() const noexcept override { return true; }
};

#define PREWET_DEFINE_ERROR(Name, Base, tag)                                  \
    class Name : public Base {                                                \
    public:                                                                   \
        explicit Name(const std::string& what) : Base(what, tag) {}           \
    };

class RuntimeFailure : public Error {
public:
    RuntimeFailure(const std::string& what, std::string code = "runtime")
        : Error(std::move(code), what) {}
};

PREWET_DEFINE_ERROR(DomainError, ValidationError, "domain")
PREWET_DEFINE_ERROR(StructuralError, RuntimeFailure, "structural")
PREWET_DEFINE_ERROR(NoConePoints, RuntimeFailure, "no_cone_points")
PREWET_DEFINE_ERROR(InsufficientData, RuntimeFailure, "insufficient_data")
PREWET_DEFINE_ERROR(NegativeHeight, ValidationError, "negative_height")
PREWET_DEFINE_ERROR(CapTooSmall, RuntimeFailure, "cap_too_small")
PREWET_DEFINE_ERROR(ZeroBridgeWeight, RuntimeFailure, "zero_bridge_weight")
PREWET_DEFINE_ERROR(AccuracyRange, ValidationError, "accuracy_range")
PREWET_DEFINE_ERROR(ModesInsufficient, RuntimeFailure, "modes_insufficient")
PREWET_DEFINE_ERROR(StepTooCoarse, RuntimeFailure, "step_too_coarse")
PREWET_DEFINE_ERROR(GridTooCoarse, ValidationError, "grid_too_coarse")
PREWET_DEFINE_ERROR(SchemaMismatch, ValidationError, "schema_mismatch")
PREWET_DEFINE_ERROR(DigestMismatch, ValidationError, "digest_mismatch")

#undef PREWET_DEFINE_ERROR

}  // namespace prewet
