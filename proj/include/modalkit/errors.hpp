#pragma once

#include <stdexcept>
#include <string>

namespace modalkit {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    Error(const std::string& module, const std::string& what_arg)
        : std::runtime_error("[" + module + "] " + what_arg), module_(module) {}

    const std::string& module() const { return module_; }

private:
    std::string module_;
};

#define MODALKIT_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                       \
    public:                                                           \
        Name(const std::string& module, const std::string& what_arg)  \
            : Error(module, std::string(#Name) + ": " + what_arg) {}  \
    }

MODALKIT_DEFINE_ERROR(IrregularSampling);
MODALKIT_DEFINE_ERROR(MalformedData);
MODALKIT_DEFINE_ERROR(SchemaMismatch);
MODALKIT_DEFINE_ERROR(InvalidStacking);
MODALKIT_DEFINE_ERROR(EmptyRole);
MODALKIT_DEFINE_ERROR(TooFewSnapshots);
MODALKIT_DEFINE_ERROR(DegenerateMatrix);
MODALKIT_DEFINE_ERROR(RankTooLarge);
MODALKIT_DEFINE_ERROR(NumericalFailure);
MODALKIT_DEFINE_ERROR(ShapeError);
MODALKIT_DEFINE_ERROR(MissingInputs);
MODALKIT_DEFINE_ERROR(RankOrderViolation);
MODALKIT_DEFINE_ERROR(DegenerateEigenvalue);
MODALKIT_DEFINE_ERROR(SimulationDiverged);
MODALKIT_DEFINE_ERROR(AliasedMode);
MODALKIT_DEFINE_ERROR(DegenerateData);
MODALKIT_DEFINE_ERROR(ConfigError);
MODALKIT_DEFINE_ERROR(IoError);

#undef MODALKIT_DEFINE_ERROR

}  // namespace modalkit
