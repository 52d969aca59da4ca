#pragma once

#include <stdexcept>
#include <string>

namespace pickmix {

// Base of every error the engine raises. `kind()` is the stable name used in
// JSON error bodies and CLI diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define PICKMIX_DEFINE_ERROR(Name)                                        \
    class Name : public Error {                                           \
    public:                                                               \
        explicit Name(const std::string& message) : Error(#Name, message) {} \
    }

// geometry
PICKMIX_DEFINE_ERROR(ParseError);
PICKMIX_DEFINE_ERROR(LabelError);
PICKMIX_DEFINE_ERROR(EmptyMeshError);
PICKMIX_DEFINE_ERROR(DegenerateError);
// rasterizer / descriptor
PICKMIX_DEFINE_ERROR(ResolutionError);
PICKMIX_DEFINE_ERROR(GridError);
PICKMIX_DEFINE_ERROR(ArityError);
PICKMIX_DEFINE_ERROR(DimensionError);
// manifold
PICKMIX_DEFINE_ERROR(SizeError);
PICKMIX_DEFINE_ERROR(SingularError);
PICKMIX_DEFINE_ERROR(EmptyManifoldError);
// retrieval
PICKMIX_DEFINE_ERROR(UnknownPartError);
PICKMIX_DEFINE_ERROR(UnknownSourceError);
PICKMIX_DEFINE_ERROR(EmptyIndexError);
PICKMIX_DEFINE_ERROR(QueryError);
// dataset
PICKMIX_DEFINE_ERROR(ParamError);
PICKMIX_DEFINE_ERROR(MissingGroundTruthError);
// index_store
PICKMIX_DEFINE_ERROR(IOError);
PICKMIX_DEFINE_ERROR(VersionError);
PICKMIX_DEFINE_ERROR(CorruptionError);
PICKMIX_DEFINE_ERROR(ConfigError);
PICKMIX_DEFINE_ERROR(DuplicateIdError);

#undef PICKMIX_DEFINE_ERROR

}  // namespace pickmix
