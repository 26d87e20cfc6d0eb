#pragma once

#include <stdexcept>
#include <string>

namespace multifuse {

/// Base of every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define MULTIFUSE_DEFINE_ERROR(NAME)   \
    class NAME : public Error {        \
    public:                            \
        using Error::Error;            \
    }

// model
MULTIFUSE_DEFINE_ERROR(AsymmetryError);
MULTIFUSE_DEFINE_ERROR(NegativeEntryError);
MULTIFUSE_DEFINE_ERROR(NonFiniteError);
MULTIFUSE_DEFINE_ERROR(DuplicateIdError);
MULTIFUSE_DEFINE_ERROR(AlignmentError);
MULTIFUSE_DEFINE_ERROR(DimensionMismatchError);

// ingest
MULTIFUSE_DEFINE_ERROR(ParseError);
MULTIFUSE_DEFINE_ERROR(EmptyArticleError);
MULTIFUSE_DEFINE_ERROR(NegativeCountError);
MULTIFUSE_DEFINE_ERROR(AllTermsRemovedError);
MULTIFUSE_DEFINE_ERROR(ZeroRowError);

// topics
MULTIFUSE_DEFINE_ERROR(EmptyCorpusError);
MULTIFUSE_DEFINE_ERROR(ConfigError);

// fusion
MULTIFUSE_DEFINE_ERROR(DegenerateNeighborhoodError);
MULTIFUSE_DEFINE_ERROR(ZeroMassError);
MULTIFUSE_DEFINE_ERROR(DomainError);

// assoc
MULTIFUSE_DEFINE_ERROR(InsufficientSampleError);

// cluster
MULTIFUSE_DEFINE_ERROR(EmptyGraphError);

// synth
MULTIFUSE_DEFINE_ERROR(SpecError);

#undef MULTIFUSE_DEFINE_ERROR

} // namespace multifuse
