#pragma once

#include <stdexcept>
#include <string>

namespace musent {

// Base of every error thrown by the library. Catch this to handle any of them.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MUSENT_DEFINE_ERROR(Name)          \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

// core-model
MUSENT_DEFINE_ERROR(AmbiguousPoint);
MUSENT_DEFINE_ERROR(WrongLabelSet);
MUSENT_DEFINE_ERROR(DistributionInvalid);

// lexicon / file parsing
MUSENT_DEFINE_ERROR(ParseError);
MUSENT_DEFINE_ERROR(DuplicateWord);
MUSENT_DEFINE_ERROR(OutOfScaleRating);
MUSENT_DEFINE_ERROR(NotInLexicon);

// chunker
MUSENT_DEFINE_ERROR(EmptyText);
MUSENT_DEFINE_ERROR(MixedLabelSets);
MUSENT_DEFINE_ERROR(LengthMismatch);

// fusion
MUSENT_DEFINE_ERROR(TieError);
MUSENT_DEFINE_ERROR(WeightOutOfRange);
MUSENT_DEFINE_ERROR(EmptyDataset);

// eval
MUSENT_DEFINE_ERROR(UnknownLabel);

// ingest
MUSENT_DEFINE_ERROR(DuplicateSongId);
MUSENT_DEFINE_ERROR(SchemaError);

MUSENT_DEFINE_ERROR(InvalidArgument);
MUSENT_DEFINE_ERROR(IoError);

#undef MUSENT_DEFINE_ERROR

}  // namespace musent
