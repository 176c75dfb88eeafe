#pragma once

#include <stdexcept>
#include <string>

namespace gridtree {

/// Base of every error raised by the library. `kind()` is a stable name used
/// by the CLI and the Python bindings.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define GRIDTREE_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(#Name, what) {}   \
  };

// dataset
GRIDTREE_DEFINE_ERROR(DuplicateKey)
GRIDTREE_DEFINE_ERROR(SchemaError)
GRIDTREE_DEFINE_ERROR(EmptyInput)
GRIDTREE_DEFINE_ERROR(PartitionError)
GRIDTREE_DEFINE_ERROR(IncompleteGrid)
// id3
GRIDTREE_DEFINE_ERROR(HistogramMismatch)
GRIDTREE_DEFINE_ERROR(EmptyTraining)
GRIDTREE_DEFINE_ERROR(UnseenValue)
// smpc
GRIDTREE_DEFINE_ERROR(TooFewParties)
GRIDTREE_DEFINE_ERROR(DomainViolation)
GRIDTREE_DEFINE_ERROR(EncodingError)
GRIDTREE_DEFINE_ERROR(PaddingOverflow)
GRIDTREE_DEFINE_ERROR(SpecError)
// partynet
GRIDTREE_DEFINE_ERROR(ProtocolHang)
// protocols
GRIDTREE_DEFINE_ERROR(ConfigError)
GRIDTREE_DEFINE_ERROR(DanglingNode)
GRIDTREE_DEFINE_ERROR(Forbidden)
// costmodel
GRIDTREE_DEFINE_ERROR(FitError)

#undef GRIDTREE_DEFINE_ERROR

}  // namespace gridtree
