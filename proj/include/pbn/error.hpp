#ifndef PBN_ERROR_HPP
#define PBN_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pbn {

/// Base of every error raised by the engine. `kind()` is a stable name used
/// in CLI diagnostics and in the Python bindings.
class Error : public std::runtime_error {
  public:
    Error(std::string_view kind, const std::string &what)
        : std::runtime_error(what), m_kind(kind) {}

    std::string_view kind() const noexcept { return m_kind; }

  private:
    std::string_view m_kind;
};

#define PBN_DEFINE_ERROR(Name)                                                 \
    class Name : public Error {                                                \
      public:                                                                  \
        explicit Name(const std::string &what) : Error(#Name, what) {}         \
    }

// prob-core / observables
PBN_DEFINE_ERROR(UnknownLabel);
PBN_DEFINE_ERROR(DuplicateLabel);
PBN_DEFINE_ERROR(ZeroConditioningEvent);
PBN_DEFINE_ERROR(NormalizationViolation);
PBN_DEFINE_ERROR(IncompleteObservable);

// composite
PBN_DEFINE_ERROR(CapacityExceeded);
PBN_DEFINE_ERROR(IndexOutOfRange);
PBN_DEFINE_ERROR(UnsupportedBasis);
PBN_DEFINE_ERROR(FactorialOverflow);

// markov
PBN_DEFINE_ERROR(NonStochasticMatrix);
PBN_DEFINE_ERROR(InvalidGenerator);
PBN_DEFINE_ERROR(TruncationFailure);
PBN_DEFINE_ERROR(Reducible);
PBN_DEFINE_ERROR(NoConvergence);
PBN_DEFINE_ERROR(SingularPropagator);
PBN_DEFINE_ERROR(DimensionMismatch);
PBN_DEFINE_ERROR(CutoffTooSmall);
PBN_DEFINE_ERROR(InvalidTime);

// pbn-lang
PBN_DEFINE_ERROR(UnknownIdentifier);
PBN_DEFINE_ERROR(TypeMismatch);
PBN_DEFINE_ERROR(TimeTagWithoutDynamics);
PBN_DEFINE_ERROR(NonIntegerTimeForDTMC);
PBN_DEFINE_ERROR(FunctionDomainError);

// cli
PBN_DEFINE_ERROR(IoError);
PBN_DEFINE_ERROR(ValidationError);

#undef PBN_DEFINE_ERROR

/// Lexer failure at a byte offset into the query.
class LexError : public Error {
  public:
    LexError(std::size_t position, const std::string &what)
        : Error("LexError", what), m_position(position) {}
    std::size_t position() const noexcept { return m_position; }

  private:
    std::size_t m_position;
};

/// Parser failure; `expected()` lists the token kinds that would have been
/// accepted at `position()`.
class ParseError : public Error {
  public:
    ParseError(std::size_t position, std::string expected,
               const std::string &what)
        : Error("ParseError", what), m_position(position),
          m_expected(std::move(expected)) {}
    std::size_t position() const noexcept { return m_position; }
    const std::string &expected() const noexcept { return m_expected; }

  private:
    std::size_t m_position;
    std::string m_expected;
};

/// Model file does not match the schema; `pointer()` is a JSON pointer to the
/// offending field.
class SchemaError : public Error {
  public:
    SchemaError(std::string pointer, const std::string &what)
        : Error("SchemaError", pointer + ": " + what),
          m_pointer(std::move(pointer)) {}
    const std::string &pointer() const noexcept { return m_pointer; }

  private:
    std::string m_pointer;
};

} // namespace pbn

#endif
