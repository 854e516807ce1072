#pragma once

#include <stdexcept>
#include <string>

namespace bellwright {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A leaf of an event expression names an atomic event the space never declared.
struct UndeclaredAtom : Error {
  explicit UndeclaredAtom(const std::string& name)
      : Error("undeclared atomic event: " + name), atom(name) {}
  std::string atom;
};

// Conditioning event has probability zero.
struct ZeroConditioning : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

struct InvalidModel : Error {
  using Error::Error;
};

struct NotPerfectlyCorrelated : Error {
  using Error::Error;
};

struct NotScreeningOff : Error {
  explicit NotScreeningOff(const std::string& value, const std::string& detail)
      : Error("screening-off fails at value " + value + ": " + detail), value(value) {}
  std::string value;
};

struct BiconditionalFails : Error {
  BiconditionalFails(const std::string& which, const std::string& atom)
      : Error("biconditional " + which + " fails at atom " + atom),
        which(which),
        atom(atom) {}
  std::string which;
  std::string atom;
};

struct MalformedTargets : Error {
  using Error::Error;
};

struct CertificateMismatch : Error {
  using Error::Error;
};

struct EmptySubensemble : Error {
  using Error::Error;
};

struct OutOfRange : Error {
  using Error::Error;
};

}  // namespace bellwright
