#pragma once

#include <stdexcept>
#include <string>

namespace afl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientPrecision : public Error {
 public:
  explicit InsufficientPrecision(const std::string& what)
      : Error("insufficient precision: " + what) {}
};

class ZeroInput : public Error {
 public:
  explicit ZeroInput(const std::string& what) : Error("zero input: " + what) {}
};

class NotRegularSemisimple : public Error {
 public:
  explicit NotRegularSemisimple(const std::string& what)
      : Error("not regular semisimple: " + what) {}
};

class NotInDomain : public Error {
 public:
  explicit NotInDomain(const std::string& what) : Error("not in domain: " + what) {}
};

class PreconditionViolated : public Error {
 public:
  explicit PreconditionViolated(const std::string& what)
      : Error("precondition violated: " + what) {}
};

class NotAVertexLattice : public Error {
 public:
  explicit NotAVertexLattice(const std::string& what)
      : Error("not a vertex lattice: " + what) {}
};

class InfiniteLength : public Error {
 public:
  explicit InfiniteLength(const std::string& what) : Error("infinite length: " + what) {}
};

class NonIntegral : public Error {
 public:
  explicit NonIntegral(const std::string& what) : Error("non-integral: " + what) {}
};

class GermDoesNotStabilize : public Error {
 public:
  explicit GermDoesNotStabilize(const std::string& what)
      : Error("germ does not stabilize: " + what) {}
};

class NoSplitComplement : public Error {
 public:
  explicit NoSplitComplement(const std::string& what)
      : Error("no split complement: " + what) {}
};

}  // namespace afl
