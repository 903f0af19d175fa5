#ifndef FORRELAB_ERRORS_HPP
#define FORRELAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace forrelab {

// Base class for all library errors.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input has the wrong shape (length not a power of two, mismatched lengths, ...).
class shape_error : public error {
 public:
  using error::error;
};

// A value is outside the operation's domain (bad k, bad epsilon, ...).
class value_error : public error {
 public:
  using error::error;
};

// The requested computation exceeds the configured resource guard.
class resource_error : public error {
 public:
  using error::error;
};

// A documented precondition was violated (e.g. unbalanced polynomial).
class precondition_error : public error {
 public:
  using error::error;
};

// A query is linearly dependent on earlier ones; the response is already determined.
class degenerate_query_error : public error {
 public:
  using error::error;
};

// An iterative procedure failed to converge within its iteration cap.
class diagnostic_error : public error {
 public:
  using error::error;
};

// File or text input could not be read or parsed.
class io_error : public error {
 public:
  using error::error;
};

}  // namespace forrelab

#endif  // FORRELAB_ERRORS_HPP
