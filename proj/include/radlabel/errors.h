#ifndef RADLABEL_ERRORS_H_
#define RADLABEL_ERRORS_H_

#include <stdexcept>
#include <string>

namespace radlabel {

// Input data violates a contract (bad file, unknown label, duplicate id...).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string &what) : std::runtime_error(what) {}
};

// Endpoint could not be reached or answered with a transport-level failure.
class TransportError : public std::runtime_error {
 public:
  explicit TransportError(const std::string &what, bool retryable = true)
      : std::runtime_error(what), retryable_(retryable) {}

  // False for failures a retry cannot fix (bad request, auth, bad payload).
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

// Emits a warning line on stderr.
void warn(const std::string &message);

}  // namespace radlabel

#endif  // RADLABEL_ERRORS_H_
