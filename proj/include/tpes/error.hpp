#ifndef TPES_ERROR_HPP
#define TPES_ERROR_HPP

#include <stdexcept>
#include <string>

namespace tpes {

// Error categories map 1:1 onto CLI exit codes / C API status codes.
enum class ErrorKind {
    invalid_input,  // bad config, bad data, violated precondition
    infeasible,     // model proven infeasible or unbounded
    solver,         // solver gave up or an external solver misbehaved
    io,             // file system trouble
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

inline Error input_error(const std::string& msg) { return Error(ErrorKind::invalid_input, msg); }
inline Error infeasible_error(const std::string& msg) { return Error(ErrorKind::infeasible, msg); }
inline Error solver_error(const std::string& msg) { return Error(ErrorKind::solver, msg); }
inline Error io_error(const std::string& msg) { return Error(ErrorKind::io, msg); }

}  // namespace tpes

#endif
