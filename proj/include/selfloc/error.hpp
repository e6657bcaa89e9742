#pragma once

#include <stdexcept>
#include <string>

namespace selfloc {

struct SolverError : std::runtime_error {
  enum class Kind {
    no_root,
    wrong_node_count,
    overflow,
    non_convergence,
    not_implemented,
    invalid_argument,
    io,
  };
  Kind kind;
  SolverError(Kind k, const std::string& what)
      : std::runtime_error(what), kind(k) {}
};

}  // namespace selfloc
