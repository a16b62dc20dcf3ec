#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rauzy {

enum class errc {
  invalid_arguments,
  alphabet_mismatch,
  non_prolongable,
  non_primitive,
  non_expanding,
  non_convergence,
  degenerate_geometry,
  outside_domain,
  parse_error,
};

inline std::string_view to_string(errc code) {
  switch (code) {
    case errc::invalid_arguments: return "invalid-arguments";
    case errc::alphabet_mismatch: return "alphabet-mismatch";
    case errc::non_prolongable: return "non-prolongable";
    case errc::non_primitive: return "non-primitive";
    case errc::non_expanding: return "non-expanding";
    case errc::non_convergence: return "non-convergence";
    case errc::degenerate_geometry: return "degenerate-geometry";
    case errc::outside_domain: return "outside-domain";
    case errc::parse_error: return "parse-error";
  }
  return "unknown";
}

/// Exception carrying a machine-checkable error category.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace rauzy
