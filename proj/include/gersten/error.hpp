#pragma once

#include <stdexcept>
#include <string>

namespace gersten {

enum class errc {
    not_prime,
    size_bound,
    zero_polynomial,
    not_subfield,
    zero_element,
    zero_entry,
    field_mismatch,
    unsupported_extension,
    containment,
    degenerate_config,
    schema,
    inconsistency,
    need_support_hint,
    missing_fiber,
    unsupported_dimension,
    unsupported_scheme,
    unsupported_morphism,
    unsupported_field,
    unsupported_realization,
    exactness_violation,
    not_exhaustive,
    not_stabilized,
    parse,
    internal,
};

const char* errc_name(errc c);

class error : public std::runtime_error {
  public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    errc code() const { return code_; }

  private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

}  // namespace gersten
