#pragma once

// Line-oriented model text format.
//
//   vars N
//   clause (W|hard) L1 L2 ...       Li = +v or -v, variables 1-based
//   factor K v1 .. vK t0 .. tK      log-weights indexed by true count
//   evidence true
//   evidence card (eq|le|ge) B v1 .. vn
//
// '#' starts a comment. `vars` comes first; at most one `evidence` line.

#include <string>
#include <string_view>

#include "symlift/model.hpp"

namespace symlift {

/// Throws ParseError with the 1-based line and column of the problem.
Model parse_model(std::string_view text);

/// Text that parse_model maps back to an equal model. Weights use the
/// shortest round-trip decimal form.
std::string serialize_model(const Model &m);

} // namespace symlift
