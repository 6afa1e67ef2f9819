#pragma once

#include <ostream>
#include <string>

#include "config.hpp"

namespace oufreq::cli {

// Each command writes its files under cfg.out_dir and a short summary to
// `log`. Failures are reported by throwing oufreq errors.
void cmd_spectrum(const RunConfig& cfg, std::ostream& log);
void cmd_simulate(const RunConfig& cfg, std::ostream& log);
void cmd_beta(const RunConfig& cfg, std::ostream& log);
void cmd_verify(const RunConfig& cfg, std::ostream& log);
void cmd_quadcheck(const RunConfig& cfg, std::ostream& log);

/// Maps an exception to the documented exit status.
int exit_code_for(const std::exception& e);

}  // namespace oufreq::cli
