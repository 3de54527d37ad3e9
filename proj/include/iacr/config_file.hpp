#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "iacr/experiments.hpp"

namespace iacr {

/// "key = value" lines; '#' starts a comment; blank lines are ignored.
/// Duplicate keys and lines without '=' are InputErrors.
std::map<std::string, std::string> parse_key_values(std::istream& in,
                                                    const std::string& source = "<input>");

/// Builds a scenario from parsed keys on top of the defaults. Recognised keys:
///   network.K, network.pair.{M,N,d,p} (all pairs), network.pair[k].{M,N,d,p},
///   secondary.{M,N,d,p}, noise_var, seed,
///   scenario.{name,trials,snr_db,tx_antennas,rx_antennas,ia_iterations,workers,silent},
///   sensing.{T,L,fast_pfa,fast_eta,dim,form,enforce_T,fine_T,fine_pfa,
///            fine_threshold,convention,T_grid,fine_T_grid,eta_grid,pfa_targets}.
/// Lists are comma separated; silent streams are written pair:stream, both
/// 1-based. Unknown keys, malformed values and invalid networks throw
/// InputError naming every problem.
Scenario scenario_from_keys(const std::map<std::string, std::string>& kv);

Scenario load_scenario(const std::filesystem::path& path);

}  // namespace iacr
