#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace coarse {

/// Runs one coarse-forge invocation. Exit status: 0 on success, 1 when a
/// verification fails (a witness row lands in the report), 2 on parse or
/// usage errors. All randomness flows from one seed (flag --seed, overridden
/// by the COARSE_FORGE_SEED environment variable) so identical invocations
/// produce byte-identical artifacts.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coarse
