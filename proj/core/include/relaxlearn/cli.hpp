#pragma once

#include <string>
#include <vector>

namespace relaxlearn::cli {

// Batch experiment runner. args excludes the program name. Subcommands:
// gen, pca, spectral, dict-group, dict-single, srw, rademacher, sos-check,
// report. Exit codes: 0 success, 1 config error, 2 solver-budget diagnostic.
//
// Every run writes <out>/manifest.json echoing the resolved configuration;
// `--from-manifest FILE` re-runs a recorded configuration (extra flags,
// typically --out, take precedence). `--config FILE` loads key=value lines.
int run(const std::vector<std::string>& args);

}  // namespace relaxlearn::cli
