#pragma once

// xnetrec command-line front end.
//
//   xnetrec ingest  --format movielens <ratings.dat> [--out DIR]
//   xnetrec synth   --config synth.cfg [--out DIR]
//   xnetrec train   --model NAME --data DIR [--config run.cfg] [flags] [--out DIR] [--resume]
//   xnetrec eval    --run DIR [--metrics hr,auc,novelty,diversity] [--n 10] [--out DIR]
//   xnetrec ablate  --data DIR [--config run.cfg] [--seeds 1,2,3] [--out DIR]
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 numeric failure. Without --out, results go under $XNETREC_OUT (default
// ./runs).

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "xnetrec/crossnet_run.hpp"

namespace xnetrec::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::filesystem::path default_output_root();

// Cross-network view of a dataset directory written by ingest or synth.
CrossNetData load_crossnet_dir(const std::filesystem::path& dir);

}  // namespace xnetrec::cli
