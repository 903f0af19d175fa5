#ifndef FORRELAB_EXPERIMENTS_HPP
#define FORRELAB_EXPERIMENTS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace forrelab {

// Declarative run description.  Zero-valued numeric fields and empty strings
// mean "use the experiment's default"; resolve_config fills them in.
struct experiment_config {
  std::string name;
  int n = 0;
  int k = 0;
  double eps = 0.0;
  double threshold = 0.0;     // relation threshold c (fsample-relation only)
  long long trials = 0;
  std::uint64_t seed = 1;
  std::string strategy;       // query strategy (gaussian-bias-curve only)
  std::string out_path;       // file prefix; empty = do not write files
  std::string format = "csv"; // trial-table format: csv | json
};

struct experiment_report {
  std::string name;
  std::string schema;         // versioned CSV schema id
  experiment_config config;   // resolved configuration
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::map<std::string, double> metrics;
  bool pass = false;
  double elapsed_seconds = 0.0;  // excluded from the content hash
  std::string data_csv;          // assembled trial table
  std::string data_hash;         // content hash of data_csv
  std::string summary_json;      // config echo + metrics + pass + hash
};

const std::vector<std::string>& experiment_names();

// Fills defaults and validates; throws value_error on an unknown name,
// foreign format, or out-of-domain parameter.
experiment_config resolve_config(const experiment_config& cfg);

// Runs the named experiment.  The data section is a pure function of the
// resolved config (seed derivation is counter-based per trial, so scheduling
// cannot change results).  When out_path is set, writes the trial table to
// <out_path>.csv or <out_path>.data.json and the summary to
// <out_path>.summary.json.
experiment_report run_experiment(const experiment_config& cfg);

}  // namespace forrelab

#endif  // FORRELAB_EXPERIMENTS_HPP
