#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "feederflow/solver.hpp"

namespace feederflow {

/// Parses and fully validates a feeder description document (JSON, schema
/// version 1). Throws ParseError with record identification on schema
/// violations, dangling references, or dimension mismatches.
Feeder parse_feeder(const std::filesystem::path& path);
Feeder parse_feeder_string(const std::string& text);

/// Serialization inverse of parse_feeder_string: parse(serialize(f)) == f.
std::string serialize_feeder(const Feeder& feeder);

/// Per-(bus, phase) voltage rows plus regulator internal-node rows and run
/// metadata, written as CSV with deterministic row order and fixed
/// 6-decimal formatting.
struct ResultDocument {
  struct Row {
    std::string bus;
    Phase phase;
    double vm_pu;
    double va_deg;
  };
  std::vector<Row> rows;
  int iterations = 0;
  double residual_inf = 0.0;
  double epsilon_rel = 0.0;
  double tol = 0.0;

  static ResultDocument build(const Feeder& feeder, const PhaseIndexMap& index,
                              const SolverResult& result, const SolverConfig& config);

  std::string csv() const;
  void write_csv(const std::filesystem::path& path) const;
};

/// Reads the (bus, phase) -> (vm, va) table back from a results or
/// benchmark CSV. Lines starting with '#' are ignored.
std::vector<ResultDocument::Row> read_result_csv(const std::filesystem::path& path);

/// Y exported as "row col re im" triplets (1-based indices, row-major
/// order), one nonzero per line, after a '#' header.
std::string ybus_triplets(const YBusPartition& partition, const PhaseIndexMap& index);

/// Entry point behind the feederflow CLI. Exit codes: 0 success, 2 usage
/// error, 3 parse error, 4 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace feederflow
