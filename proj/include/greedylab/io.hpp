#ifndef GREEDYLAB_IO_HPP
#define GREEDYLAB_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "greedylab/greedy.hpp"
#include "greedylab/model.hpp"
#include "greedylab/theory.hpp"

namespace greedylab {

/// First line of every CSV the tools write.
inline constexpr const char* kCsvVersionLine = "# greedylab-csv v1";

/// %.17g: round-trips any double exactly.
std::string format_double(double v);

// Matrix CSV: one matrix row per line, comma-separated decimals. Lines that
// start with '#' and blank lines are skipped on read.
void write_matrix_csv(std::ostream& out, const DenseMatrix& m);
DenseMatrix read_matrix_csv(std::istream& in);
void save_matrix_csv(const std::filesystem::path& path, const DenseMatrix& m);
DenseMatrix load_matrix_csv(const std::filesystem::path& path);

// Signal JSON: {"n": N, "entries": [{"index": i, "value": v}, ...]} with
// one-based indices.
nlohmann::json signal_to_json(const SparseSignal& x);
SparseSignal signal_from_json(const nlohmann::json& j);
void save_signal_json(const std::filesystem::path& path, const SparseSignal& x);
SparseSignal load_signal_json(const std::filesystem::path& path);

/// Trace JSON: algorithm, convergence flag, per-iteration chosen indices
/// (one-based), support and residual norm, and the final estimate as
/// (index, value) pairs.
nlohmann::json trace_to_json(const RecoveryTrace& trace);

nlohmann::json rip_report_to_json(const RipReport& report);

/// name,lhs,rhs,satisfied,seed,dims rows under the version line.
void write_bound_checks_csv(std::ostream& out, const std::vector<BoundCheck>& checks);

/// Serializes with 17 significant digits for every float.
std::string dump_json(const nlohmann::json& j);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace greedylab

#endif  // GREEDYLAB_IO_HPP
