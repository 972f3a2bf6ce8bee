#include "greedylab/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace greedylab {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

// Matrix CSV

void write_matrix_csv(std::ostream& out, const DenseMatrix& m) {
  out << kCsvVersionLine << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

DenseMatrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
      if (used == 0 || used != cell.size()) {
        throw Error(ErrorCode::Parse, "matrix CSV line " + std::to_string(line_no) +
                                          ": not a number: '" + cell + "'");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::Parse, "matrix CSV line " + std::to_string(line_no) + " has " +
                                        std::to_string(row.size()) + " columns, expected " +
                                        std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) throw Error(ErrorCode::Parse, "matrix CSV is empty");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return DenseMatrix(std::move(m));
}

void save_matrix_csv(const std::filesystem::path& path, const DenseMatrix& m) {
  std::ostringstream ss;
  write_matrix_csv(ss, m);
  write_text_file(path, ss.str());
}

DenseMatrix load_matrix_csv(const std::filesystem::path& path) {
  std::istringstream ss(read_text_file(path));
  return read_matrix_csv(ss);
}

// Signal JSON

json signal_to_json(const SparseSignal& x) {
  json entries = json::array();
  for (std::size_t i = 0; i < x.support().size(); ++i) {
    entries.push_back({{"index", x.support()[i] + 1}, {"value", x.values()[i]}});
  }
  return {{"n", x.dimension()}, {"entries", entries}};
}

SparseSignal signal_from_json(const json& j) {
  try {
    const Index n = j.at("n").get<Index>();
    std::vector<std::pair<Index, double>> pairs;
    for (const auto& e : j.at("entries")) {
      pairs.emplace_back(e.at("index").get<Index>() - 1, e.at("value").get<double>());
    }
    std::sort(pairs.begin(), pairs.end());
    IndexSet support;
    std::vector<double> values;
    for (const auto& [i, v] : pairs) {
      support.push_back(i);
      values.push_back(v);
    }
    return SparseSignal(n, std::move(support), std::move(values));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("signal JSON: ") + e.what());
  }
}

void save_signal_json(const std::filesystem::path& path, const SparseSignal& x) {
  write_text_file(path, dump_json(signal_to_json(x)) + "\n");
}

SparseSignal load_signal_json(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::Parse, "signal JSON is malformed: " + path.string());
  return signal_from_json(j);
}

// Trace and report JSON

namespace {

json one_based(const IndexSet& s) {
  json out = json::array();
  for (Index i : s) out.push_back(i + 1);
  return out;
}

}  // namespace

json trace_to_json(const RecoveryTrace& trace) {
  json iterations = json::array();
  for (const auto& rec : trace.iterations) {
    iterations.push_back({{"iteration", rec.iteration + 1},
                          {"chosen", one_based(rec.chosen)},
                          {"support", one_based(rec.support_after)},
                          {"residual_norm", rec.residual_norm_after}});
  }
  json estimate = json::array();
  for (Index i = 0; i < trace.estimate.size(); ++i) {
    if (trace.estimate(i) != 0.0) {
      estimate.push_back({{"index", i + 1}, {"value", trace.estimate(i)}});
    }
  }
  return {{"algorithm", std::string(to_string(trace.algorithm))},
          {"n", trace.estimate.size()},
          {"measurement_norm", trace.measurement_norm},
          {"converged", trace.converged},
          {"iterations_run", trace.iterations_run()},
          {"iterations", iterations},
          {"estimate", estimate}};
}

json rip_report_to_json(const RipReport& report) {
  return {{"order", report.order},
          {"delta", report.delta},
          {"mode", report.mode == RipMode::Exact ? "exact" : "sampled_lower_bound"},
          {"witness", one_based(report.witness)},
          {"supports_examined", report.supports_examined}};
}

void write_bound_checks_csv(std::ostream& out, const std::vector<BoundCheck>& checks) {
  out << kCsvVersionLine << '\n' << "name,lhs,rhs,satisfied,seed,dims\n";
  for (const auto& c : checks) {
    out << c.name << ',' << format_double(c.lhs) << ',' << format_double(c.rhs) << ','
        << (c.satisfied ? 1 : 0) << ',' << c.context.seed << ',' << c.context.rows << 'x'
        << c.context.cols << '\n';
  }
}

namespace {

void dump_value(std::string& out, const json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(it.key()).dump() + ": ";
        dump_value(out, it.value(), indent + 2);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump_value(out, j[i], indent + 2);
      }
      out += "\n" + close + "]";
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const json& j) {
  std::string out;
  dump_value(out, j, 0);
  return out;
}

}  // namespace greedylab
