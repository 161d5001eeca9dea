#include "gatecheck/iofmt.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace gatecheck::iofmt {

namespace {

using analysis::CountTable;
using analysis::Provenance;
using analysis::TruthTable;
using gatelib::BasisKind;
using nlohmann::json;

constexpr BasisKind kAllKinds[] = {BasisKind::ZProduct, BasisKind::XProduct,
                                   BasisKind::ZxEigen, BasisKind::XzEigen,
                                   BasisKind::Bell};

std::string trim(std::string_view s) {
  std::size_t begin = 0, end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return std::string(s.substr(begin, end - begin));
}

std::string format_full(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::string format_fixed3(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.3f", v);
  return buffer;
}

int label_position(const std::vector<std::string>& labels, const std::string& label,
                   const char* what) {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) {
    throw std::invalid_argument(std::string("truth table: unknown ") + what +
                                " label \"" + label + "\"");
  }
  return static_cast<int>(it - labels.begin());
}

/// Identifies the basis family whose canonical input labels match the given
/// set (used for CSV files, which carry no explicit basis tag).
BasisKind infer_basis_from_labels(const std::vector<std::string>& row_labels) {
  for (BasisKind kind : kAllKinds) {
    const auto family = gatelib::basis_family(kind);
    std::vector<std::string> canonical = family.labels;
    std::vector<std::string> sorted = row_labels;
    std::sort(canonical.begin(), canonical.end());
    std::sort(sorted.begin(), sorted.end());
    if (canonical == sorted) return kind;
  }
  throw std::invalid_argument("truth table: input labels match no known basis");
}

struct RawTable {
  BasisKind basis;
  Eigen::MatrixXd values;  // canonical row/column order
  bool integral = true;
};

double parse_number(const std::string& text) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &consumed);
  } catch (const std::exception&) {
    throw std::invalid_argument("truth table: malformed number \"" + text + "\"");
  }
  if (consumed != text.size()) {
    throw std::invalid_argument("truth table: malformed number \"" + text + "\"");
  }
  return value;
}

void check_entry(double value) {
  if (!std::isfinite(value) || value < 0.0) {
    throw std::invalid_argument("truth table: entries must be finite and nonnegative");
  }
}

RawTable read_json_table(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("truth table: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("basis") || !doc.contains("rows") ||
      !doc["rows"].is_array()) {
    throw std::invalid_argument("truth table: expected {\"basis\": ..., \"rows\": [...]}");
  }
  RawTable raw;
  raw.basis = gatelib::basis_from_name(doc["basis"].get<std::string>());
  const auto family = gatelib::basis_family(raw.basis);
  const auto output = gatelib::basis_family(family.output_kind);
  const int d = family.dim();
  if (static_cast<int>(doc["rows"].size()) != d) {
    throw std::invalid_argument("truth table: expected one row per basis member");
  }
  raw.values = Eigen::MatrixXd::Constant(d, d, -1.0);
  for (const json& row : doc["rows"]) {
    if (!row.is_object() || !row.contains("input")) {
      throw std::invalid_argument("truth table: each row needs an \"input\" label");
    }
    const int k = label_position(family.labels, row["input"].get<std::string>(), "input");
    const json* entries = nullptr;
    if (row.contains("probs")) {
      entries = &row["probs"];
    } else if (row.contains("counts")) {
      entries = &row["counts"];
    } else {
      throw std::invalid_argument("truth table: row carries neither probs nor counts");
    }
    if (!entries->is_object() || static_cast<int>(entries->size()) != d) {
      throw std::invalid_argument("truth table: expected one entry per output label");
    }
    if (raw.values(k, 0) >= 0.0) {
      throw std::invalid_argument("truth table: duplicate input row");
    }
    for (const auto& [label, value] : entries->items()) {
      const int j = label_position(output.labels, label, "output");
      if (!value.is_number()) {
        throw std::invalid_argument("truth table: entries must be numbers");
      }
      const double v = value.get<double>();
      check_entry(v);
      raw.values(k, j) = v;
      raw.integral = raw.integral && std::floor(v) == v;
    }
  }
  return raw;
}

RawTable read_csv_table(std::string_view bytes) {
  std::vector<std::vector<std::string>> lines;
  std::istringstream stream{std::string(bytes)};
  std::string line;
  while (std::getline(stream, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::istringstream fs(line);
    std::string field;
    while (std::getline(fs, field, ',')) fields.push_back(trim(field));
    lines.push_back(std::move(fields));
  }
  if (lines.size() < 2 || lines.front().empty() || lines.front()[0] != "input") {
    throw std::invalid_argument("truth table: CSV must start with an \"input\" header");
  }
  std::vector<std::string> col_labels(lines.front().begin() + 1, lines.front().end());
  std::vector<std::string> row_labels;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].size() != lines.front().size()) {
      throw std::invalid_argument("truth table: CSV row width mismatch");
    }
    row_labels.push_back(lines[i][0]);
  }
  RawTable raw;
  raw.basis = infer_basis_from_labels(row_labels);
  const auto family = gatelib::basis_family(raw.basis);
  const auto output = gatelib::basis_family(family.output_kind);
  const int d = family.dim();
  if (static_cast<int>(col_labels.size()) != d ||
      static_cast<int>(row_labels.size()) != d) {
    throw std::invalid_argument("truth table: CSV must be d x d");
  }
  raw.values = Eigen::MatrixXd::Constant(d, d, -1.0);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const int k = label_position(family.labels, lines[i][0], "input");
    if (raw.values(k, 0) >= 0.0) {
      throw std::invalid_argument("truth table: duplicate input row");
    }
    for (int c = 0; c < d; ++c) {
      const int j = label_position(output.labels, col_labels[c], "output");
      const double v = parse_number(lines[i][c + 1]);
      check_entry(v);
      raw.values(k, j) = v;
      raw.integral = raw.integral && std::floor(v) == v;
    }
  }
  return raw;
}

}  // namespace

TableFormat sniff_table_format(std::string_view filename, std::string_view content) {
  if (filename.size() >= 4 && filename.substr(filename.size() - 4) == ".csv") {
    return TableFormat::Csv;
  }
  for (char c : content) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{' ? TableFormat::Json : TableFormat::Csv;
  }
  return TableFormat::Json;
}

TruthTable parse_truth_table(std::string_view bytes, TableFormat format) {
  const RawTable raw = format == TableFormat::Json ? read_json_table(bytes)
                                                   : read_csv_table(bytes);
  const auto family = gatelib::basis_family(raw.basis);
  const int d = family.dim();
  if (raw.values.minCoeff() < 0.0) {
    throw std::invalid_argument("truth table: missing or duplicate labels");
  }

  TruthTable table;
  table.basis = raw.basis;
  table.d = d;
  table.ideal_permutation = family.perm;
  table.provenance = raw.integral ? Provenance::Counts : Provenance::Exact;
  table.probs = Eigen::MatrixXd::Zero(d, d);

  std::int64_t common_shots = -1;
  bool uniform_shots = raw.integral;
  for (int k = 0; k < d; ++k) {
    const double row_sum = raw.values.row(k).sum();
    if (raw.integral) {
      if (row_sum <= 0.0) {
        throw std::invalid_argument("truth table: count row has no shots");
      }
      const auto shots = static_cast<std::int64_t>(std::llround(row_sum));
      if (common_shots < 0) common_shots = shots;
      uniform_shots = uniform_shots && (shots == common_shots);
    } else if (std::abs(row_sum - 1.0) > 0.05) {
      throw std::invalid_argument("truth table: probability row sums far from 1");
    }
    table.probs.row(k) = raw.values.row(k) / row_sum;
  }
  table.shots_per_row = (raw.integral && uniform_shots) ? common_shots : 0;
  table.validate();
  return table;
}

std::string emit_truth_table(const TruthTable& table, TableFormat format) {
  table.validate();
  const auto family = gatelib::basis_family(table.basis);
  const auto output = gatelib::basis_family(family.output_kind);
  const int d = table.d;
  if (format == TableFormat::Json) {
    json rows = json::array();
    for (int k = 0; k < d; ++k) {
      json probs;
      for (int j = 0; j < d; ++j) probs[output.labels[j]] = table.probs(k, j);
      rows.push_back({{"input", family.labels[k]}, {"probs", std::move(probs)}});
    }
    json doc{{"basis", gatelib::basis_name(table.basis)}, {"rows", std::move(rows)}};
    return doc.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "input";
  for (int j = 0; j < d; ++j) out << ',' << output.labels[j];
  out << '\n';
  for (int k = 0; k < d; ++k) {
    out << family.labels[k];
    for (int j = 0; j < d; ++j) out << ',' << format_full(table.probs(k, j));
    out << '\n';
  }
  return out.str();
}

std::string emit_count_table(const CountTable& table, TableFormat format) {
  const auto family = gatelib::basis_family(table.basis);
  const auto output = gatelib::basis_family(family.output_kind);
  const int d = static_cast<int>(table.counts.rows());
  if (d != family.dim() || table.counts.cols() != d) {
    throw std::invalid_argument("emit_count_table: wrong table shape");
  }
  if (format == TableFormat::Json) {
    json rows = json::array();
    for (int k = 0; k < d; ++k) {
      json counts;
      for (int j = 0; j < d; ++j) counts[output.labels[j]] = table.counts(k, j);
      rows.push_back({{"input", family.labels[k]}, {"counts", std::move(counts)}});
    }
    json doc{{"basis", gatelib::basis_name(table.basis)}, {"rows", std::move(rows)}};
    return doc.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "input";
  for (int j = 0; j < d; ++j) out << ',' << output.labels[j];
  out << '\n';
  for (int k = 0; k < d; ++k) {
    out << family.labels[k];
    for (int j = 0; j < d; ++j) out << ',' << table.counts(k, j);
    out << '\n';
  }
  return out.str();
}

channel::NoisyGateModel parse_model(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("model: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("gate")) {
    throw std::invalid_argument("model: expected an object with a \"gate\" field");
  }
  const std::string gate = doc["gate"].get<std::string>();
  qmath::CMatrix ideal;
  if (gate == "cnot") {
    ideal = gatelib::cnot();
  } else {
    throw std::invalid_argument("model: unknown gate \"" + gate + "\"");
  }

  if (doc.contains("chi_diagonal")) {
    if (!doc["chi_diagonal"].is_object()) {
      throw std::invalid_argument("model: chi_diagonal must map labels to weights");
    }
    std::map<std::string, double> weights;
    for (const auto& [label, value] : doc["chi_diagonal"].items()) {
      if (!value.is_number()) {
        throw std::invalid_argument("model: chi weights must be numbers");
      }
      weights[label] = value.get<double>();
    }
    return channel::NoisyGateModel::chi_diagonal(std::move(ideal), weights);
  }
  if (doc.contains("unitary_mixture")) {
    if (!doc["unitary_mixture"].is_array() || doc["unitary_mixture"].empty()) {
      throw std::invalid_argument("model: unitary_mixture must be a nonempty array");
    }
    std::vector<std::pair<double, qmath::CMatrix>> ops;
    for (const json& entry : doc["unitary_mixture"]) {
      if (!entry.is_object() || !entry.contains("p") || !entry.contains("matrix")) {
        throw std::invalid_argument("model: mixture entries need \"p\" and \"matrix\"");
      }
      const double p = entry["p"].get<double>();
      const json& rows = entry["matrix"];
      const auto d = static_cast<Eigen::Index>(ideal.rows());
      if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != d) {
        throw std::invalid_argument("model: matrix must have one row per dimension");
      }
      qmath::CMatrix op(d, d);
      for (Eigen::Index r = 0; r < d; ++r) {
        const json& row = rows[r];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
          throw std::invalid_argument("model: matrix row has wrong length");
        }
        for (Eigen::Index c = 0; c < d; ++c) {
          const json& cell = row[c];
          if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() ||
              !cell[1].is_number()) {
            throw std::invalid_argument("model: matrix entries are [re, im] pairs");
          }
          op(r, c) = qmath::Complex(cell[0].get<double>(), cell[1].get<double>());
        }
      }
      ops.emplace_back(p, std::move(op));
    }
    return channel::NoisyGateModel::unitary_mixture(std::move(ideal), std::move(ops));
  }
  throw std::invalid_argument("model: expected chi_diagonal or unitary_mixture");
}

std::string emit_model(const channel::NoisyGateModel& model) {
  json doc;
  doc["gate"] = "cnot";
  if (model.variant() == channel::NoisyGateModel::Variant::ChiDiagonal) {
    json weights;
    const auto labels = gatelib::PauliLabel::all(model.n_qubits());
    for (const auto& label : labels) {
      const double w = model.chi_weights()[label.index()];
      if (w != 0.0) weights[label.str()] = w;
    }
    doc["chi_diagonal"] = std::move(weights);
  } else {
    json mixture = json::array();
    for (const auto& [p, op] : model.mixture()) {
      json rows = json::array();
      for (Eigen::Index r = 0; r < op.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < op.cols(); ++c) {
          row.push_back({op(r, c).real(), op(r, c).imag()});
        }
        rows.push_back(std::move(row));
      }
      mixture.push_back({{"p", p}, {"matrix", std::move(rows)}});
    }
    doc["unitary_mixture"] = std::move(mixture);
  }
  return doc.dump(2) + "\n";
}

std::string emit_report(const analysis::FidelityReport& report, ReportFormat format) {
  static const char kSymbols[] = {'0', 'C', 'T', 'B'};
  if (format == ReportFormat::Json) {
    json eta_z, eta_x;
    for (char s : kSymbols) {
      eta_z[std::string(1, s)] = report.eta_z.at_symbol(s);
      eta_x[std::string(1, s)] = report.eta_x.at_symbol(s);
    }
    json doc{{"f_z", report.f_z},
             {"f_x", report.f_x},
             {"f_qp_lo", report.f_qp_lo},
             {"f_qp_lo_unclamped", report.f_qp_lo_unclamped},
             {"f_qp_hi", report.f_qp_hi},
             {"c_coarse", report.c_coarse},
             {"d_coarse", report.d_coarse},
             {"f_i_min", report.f_i_min},
             {"f_c_min", report.f_c_min},
             {"f_d_min", report.f_d_min},
             {"c_refined", report.c_refined},
             {"d_refined", report.d_refined},
             {"eta_z", std::move(eta_z)},
             {"eta_x", std::move(eta_x)}};
    return doc.dump(2) + "\n";
  }

  std::ostringstream out;
  out << "# Gate characterization report\n\n";
  out << "## Classical fidelities\n\n";
  out << "| quantity | value |\n|---|---|\n";
  out << "| F_Z | " << format_fixed3(report.f_z) << " |\n";
  out << "| F_X | " << format_fixed3(report.f_x) << " |\n\n";
  out << "F_qp in [" << format_fixed3(report.f_qp_lo) << ", "
      << format_fixed3(report.f_qp_hi) << "]";
  if (report.f_qp_lo_unclamped < 0.0) {
    out << " (lower bound clamped; unclamped "
        << format_fixed3(report.f_qp_lo_unclamped) << ")";
  }
  out << "\n\n";
  out << "Entanglement capability C >= " << format_fixed3(report.c_coarse)
      << ", discrimination D >= " << format_fixed3(report.d_coarse)
      << " (witness b = " << format_fixed3(report.witness_b) << ")\n\n";

  out << "## Error budget (flip patterns of the output)\n\n";
  out << "| basis | 0 | C | T | B |\n|---|---|---|---|---|\n";
  out << "| Z |";
  for (char s : kSymbols) out << ' ' << format_fixed3(report.eta_z.at_symbol(s)) << " |";
  out << "\n| X |";
  for (char s : kSymbols) out << ' ' << format_fixed3(report.eta_x.at_symbol(s)) << " |";
  out << "\n\n";

  out << "## Diagonal error grid at minimal process fidelity\n\n";
  out << "| chi_ii | *0 | *C | *T | *B | sum |\n|---|---|---|---|---|---|\n";
  for (char rs : kSymbols) {
    const unsigned r = gatelib::pattern_mask(rs);
    out << "| " << rs << "* |";
    for (char cs : kSymbols) {
      const unsigned c = gatelib::pattern_mask(cs);
      out << ' ' << format_fixed3(report.min_fqp_grid(r, c)) << " |";
    }
    out << ' ' << format_fixed3(report.eta_z.at_mask(r)) << " |\n";
  }
  out << "| sum |";
  for (char cs : kSymbols) {
    out << ' ' << format_fixed3(report.eta_x.at_mask(gatelib::pattern_mask(cs))) << " |";
  }
  out << " 1.000 |\n\n";

  out << "## Derived operation bounds\n\n";
  out << "| operation | minimal fidelity | bound |\n|---|---|---|\n";
  out << "| identity on ZX eigenstates | F_I >= " << format_fixed3(report.f_i_min)
      << " | |\n";
  out << "| entangler (XZ inputs to Bell outputs) | F_C >= "
      << format_fixed3(report.f_c_min) << " | C >= " << format_fixed3(report.c_refined)
      << " |\n";
  out << "| Bell analyzer (Bell inputs to XZ outputs) | F_D >= "
      << format_fixed3(report.f_d_min) << " | D >= " << format_fixed3(report.d_refined)
      << " |\n";
  return out.str();
}

std::string fixture_z_json() {
  return R"({
  "basis": "Z",
  "rows": [
    {"input": "0z0z", "probs": {"0z0z": 0.898, "0z1z": 0.031, "1z0z": 0.061, "1z1z": 0.011}},
    {"input": "0z1z", "probs": {"0z0z": 0.021, "0z1z": 0.885, "1z0z": 0.006, "1z1z": 0.088}},
    {"input": "1z0z", "probs": {"0z0z": 0.064, "0z1z": 0.027, "1z0z": 0.099, "1z1z": 0.810}},
    {"input": "1z1z", "probs": {"0z0z": 0.031, "0z1z": 0.096, "1z0z": 0.819, "1z1z": 0.054}}
  ]
}
)";
}

std::string fixture_x_json() {
  return R"({
  "basis": "X",
  "rows": [
    {"input": "0x0x", "probs": {"0x0x": 0.854, "0x1x": 0.044, "1x0x": 0.063, "1x1x": 0.039}},
    {"input": "0x1x", "probs": {"0x0x": 0.013, "0x1x": 0.099, "1x0x": 0.013, "1x1x": 0.874}},
    {"input": "1x0x", "probs": {"0x0x": 0.050, "0x1x": 0.021, "1x0x": 0.871, "1x1x": 0.058}},
    {"input": "1x1x", "probs": {"0x0x": 0.019, "0x1x": 0.870, "1x0x": 0.040, "1x1x": 0.071}}
  ]
}
)";
}

analysis::TruthTable fixture_z_table() {
  return parse_truth_table(fixture_z_json(), TableFormat::Json);
}

analysis::TruthTable fixture_x_table() {
  return parse_truth_table(fixture_x_json(), TableFormat::Json);
}

}  // namespace gatecheck::iofmt
