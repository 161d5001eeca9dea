#pragma once

#include <string>
#include <string_view>

#include "gatecheck/analysis.hpp"
#include "gatecheck/channel.hpp"

namespace gatecheck::iofmt {

enum class TableFormat { Json, Csv };
enum class ReportFormat { Json, Markdown };

/// Guesses the table format from a file name (".csv" -> Csv) or, failing
/// that, from the content (leading '{' -> Json).
TableFormat sniff_table_format(std::string_view filename, std::string_view content);

/// Parses a truth table. Entries may be probabilities or integer counts;
/// counts are detected when every entry is integral. Rows are normalized to
/// unit sum in both cases (published probability tables carry rounded
/// entries), and a probability row whose raw sum strays from 1 by more than
/// 0.05 is rejected as malformed.
analysis::TruthTable parse_truth_table(std::string_view bytes, TableFormat format);

std::string emit_truth_table(const analysis::TruthTable& table, TableFormat format);
std::string emit_count_table(const analysis::CountTable& table, TableFormat format);

channel::NoisyGateModel parse_model(std::string_view bytes);
std::string emit_model(const channel::NoisyGateModel& model);

std::string emit_report(const analysis::FidelityReport& report, ReportFormat format);

/// Bundled measurement data for a linear-optics controlled-NOT device: the
/// Z-basis and complementary X-basis truth tables, as shipped (raw published
/// probabilities) and as parsed.
std::string fixture_z_json();
std::string fixture_x_json();
analysis::TruthTable fixture_z_table();
analysis::TruthTable fixture_x_table();

}  // namespace gatecheck::iofmt
