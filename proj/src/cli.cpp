#include "gatecheck/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "gatecheck/analysis.hpp"
#include "gatecheck/channel.hpp"
#include "gatecheck/gatelib.hpp"
#include "gatecheck/iofmt.hpp"

namespace gatecheck::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open \"" + path + "\" for reading");
  std::ostringstream content;
  content << in.rdbuf();
  if (in.bad()) throw IoError("failed reading \"" + path + "\"");
  return content.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open \"" + path + "\" for writing");
  out << content;
  if (!out) throw IoError("failed writing \"" + path + "\"");
}

analysis::TruthTable load_table(const std::string& path) {
  const std::string bytes = read_file(path);
  return iofmt::parse_truth_table(bytes, iofmt::sniff_table_format(path, bytes));
}

channel::NoisyGateModel load_model(const std::string& path) {
  return iofmt::parse_model(read_file(path));
}

std::string fixed3(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << v;
  return s.str();
}

struct AnalyzeOptions {
  std::string z_path;
  std::string x_path;
  double b = 0.5;
  std::string out_path;
  bool markdown = false;
};

int run_analyze(const AnalyzeOptions& opt, std::ostream& out) {
  const analysis::TruthTable z_table = load_table(opt.z_path);
  const analysis::TruthTable x_table = load_table(opt.x_path);
  const analysis::FidelityReport report = analysis::full_report(z_table, x_table, opt.b);

  out << "F_Z = " << fixed3(report.f_z) << ", F_X = " << fixed3(report.f_x) << "\n";
  out << "F_qp in [" << fixed3(report.f_qp_lo) << ", " << fixed3(report.f_qp_hi)
      << "]\n";
  out << "C >= " << fixed3(report.c_coarse) << ", D >= " << fixed3(report.d_coarse)
      << "\n";
  out << "refined: F_I >= " << fixed3(report.f_i_min) << ", F_C >= "
      << fixed3(report.f_c_min) << ", F_D >= " << fixed3(report.f_d_min) << "\n";
  out << "refined: C >= " << fixed3(report.c_refined) << ", D >= "
      << fixed3(report.d_refined) << "\n";

  const std::string body = iofmt::emit_report(
      report, opt.markdown ? iofmt::ReportFormat::Markdown : iofmt::ReportFormat::Json);
  if (opt.out_path.empty()) {
    out << "\n" << body;
  } else {
    write_file(opt.out_path, body);
  }
  return kExitOk;
}

struct SimulateOptions {
  std::string model_path;
  std::string basis = "z";
  std::int64_t shots = 0;
  std::uint64_t seed = 12345;
  std::string out_path;
  std::string format = "json";
};

int run_simulate(const SimulateOptions& opt, std::ostream& out) {
  const channel::NoisyGateModel model = load_model(opt.model_path);
  const gatelib::BasisFamily family =
      gatelib::basis_family(gatelib::basis_from_name(opt.basis));
  const analysis::TruthTable table = channel::truth_table(model, family);
  const iofmt::TableFormat format =
      opt.format == "csv" ? iofmt::TableFormat::Csv : iofmt::TableFormat::Json;

  std::string body;
  if (opt.shots > 0) {
    body = iofmt::emit_count_table(channel::sample_counts(table, opt.shots, opt.seed),
                                   format);
  } else {
    body = iofmt::emit_truth_table(table, format);
  }
  if (opt.out_path.empty()) {
    out << body;
  } else {
    write_file(opt.out_path, body);
  }
  return kExitOk;
}

struct VerifyOptions {
  std::string model_path;
  std::int64_t mc_samples = 100000;
  std::uint64_t seed = 12345;
};

int run_verify(const VerifyOptions& opt, std::ostream& out) {
  const channel::NoisyGateModel model = load_model(opt.model_path);
  constexpr double kAlgebraicTol = 1e-9;

  const channel::IdentityResiduals residuals = channel::verify_identities(model);
  const double chi00 = channel::process_matrix(model).process_fidelity();
  const channel::McEstimate mc =
      channel::average_fidelity_mc(model, opt.mc_samples, opt.seed);
  const double d = static_cast<double>(model.dim());
  const double expected_mean = (chi00 * d + 1.0) / (d + 1.0);
  const double mc_tol = 3.0 * mc.std_error + kAlgebraicTol;
  const double mc_residual = std::abs(mc.mean - expected_mean);

  bool ok = true;
  const auto line = [&](const char* name, double value, double tol) {
    const bool pass = value <= tol;
    ok = ok && pass;
    out << (pass ? "ok  " : "FAIL") << "  " << name << " residual = "
        << std::scientific << std::setprecision(3) << value << " (tolerance "
        << tol << ")\n";
    out << std::defaultfloat;
  };
  line("F_Z diagonal sum", residuals.f_z_vs_diagonal, kAlgebraicTol);
  line("F_X diagonal sum", residuals.f_x_vs_diagonal, kAlgebraicTol);
  line("diagonal sum rule", residuals.diagonal_sum_rule, kAlgebraicTol);
  line("fidelity reconstruction", residuals.fidelity_reconstruction, kAlgebraicTol);
  line("choi vs chi_00", residuals.choi_vs_chi00, kAlgebraicTol);
  line("average fidelity (monte carlo)", mc_residual, mc_tol);
  out << "chi_00 = " << std::setprecision(12) << chi00 << ", mc mean = " << mc.mean
      << " +- " << mc.std_error << " over " << mc.samples << " samples\n";
  return ok ? kExitOk : kExitValidation;
}

int run_fixture(const std::string& dir, std::ostream& out) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory \"" + dir + "\"");
  const fs::path z_path = fs::path(dir) / "fixture_z.json";
  const fs::path x_path = fs::path(dir) / "fixture_x.json";
  write_file(z_path.string(), iofmt::fixture_z_json());
  write_file(x_path.string(), iofmt::fixture_x_json());
  out << "wrote " << z_path.string() << "\n";
  out << "wrote " << x_path.string() << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Characterizes a controlled-NOT gate from complementary truth tables"};
  app.name("gatecheck");
  app.require_subcommand(1);

  AnalyzeOptions analyze_opt;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "Derive fidelity bounds from a Z-basis and an X-basis truth table");
  analyze->add_option("--z-table", analyze_opt.z_path, "Z-basis truth table file")
      ->required();
  analyze->add_option("--x-table", analyze_opt.x_path, "X-basis truth table file")
      ->required();
  analyze->add_option("--b", analyze_opt.b,
                      "Separable-state fidelity ceiling of the witness");
  analyze->add_option("--out", analyze_opt.out_path, "Write the report to this file");
  analyze->add_flag("--markdown", analyze_opt.markdown,
                    "Emit the report as markdown instead of JSON");

  SimulateOptions simulate_opt;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Produce the truth table of a noisy gate model");
  simulate->add_option("--model", simulate_opt.model_path, "Gate model file")
      ->required();
  simulate->add_option("--basis", simulate_opt.basis, "Input basis")
      ->check(CLI::IsMember({"z", "x", "zx", "xz", "bell"}))
      ->required();
  simulate->add_option("--shots", simulate_opt.shots,
                       "Sample multinomial counts per row instead of exact probabilities");
  simulate->add_option("--seed", simulate_opt.seed, "Sampling seed");
  simulate->add_option("--out", simulate_opt.out_path, "Write the table to this file");
  simulate->add_option("--format", simulate_opt.format, "Table format")
      ->check(CLI::IsMember({"json", "csv"}));

  VerifyOptions verify_opt;
  CLI::App* verify = app.add_subcommand(
      "verify", "Check the algebraic identities of a gate model");
  verify->add_option("--model", verify_opt.model_path, "Gate model file")->required();
  verify->add_option("--mc-samples", verify_opt.mc_samples,
                     "Monte-Carlo samples for the average-fidelity check");
  verify->add_option("--seed", verify_opt.seed, "Monte-Carlo seed");

  std::string fixture_dir = ".";
  CLI::App* fixture = app.add_subcommand(
      "fixture", "Write the bundled example truth tables");
  fixture->add_option("--dir", fixture_dir, "Output directory");

  try {
    // CLI11's vector overload consumes arguments from the back.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (analyze->parsed()) return run_analyze(analyze_opt, out);
    if (simulate->parsed()) return run_simulate(simulate_opt, out);
    if (verify->parsed()) return run_verify(verify_opt, out);
    if (fixture->parsed()) return run_fixture(fixture_dir, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  err << "error: no subcommand given\n";
  return kExitValidation;
}

}  // namespace gatecheck::cli
