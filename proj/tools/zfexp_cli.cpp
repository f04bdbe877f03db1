// zfexp command line: verification runs and coefficient conversions.

#include "zfexp/zfexp.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

enum ExitCode { kOk = 0, kChecksFailed = 1, kInputError = 2, kResourceError = 3 };

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw zfexp::InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_verify(const std::string& config_path, const std::string& report_path, bool as_json) {
  const zfexp::RunConfig cfg = zfexp::parse_config(slurp(config_path));
  const zfexp::Report report = zfexp::run_suites(cfg);

  std::ostringstream body;
  if (as_json)
    body << zfexp::report_to_json(report).dump(2) << '\n';
  else
    zfexp::write_csv(body, report);
  if (report_path.empty() || report_path == "-") {
    std::cout << body.str();
  } else {
    std::ofstream out(report_path);
    if (!out) throw zfexp::InputError("cannot write " + report_path);
    out << body.str();
  }
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  std::cerr << report.count(zfexp::CheckStatus::Pass) << " passed, " << report.count(zfexp::CheckStatus::Fail)
            << " failed, " << report.count(zfexp::CheckStatus::Skip) << " skipped\n";
  return report.passed() ? kOk : kChecksFailed;
}

int run_expand(const std::string& in, const std::string& out) {
  const auto [spec, a] = zfexp::form_from_json(zfexp::read_json_file(in));
  const zfexp::FockSpace space = spec.space();
  zfexp::write_coefficients(out, spec, zfexp::expand(space, a));
  return kOk;
}

int run_reconstruct(const std::string& in, const std::string& out) {
  const auto [spec, fam] = zfexp::read_coefficients(in);
  const zfexp::FockSpace space = spec.space();
  zfexp::write_json_file(out, zfexp::form_to_json(spec, zfexp::reconstruct(space, fam)));
  return kOk;
}

int run_warp(double a, const std::string& in, const std::string& out) {
  const auto [spec, form] = zfexp::form_from_json(zfexp::read_json_file(in));
  const zfexp::SkewSymmetricQ q(a, spec.grid.mass());
  zfexp::write_json_file(out, zfexp::form_to_json(spec, zfexp::warp(form, q, spec.grid)));
  return kOk;
}

int run_qcomm(double a, const std::string& lhs, const std::string& rhs, const std::string& out) {
  const auto [spec, x] = zfexp::form_from_json(zfexp::read_json_file(lhs));
  const auto [spec_r, y] = zfexp::form_from_json(zfexp::read_json_file(rhs));
  if (!(spec.grid == spec_r.grid) || spec.truncation != spec_r.truncation)
    throw zfexp::InputError("qcomm operands live on different spaces");
  const zfexp::SkewSymmetricQ q(a, spec.grid.mass());
  const auto result = zfexp::q_commutator(x, y, q, spec.grid);
  if (result.overflow)
    std::cerr << "warning: a product reaches past the truncation; the highest sectors are incomplete\n";
  const zfexp::json doc = zfexp::form_to_json(spec, result.value);
  if (out.empty())
    std::cout << doc.dump(2) << '\n';
  else
    zfexp::write_json_file(out, doc);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expansion coefficients of quadratic forms over Zamolodchikov-Faddeev operators"};
  app.require_subcommand(1);

  std::string config, report, in, out, lhs, rhs;
  bool as_json = false;
  double a = 0.0;

  auto* verify = app.add_subcommand("verify", "Run the property suites and write a report");
  verify->add_option("--config", config, "Run configuration (JSON)")->required();
  verify->add_option("--report", report, "Report path; stdout when omitted");
  verify->add_flag("--json", as_json, "Write the report as JSON instead of CSV");

  auto* expand = app.add_subcommand("expand", "Extract all f_mn of a form into a coefficient directory");
  expand->add_option("--in", in, "Form (JSON)")->required();
  expand->add_option("--out", out, "Output directory")->required();

  auto* recon = app.add_subcommand("reconstruct", "Sum a coefficient directory back into a form");
  recon->add_option("--in", in, "Coefficient directory")->required();
  recon->add_option("--out", out, "Form (JSON)")->required();

  auto* warp = app.add_subcommand("warp", "Apply the warped convolution with deformation parameter a");
  warp->add_option("--a", a, "Deformation parameter")->required();
  warp->add_option("--in", in, "Form (JSON)")->required();
  warp->add_option("--out", out, "Form (JSON)")->required();

  auto* qcomm = app.add_subcommand("qcomm", "Q-commutator of two forms");
  qcomm->add_option("--a", a, "Deformation parameter")->required();
  qcomm->add_option("--lhs", lhs, "Form (JSON)")->required();
  qcomm->add_option("--rhs", rhs, "Form (JSON)")->required();
  qcomm->add_option("--out", out, "Form (JSON); stdout when omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*verify) return run_verify(config, report, as_json);
    if (*expand) return run_expand(in, out);
    if (*recon) return run_reconstruct(in, out);
    if (*warp) return run_warp(a, in, out);
    if (*qcomm) return run_qcomm(a, lhs, rhs, out);
  } catch (const zfexp::ResourceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kResourceError;
  } catch (const zfexp::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kOk;
}
