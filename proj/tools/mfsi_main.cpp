#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfsi/errors.hpp"
#include "mfsi/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Time-periodic multilayered fluid-structure interaction solver"};
  app.set_version_flag("--version", std::string(mfsi::version_string()));

  std::string mode, config_path, out_dir;
  std::vector<std::string> sets;
  int workers = -1;
  app.add_option("mode", mode, "solve | spectrum | resolvent | mms-verify | decouple-check")
      ->required()
      ->check(CLI::IsMember(mfsi::known_modes()));
  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--set", sets, "override a key, e.g. --set physics.delta=0.25")->take_all();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--workers", workers, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  CLI11_PARSE(app, argc, argv);

  sets.push_back("mode=\"" + mode + "\"");
  if (!out_dir.empty()) sets.push_back("out_dir=" + nlohmann::json(out_dir).dump());
  if (workers >= 0) sets.push_back("workers=" + std::to_string(workers));

  mfsi::Config cfg;
  try {
    cfg = mfsi::load_config(config_path, sets);
  } catch (const mfsi::ConfigError& e) {
    std::cerr << "error [" << e.reason() << "]:";
    for (const auto& v : e.violations()) std::cerr << "\n  - " << v;
    std::cerr << "\n";
    return mfsi::exit_code(e.kind());
  }
  auto result = mfsi::run(cfg, std::cerr);
  std::cout << result.report.value("status", "error");
  if (result.report.contains("reason")) std::cout << " " << result.report["reason"].get<std::string>();
  std::cout << "\n";
  return result.exit_code;
}
