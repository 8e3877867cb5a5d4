#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dac/io.hpp"

namespace {

int exit_code(const dac::RunReport& r) {
  if (r.status == "solved") return 0;
  if (r.status == "timeout") return 3;
  return 2;
}

dac::Task load(const std::string& path, dac::Domain domain, std::size_t train_n) {
  return domain == dac::Domain::grid ? dac::load_arc_task(path) : dac::load_string_task(path, train_n);
}

void print(const dac::RunReport& r) {
  std::cout << r.task_id << ": " << r.status;
  if (r.solved) std::cout << " [" << r.decomposition << "] test " << r.test_correct << "/" << r.test_total;
  std::cout << " candidates=" << r.candidates_explored << " loops=" << r.synthesis_loops << "\n";
  if (r.solved) std::cout << r.solution;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"divide, align and conquer program synthesizer"};
  std::string task_path, dir, report_path, domain_name = "arc", ablation = "none";
  dac::Config cfg;
  std::size_t train_n = 3;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--task", task_path, "task file");
  app.add_option("--dir", dir, "solve every .json task in a directory");
  app.add_option("--domain", domain_name, "arc or strings")->check(CLI::IsMember({"arc", "strings"}));
  app.add_option("--depth", cfg.depth, "maximum program length")->check(CLI::PositiveNumber);
  app.add_option("--timeout", cfg.timeout, "seconds per task")->check(CLI::PositiveNumber);
  app.add_option("--ablation", ablation, "none, no-align or no-divide")
      ->check(CLI::IsMember({"none", "no-align", "no-divide"}));
  app.add_option("--train-n", train_n, "training pairs for string tasks")->check(CLI::PositiveNumber);
  app.add_option("--report", report_path, "write the run report as JSON");
  app.add_flag("--exhaustive", cfg.exhaustive, "keep searching for a smaller program");
  app.add_option("--seed", cfg.seed, "seed for the no-align ranking");
  app.add_option("--jobs", jobs, "worker threads for --dir")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
    if (task_path.empty() == dir.empty()) throw CLI::ValidationError("exactly one of --task or --dir is required");
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << e.what() << "\n" << app.help();
    return 1;
  }
  cfg.domain = domain_name == "arc" ? dac::Domain::grid : dac::Domain::string;
  cfg.ablation = dac::parse_ablation(ablation);

  if (!task_path.empty()) {
    dac::RunReport r;
    try {
      r = dac::run_task(load(task_path, cfg.domain, train_n), cfg);
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return 1;
    }
    print(r);
    if (!report_path.empty()) std::ofstream(report_path) << dac::to_json(r).dump(2) << "\n";
    return exit_code(r);
  }

  std::vector<std::string> paths;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".json") paths.push_back(e.path().string());
  std::sort(paths.begin(), paths.end());
  std::vector<dac::RunReport> reports(paths.size());
  std::atomic<std::size_t> next{0};
  std::mutex out_mu;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < paths.size();) {
      try {
        reports[i] = dac::run_task(load(paths[i], cfg.domain, train_n), cfg);
      } catch (const std::exception& e) {
        reports[i].task_id = paths[i];
        reports[i].status = "error";
        std::lock_guard<std::mutex> lock(out_mu);
        std::cerr << paths[i] << ": " << e.what() << "\n";
      }
      std::lock_guard<std::mutex> lock(out_mu);
      print(reports[i]);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(jobs, paths.size()); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::size_t solved = 0, correct = 0;
  std::uint64_t candidates = 0;
  double time = 0;
  nlohmann::json all = nlohmann::json::array();
  for (const auto& r : reports) {
    solved += r.solved;
    correct += r.solved && r.test_total > 0 && r.test_correct == r.test_total;
    candidates += r.candidates_explored;
    time += r.wall_time;
    all.push_back(dac::to_json(r));
  }
  const double n = std::max<std::size_t>(1, reports.size());
  std::cout << "solved " << solved << "/" << reports.size() << ", test-exact " << correct << ", mean candidates "
            << candidates / n << ", mean time " << time / n << " s\n";
  if (!report_path.empty()) std::ofstream(report_path) << all.dump(2) << "\n";
  return solved == reports.size() ? 0 : 2;
}
