#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "samp/experiment.hpp"

namespace samp {

struct CsvRow {
  int iter = 0;
  double nmsee_db = 0.0;
  double ci_low_db = 0.0;
  double ci_high_db = 0.0;
  std::string solver;
  std::string ensemble;
  std::string alpha;
  double rho = 0.0;
  double sigma_w2 = 0.0;
  long K = 0;
  int trials = 0;
  int diverged = 0;
};

inline constexpr const char* kCsvHeader =
    "iter,nmsee_db,ci_low_db,ci_high_db,solver,ensemble,alpha,rho,sigma_w2,K,trials,diverged";

std::string format_csv(std::span<const ExperimentReport> reports);
std::vector<CsvRow> parse_csv_text(const std::string& text);

void export_csv(std::span<const ExperimentReport> reports, const std::filesystem::path& path);
void export_csv(const ExperimentReport& report, const std::filesystem::path& path);
std::vector<CsvRow> parse_csv(const std::filesystem::path& path);

std::string render_plot(std::span<const ExperimentReport> reports);
void export_plot(std::span<const ExperimentReport> reports, const std::filesystem::path& path);

// <csv stem>.manifest.json next to the CSV.
std::filesystem::path manifest_path_for(const std::filesystem::path& csv_path);
std::string render_manifest(std::span<const ExperimentReport> reports);
void write_manifest(std::span<const ExperimentReport> reports,
                    const std::filesystem::path& csv_path);

}  // namespace samp
