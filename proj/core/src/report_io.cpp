#include "samp/report_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "samp/errors.hpp"

namespace samp {

namespace {

std::string fmt12(double value) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.12g", value);
  return buf.data();
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::vector<std::string>> split_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        records.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw IoError("unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    records.push_back(std::move(row));
  }
  return records;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double to_double(const std::string& s, const char* column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(std::string("bad numeric value in column ") + column + ": '" + s + "'");
  }
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string format_csv(std::span<const ExperimentReport> reports) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : reports) {
    const std::string tail =
        "," + csv_field(std::string(to_string(r.config.solver))) + "," +
        csv_field(std::string(to_string(r.config.ensemble))) + "," + csv_field(r.config.alpha.str()) +
        "," + fmt12(r.config.prior.rho) + "," + fmt12(r.config.sigma_w2) + "," +
        std::to_string(r.config.K) + "," + std::to_string(r.trials) + "," +
        std::to_string(r.diverged) + "\n";
    for (std::size_t t = 0; t < r.nmsee_db.size(); ++t) {
      out += std::to_string(t) + "," + fmt12(r.nmsee_db[t]) + "," + fmt12(r.ci_low_db[t]) + "," +
             fmt12(r.ci_high_db[t]) + tail;
    }
  }
  return out;
}

std::vector<CsvRow> parse_csv_text(const std::string& text) {
  auto records = split_records(text);
  if (records.empty()) throw IoError("CSV is empty");
  std::string header;
  for (std::size_t i = 0; i < records[0].size(); ++i) {
    header += (i ? "," : "") + records[0][i];
  }
  if (header != kCsvHeader) throw IoError("unexpected CSV header: " + header);
  std::vector<CsvRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    if (f.size() != 12) {
      throw IoError("CSV row " + std::to_string(i) + " has " + std::to_string(f.size()) +
                    " fields, expected 12");
    }
    CsvRow row;
    row.iter = static_cast<int>(to_double(f[0], "iter"));
    row.nmsee_db = to_double(f[1], "nmsee_db");
    row.ci_low_db = to_double(f[2], "ci_low_db");
    row.ci_high_db = to_double(f[3], "ci_high_db");
    row.solver = f[4];
    row.ensemble = f[5];
    row.alpha = f[6];
    row.rho = to_double(f[7], "rho");
    row.sigma_w2 = to_double(f[8], "sigma_w2");
    row.K = static_cast<long>(to_double(f[9], "K"));
    row.trials = static_cast<int>(to_double(f[10], "trials"));
    row.diverged = static_cast<int>(to_double(f[11], "diverged"));
    rows.push_back(std::move(row));
  }
  return rows;
}

void export_csv(std::span<const ExperimentReport> reports, const std::filesystem::path& path) {
  write_text(path, format_csv(reports));
}

void export_csv(const ExperimentReport& report, const std::filesystem::path& path) {
  export_csv(std::span<const ExperimentReport>(&report, 1), path);
}

std::vector<CsvRow> parse_csv(const std::filesystem::path& path) {
  try {
    return parse_csv_text(read_text(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string render_plot(std::span<const ExperimentReport> reports) {
  if (reports.empty()) throw InvalidArgument("plot needs at least one report");
  constexpr double width = 800.0, height = 500.0;
  constexpr double left = 70.0, right = 200.0, top = 30.0, bottom = 50.0;
  constexpr std::array<const char*, 6> palette = {"#1f77b4", "#d62728", "#2ca02c",
                                                  "#ff7f0e", "#9467bd", "#8c564b"};

  std::size_t max_len = 1;
  double y_min = 0.0, y_max = -1e300;
  bool have = false;
  for (const auto& r : reports) {
    max_len = std::max(max_len, r.nmsee_db.size());
    for (std::size_t t = 0; t < r.nmsee_db.size(); ++t) {
      const double lo = std::max(kDbFloor, std::min(r.nmsee_db[t], r.ci_low_db[t]));
      const double hi = std::max(kDbFloor, std::max(r.nmsee_db[t], r.ci_high_db[t]));
      y_min = have ? std::min(y_min, lo) : lo;
      y_max = have ? std::max(y_max, hi) : hi;
      have = true;
    }
  }
  if (!have) {
    y_min = -1.0;
    y_max = 0.0;
  }
  y_min = std::floor(y_min - 1.0);
  y_max = std::ceil(y_max + 1.0);
  const double x_span = std::max<double>(1.0, static_cast<double>(max_len - 1));
  auto px = [&](double t) { return left + (width - left - right) * t / x_span; };
  auto py = [&](double db) {
    db = std::max(kDbFloor, db);
    return top + (height - top - bottom) * (y_max - db) / (y_max - y_min);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right
      << "\" y2=\"" << height - bottom << "\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << height - bottom << "\"/>\n</g>\n";

  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  const int y_ticks = 5;
  for (int i = 0; i <= y_ticks; ++i) {
    const double db = y_min + (y_max - y_min) * i / y_ticks;
    svg << "<text x=\"" << left - 6 << "\" y=\"" << py(db) + 4 << "\" text-anchor=\"end\">"
        << fmt12(std::round(db * 10.0) / 10.0) << "</text>\n";
  }
  const int x_ticks = static_cast<int>(std::min<double>(x_span, 10.0));
  for (int i = 0; i <= x_ticks; ++i) {
    const double t = std::round(x_span * i / std::max(x_ticks, 1));
    svg << "<text x=\"" << px(t) << "\" y=\"" << height - bottom + 16
        << "\" text-anchor=\"middle\">" << t << "</text>\n";
  }
  svg << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\">iteration</text>\n";
  svg << "<text x=\"16\" y=\"" << (top + height - bottom) / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << (top + height - bottom) / 2
      << ")\">nmsee [dB]</text>\n</g>\n";

  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    const char* color = palette[i % palette.size()];
    if (r.nmsee_db.empty()) continue;
    if (r.ci_low_db.size() == r.nmsee_db.size() && r.trials >= 2) {
      svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
      for (std::size_t t = 0; t < r.ci_high_db.size(); ++t) {
        svg << fmt12(px(static_cast<double>(t))) << ',' << fmt12(py(r.ci_high_db[t])) << ' ';
      }
      for (std::size_t t = r.ci_low_db.size(); t-- > 0;) {
        svg << fmt12(px(static_cast<double>(t))) << ',' << fmt12(py(r.ci_low_db[t])) << ' ';
      }
      svg << "\"/>\n";
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t t = 0; t < r.nmsee_db.size(); ++t) {
      svg << fmt12(px(static_cast<double>(t))) << ',' << fmt12(py(r.nmsee_db[t])) << ' ';
    }
    svg << "\"/>\n";
    const double ly = top + 16.0 * static_cast<double>(i) + 8.0;
    svg << "<line x1=\"" << width - right + 10 << "\" y1=\"" << ly << "\" x2=\""
        << width - right + 30 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << width - right + 35 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(r.label())
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void export_plot(std::span<const ExperimentReport> reports, const std::filesystem::path& path) {
  write_text(path, render_plot(reports));
}

std::filesystem::path manifest_path_for(const std::filesystem::path& csv_path) {
  std::filesystem::path out = csv_path;
  out.replace_extension(".manifest.json");
  return out;
}

std::string render_manifest(std::span<const ExperimentReport> reports) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["version"] = std::string(version());
  doc["runs"] = ordered_json::array();
  for (const auto& r : reports) {
    const auto& c = r.config;
    ordered_json run;
    run["solver"] = std::string(to_string(c.solver));
    run["ensemble"] = std::string(to_string(c.ensemble));
    run["alpha"] = c.alpha.str();
    run["K"] = c.K;
    run["N"] = c.rows();
    run["prior"] = c.prior.kind == PriorKind::GaussianUnit ? "gaussian-unit" : "bernoulli-gaussian";
    run["rho"] = c.prior.rho;
    run["sigma_w2"] = c.sigma_w2;
    run["trials"] = c.trials;
    run["master_seed"] = c.seed;
    run["ci_level"] = c.ci_level;
    const auto& s = c.solver_config;
    run["solver_config"] = {{"max_iters", s.max_iters},
                            {"tol", s.tol},
                            {"damping", s.damping},
                            {"damp_site_precisions", s.damp_site_precisions},
                            {"inner_tol", s.inner_tol},
                            {"inner_max", s.inner_max},
                            {"schedule", s.schedule == UpdateSchedule::Parallel ? "parallel"
                                                                                : "sequential"}};
    run["initialization"] = {
        {"mu0", c.solver == SolverId::Ep || c.solver == SolverId::Adatap
                    ? "Sigma0 * theta"
                    : "0"},
        {"z_minus1", "0"},
        {"lambda_bar0", "1 / m2"},
        {"gamma_bar0", "0"},
        {"lambda0", "solves lambda = 1 / (sigma_w2 S(-lambda m2))"}};
    run["diverged"] = r.diverged;
    run["excluded"] = r.excluded;
    ordered_json trials = ordered_json::array();
    for (const auto& t : r.records) {
      trials.push_back({{"trial", t.trial},
                        {"seed", t.seed},
                        {"termination", std::string(to_string(t.reason))},
                        {"iterations", t.iterations},
                        {"message", t.message}});
    }
    run["trial_records"] = std::move(trials);
    doc["runs"].push_back(std::move(run));
  }
  return doc.dump(2) + "\n";
}

void write_manifest(std::span<const ExperimentReport> reports,
                    const std::filesystem::path& csv_path) {
  write_text(manifest_path_for(csv_path), render_manifest(reports));
}

}  // namespace samp
