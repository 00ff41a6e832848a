#include "gatenet/report.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "gatenet/netlist_io.hpp"

namespace gatenet {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cols;
  std::stringstream ss(line);
  std::string col;
  while (std::getline(ss, col, ',')) cols.push_back(col);
  if (!line.empty() && line.back() == ',') cols.push_back("");
  return cols;
}

constexpr const char* kHeader =
    "experiment,model,precision,recall,f1,tp,fp,fn,tn";

}  // namespace

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out = std::string(kHeader) + "\n";
  char buf[160];
  for (const MetricsRow& r : rows) {
    snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f,%lld,%lld,%lld,%lld\n",
             r.report.precision, r.report.recall, r.report.f1,
             (long long)r.report.tp, (long long)r.report.fp,
             (long long)r.report.fn, (long long)r.report.tn);
    out += r.experiment;
    out += ',';
    out += r.model;
    out += buf;
  }
  return out;
}

std::vector<MetricsRow> parse_metrics_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line) || line != kHeader)
    throw IoError("metrics csv: bad header");
  std::vector<MetricsRow> rows;
  size_t lineno = 1;
  while (std::getline(ss, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cols = split_csv(line);
    if (cols.size() != 9)
      throw IoError("metrics csv line " + std::to_string(lineno) +
                    ": wrong column count");
    MetricsRow r;
    try {
      r.experiment = cols[0];
      r.model = cols[1];
      r.report.precision = std::stod(cols[2]);
      r.report.recall = std::stod(cols[3]);
      r.report.f1 = std::stod(cols[4]);
      r.report.tp = std::stoll(cols[5]);
      r.report.fp = std::stoll(cols[6]);
      r.report.fn = std::stoll(cols[7]);
      r.report.tn = std::stoll(cols[8]);
    } catch (const std::exception&) {
      throw IoError("metrics csv line " + std::to_string(lineno) +
                    ": bad value");
    }
    r.report.tag = r.experiment + "/" + r.model;
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<MetricsRow>& rows) {
  write_file_atomic(path, metrics_csv(rows));
}

std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  try {
    return parse_metrics_csv(text);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string report_text(const std::vector<MetricsRow>& rows) {
  std::map<std::string, double> gatenet_f1;
  for (const MetricsRow& r : rows)
    if (r.model == "gatenet") gatenet_f1[r.experiment] = r.report.f1;

  std::vector<std::vector<std::string>> cells;
  cells.push_back(
      {"Expt. Type", "Model", "Precision", "Recall", "F1", "vs gatenet"});
  char buf[64];
  for (const MetricsRow& r : rows) {
    std::vector<std::string> row{r.experiment, r.model};
    snprintf(buf, sizeof buf, "%.4f", r.report.precision);
    row.push_back(buf);
    snprintf(buf, sizeof buf, "%.4f", r.report.recall);
    row.push_back(buf);
    snprintf(buf, sizeof buf, "%.4f", r.report.f1);
    row.push_back(buf);
    auto it = gatenet_f1.find(r.experiment);
    if (r.model == "gatenet" || it == gatenet_f1.end() || r.report.f1 == 0.0) {
      row.push_back("-");
    } else {
      double rel = (it->second - r.report.f1) / r.report.f1 * 100.0;
      snprintf(buf, sizeof buf, "%+.2f%%", rel);
      row.push_back(buf);
    }
    cells.push_back(std::move(row));
  }

  std::vector<size_t> widths(cells[0].size(), 0);
  for (const auto& row : cells)
    for (size_t c = 0; c < row.size(); ++c)
      widths[c] = std::max(widths[c], row[c].size());

  std::string out;
  for (size_t r = 0; r < cells.size(); ++r) {
    for (size_t c = 0; c < cells[r].size(); ++c) {
      if (c) out += " | ";
      out += cells[r][c];
      out.append(widths[c] - cells[r][c].size(), ' ');
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
    if (r == 0) {
      for (size_t c = 0; c < widths.size(); ++c) {
        if (c) out += "-+-";
        out.append(widths[c], '-');
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace gatenet
