#include "spde1d/report_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace spde1d {

void ensure_directory(const std::string& dir) {
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open temporary file " + tmp);
    out << content;
    if (!out) throw std::runtime_error("short write to " + tmp);
  }
  std::filesystem::rename(tmp, target);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json mc_report_json(const MCReport& r, std::uint64_t config_hash) {
  return nlohmann::json{{"schema_version", 1},
                        {"statistic", r.statistic},
                        {"M", r.M},
                        {"mean", r.mean},
                        {"stderr", r.stderr_},
                        {"ci95", {r.ci_lo, r.ci_hi}},
                        {"seed", r.master_seed},
                        {"config_hash", config_hash}};
}

std::string path_csv(const PathRecord& rec) {
  std::string out = "time,node,value\n";
  for (size_t s = 0; s < rec.states.size(); ++s) {
    const GridFunction& g = rec.states[s];
    const std::string t = fmt_double(rec.times[s]);
    for (int i = 0; i < g.n; ++i) {
      out += t;
      out += ',';
      out += std::to_string(i);
      out += ',';
      out += fmt_double(g.values[i]);
      out += '\n';
    }
  }
  return out;
}

std::string grid_csv(const GridFunction& v) {
  std::string out = "x,value\n";
  for (int i = 0; i < v.n; ++i) {
    out += fmt_double(v.x(i));
    out += ',';
    out += fmt_double(v.values[i]);
    out += '\n';
  }
  return out;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  atomic_write(path, j.dump(2) + "\n");
}

}  // namespace spde1d
