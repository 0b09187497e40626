#include "gamecat/reports.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <string>

#include "csv_reader.hpp"
#include "gamecat/error.hpp"

namespace gamecat {
namespace {

std::string num(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  writer(out);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

void write_grid_csv(std::ostream& out, const GridReport& grid) {
  out << "gamma,nu,status,mean_accuracy,std_accuracy,ci95_lower,mean_support_vectors,is_best\n";
  for (std::size_t i = 0; i < grid.rows.size(); ++i) {
    const auto& r = grid.rows[i];
    out << num(r.gamma) << ',' << num(r.nu) << ',' << to_string(r.status) << ','
        << num(r.mean_accuracy) << ',' << num(r.std_accuracy) << ',' << num(r.ci95_lower) << ','
        << num(r.mean_support_vectors) << ',' << (grid.best == i ? "true" : "false") << '\n';
  }
}

void write_sv_vs_accuracy_csv(std::ostream& out, const GridReport& grid) {
  out << "gamma,nu,mean_support_vectors,mean_accuracy\n";
  for (const auto& r : grid.rows) {
    if (r.status != RunStatus::ok) continue;
    out << num(r.gamma) << ',' << num(r.nu) << ',' << num(r.mean_support_vectors) << ','
        << num(r.mean_accuracy) << '\n';
  }
}

void write_singular_values_csv(std::ostream& out, const SvdFactors& factors) {
  out << "index,value\n";
  for (const auto& [index, value] : singular_value_report(factors)) {
    out << index << ',' << num(value) << '\n';
  }
}

void write_latent_scatter_csv(std::ostream& out, std::span<const ScatterPoint> points) {
  out << "id,axis1,axis2,label,split,correct\n";
  for (const auto& p : points) {
    out << detail::csv_escape(p.id) << ',' << num(p.axis1) << ',' << num(p.axis2) << ','
        << detail::csv_escape(p.label) << ',' << p.split << ','
        << (p.correct ? "true" : "false") << '\n';
  }
}

void emit_reports(const GridReport& grid, const SvdFactors& factors,
                  std::span<const ScatterPoint> scatter, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());
  write_file(out_dir / "grid.csv", [&](std::ostream& o) { write_grid_csv(o, grid); });
  write_file(out_dir / "sv_vs_accuracy.csv",
             [&](std::ostream& o) { write_sv_vs_accuracy_csv(o, grid); });
  write_file(out_dir / "singular_values.csv",
             [&](std::ostream& o) { write_singular_values_csv(o, factors); });
  write_file(out_dir / "latent_scatter.csv",
             [&](std::ostream& o) { write_latent_scatter_csv(o, scatter); });
}

}  // namespace gamecat
