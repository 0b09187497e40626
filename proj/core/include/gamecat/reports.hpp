#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>

#include "gamecat/evaluation.hpp"
#include "gamecat/lsi.hpp"

namespace gamecat {

void write_grid_csv(std::ostream& out, const GridReport& grid);
// gamma,nu,mean_support_vectors,mean_accuracy for ok rows.
void write_sv_vs_accuracy_csv(std::ostream& out, const GridReport& grid);
void write_singular_values_csv(std::ostream& out, const SvdFactors& factors);
void write_latent_scatter_csv(std::ostream& out, std::span<const ScatterPoint> points);

// Writes grid.csv, sv_vs_accuracy.csv, singular_values.csv and
// latent_scatter.csv into out_dir (created if missing). Throws IoError.
void emit_reports(const GridReport& grid, const SvdFactors& factors,
                  std::span<const ScatterPoint> scatter, const std::filesystem::path& out_dir);

}  // namespace gamecat
