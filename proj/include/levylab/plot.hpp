#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "levylab/harness.hpp"

namespace levylab {

enum class PlotKind { cov_decay, tau_scan, sup_tail };

std::optional<PlotKind> plot_kind_from_name(std::string_view name);

/// Parses a results CSV produced by write_results. Throws std::runtime_error
/// naming the first malformed row. The experiment column of the first data
/// row, if any, is returned through `experiment` when non-null.
std::vector<ResultRow> parse_results_csv(std::string_view text,
                                         std::string* experiment = nullptr);

/// Self-contained SVG for one result table. Byte-stable for fixed input.
/// cov-decay: |value| against n on a log axis with error bars;
/// tau-scan:  P(tau < 1) against N, one curve per (r, C);
/// sup-tail:  analytic tail curve with Monte Carlo points.
std::string render_plot_svg(const std::vector<ResultRow>& rows,
                            std::optional<PlotKind> kind);

/// Reads `csv`, infers the plot kind from the experiment column when `kind`
/// is empty, and writes the SVG to `out`.
void emit_plot(const std::filesystem::path& csv,
               std::optional<PlotKind> kind,
               const std::filesystem::path& out);

}  // namespace levylab
