#pragma once

#include <string>
#include <vector>

namespace bridgekit {

enum class PlotKind { LossCurve, RateCurve, PmfBar, TrajectoryBundle };

// Writes <kind>.csv plus a <kind>.gp gnuplot script that references only the
// CSV. Rows must match the kind's column schema:
//   loss_curve:        (epoch, loss)
//   rate_curve:        (n, eps, seed, kl, kl_smoothed)
//   pmf_bar:           (atom, probability)
//   trajectory_bundle: (path_id, t, z)
void emit_plot_data(const std::vector<std::vector<double>>& rows, PlotKind kind,
                    const std::string& out_dir);

}  // namespace bridgekit
