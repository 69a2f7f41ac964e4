#include "bridgekit/plot.hpp"

#include <fstream>
#include <stdexcept>

#include "bridgekit/csv.hpp"

namespace bridgekit {
namespace {

struct PlotSchema {
  std::string name;
  std::vector<std::string> columns;
  std::string script;
};

PlotSchema schema_for(PlotKind kind) {
  switch (kind) {
    case PlotKind::LossCurve:
      return {"loss_curve",
              {"epoch", "loss"},
              "set datafile separator ','\n"
              "set key autotitle columnhead\n"
              "set xlabel 'epoch'\nset ylabel 'loss'\n"
              "plot 'loss_curve.csv' using 1:2 with lines\n"};
    case PlotKind::RateCurve:
      return {"rate_curve",
              {"n", "eps", "seed", "kl", "kl_smoothed"},
              "set datafile separator ','\n"
              "set key autotitle columnhead\n"
              "set logscale xy\n"
              "set xlabel 'n'\nset ylabel 'KL'\n"
              "plot 'rate_curve.csv' using 1:5 with points\n"};
    case PlotKind::PmfBar:
      return {"pmf_bar",
              {"atom", "probability"},
              "set datafile separator ','\n"
              "set key autotitle columnhead\n"
              "set style fill solid\n"
              "set xlabel 'atom'\nset ylabel 'probability'\n"
              "plot 'pmf_bar.csv' using 1:2 with boxes\n"};
    case PlotKind::TrajectoryBundle:
      return {"trajectory_bundle",
              {"path_id", "t", "z"},
              "set datafile separator ','\n"
              "set key autotitle columnhead\n"
              "set xlabel 't'\nset ylabel 'z'\n"
              "plot 'trajectory_bundle.csv' using 2:3:1 with lines lc variable\n"};
  }
  throw std::logic_error("emit_plot_data: bad kind");
}

}  // namespace

void emit_plot_data(const std::vector<std::vector<double>>& rows, PlotKind kind,
                    const std::string& out_dir) {
  const PlotSchema schema = schema_for(kind);
  for (const auto& row : rows) {
    if (row.size() != schema.columns.size())
      throw std::invalid_argument("emit_plot_data: row width does not match " +
                                  schema.name + " schema");
  }
  CsvWriter csv(out_dir + "/" + schema.name + ".csv", schema.columns);
  for (const auto& row : rows) {
    for (double v : row) csv.cell(v);
    csv.end_row();
  }
  csv.close();
  std::ofstream gp(out_dir + "/" + schema.name + ".gp");
  if (!gp) throw std::runtime_error("cannot write plot script in " + out_dir);
  gp << schema.script;
}

}  // namespace bridgekit
