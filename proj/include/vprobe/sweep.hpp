#pragma once

#include "vprobe/dynamics.hpp"
#include "vprobe/models.hpp"
#include "vprobe/spectra.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vprobe {

enum class SweepAxis { Lambda, OmegaP, N, Eta };

std::string to_string(SweepAxis axis);
// "lambda", "omega_p", "N", "eta". Throws std::invalid_argument.
SweepAxis parse_sweep_axis(std::string_view name);

// Output vocabulary, in CSV column order.
enum class Quantity { ShiftNumeric, ShiftAnalytic, FidelityG, NUp, FidelityF, Energies, Weights, NPhot, Anomalous };

const std::vector<Quantity>& all_quantities();
std::string to_string(Quantity q);
Quantity parse_quantity(std::string_view name);

struct AxisSpec {
  SweepAxis axis = SweepAxis::Lambda;
  std::vector<double> values;
};

struct Numerics {
  int n_max = 16;
  bool validate_truncation = true;
  double truncation_tol = 1e-8;
  double shift_tol = 1e-6;
  int max_n_max = 256;
  Index K = 24;
  double degeneracy_tol = 1e-9;
  SteadyStateMethod method = SteadyStateMethod::Harmonic;
  int harmonics = 1;
  PropagationSettings propagation;
  // ω_p values are offsets from ω_M + analytic shift at each point.
  bool omega_p_relative = false;
  DickeVConvention convention = DickeVConvention::InteractionTerm;
  int levels = 12;  // excitation energies / weights reported per row
};

// One grid point per (series value, axis value). Eta rescales
// γ_c = γ_0 = η γ_M; N also sets the spin factor of the space.
struct SweepSpec {
  std::string name;
  ModelSpec model;
  AncillaSpec ancilla;
  DissipationSpec dissipation;
  DriveSpec drive;
  AxisSpec axis;
  std::optional<AxisSpec> series;
  std::vector<Quantity> outputs;  // empty: defaults for the axis
  int workers = 1;
  Numerics numerics;

  void validate() const;
  std::vector<Quantity> effective_outputs() const;
};

struct SweepRow {
  std::size_t index = 0;
  double series_value = 0.0;
  double axis_value = 0.0;  // absolute ω_p on an omega_p axis
  double lambda = 0.0;
  int N = 1;
  double eta = 0.0;
  double omega_p = 0.0;
  int n_max = 0;
  Index K = 0;

  double shift_numeric = 0.0;
  double shift_analytic = 0.0;
  double fidelity_G = 1.0;
  double n_up = 0.0;
  double fidelity_F = 1.0;
  double n_phot = 0.0;
  double anomalous = 0.0;
  std::vector<double> energies;  // ε_l - ε_G
  std::vector<double> weights;

  bool avoided_crossing = false;
  std::string error;  // non-empty: fatal for this row

  bool fatal() const { return !error.empty(); }
};

struct SeriesTruncation {
  double series_value = 0.0;
  int n_max = 0;
  bool validated = false;
  TruncationReport report;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepRow> rows;
  std::vector<SeriesTruncation> truncation;
  double wall_seconds = 0.0;

  std::size_t fatal_count() const;
};

// Deterministic for any worker count: every grid point is computed
// independently and rows come back in (series, axis) order.
SweepResult run_sweep(const SweepSpec& spec);

// Runs body(i) for i in [0, count) on `workers` threads. Exceptions are
// rethrown after all threads join (the first one by index wins).
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

// Header, then one line per row. Doubles as %.12g; arrays joined with ';'.
void write_csv(std::ostream& out, const SweepResult& result);
std::string csv_string(const SweepResult& result);

// Named parameter sets for the figure reproductions.
const std::map<std::string, SweepSpec>& figure_presets();
// Throws std::invalid_argument listing the known names.
const SweepSpec& find_preset(const std::string& name);

std::vector<double> linspace(double start, double stop, int count);

}  // namespace vprobe
