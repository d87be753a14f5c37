#include "vprobe/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

extern "C" void openblas_set_num_threads(int);

namespace vprobe {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_dynamic(Quantity q) { return q == Quantity::NUp || q == Quantity::FidelityF; }

}  // namespace

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Lambda: return "lambda";
    case SweepAxis::OmegaP: return "omega_p";
    case SweepAxis::N: return "N";
    case SweepAxis::Eta: return "eta";
  }
  return "?";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  const std::string s = lower(name);
  if (s == "lambda" || s == "lambda_grid") return SweepAxis::Lambda;
  if (s == "omega_p" || s == "omega_p_grid") return SweepAxis::OmegaP;
  if (s == "n" || s == "n_list") return SweepAxis::N;
  if (s == "eta" || s == "eta_list") return SweepAxis::Eta;
  throw std::invalid_argument("unknown sweep axis '" + std::string(name) + "' (expected lambda, omega_p, N, eta)");
}

const std::vector<Quantity>& all_quantities() {
  static const std::vector<Quantity> q = {Quantity::ShiftNumeric, Quantity::ShiftAnalytic, Quantity::FidelityG,
                                          Quantity::NUp,          Quantity::FidelityF,     Quantity::Energies,
                                          Quantity::Weights,      Quantity::NPhot,         Quantity::Anomalous};
  return q;
}

std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::ShiftNumeric: return "shift_numeric";
    case Quantity::ShiftAnalytic: return "shift_analytic";
    case Quantity::FidelityG: return "fidelity_G";
    case Quantity::NUp: return "n_up";
    case Quantity::FidelityF: return "fidelity_F";
    case Quantity::Energies: return "energies";
    case Quantity::Weights: return "weights";
    case Quantity::NPhot: return "n_phot";
    case Quantity::Anomalous: return "anomalous";
  }
  return "?";
}

Quantity parse_quantity(std::string_view name) {
  for (Quantity q : all_quantities()) {
    if (to_string(q) == name) return q;
  }
  std::string known;
  for (Quantity q : all_quantities()) known += (known.empty() ? "" : ", ") + to_string(q);
  throw std::invalid_argument("unknown output quantity '" + std::string(name) + "' (known: " + known + ")");
}

std::vector<double> linspace(double start, double stop, int count) {
  if (count < 1) throw std::invalid_argument("linspace: count must be >= 1");
  std::vector<double> v(count);
  if (count == 1) {
    v[0] = start;
    return v;
  }
  for (int i = 0; i < count; ++i) v[i] = start + (stop - start) * i / (count - 1);
  v.back() = stop;
  return v;
}

namespace {

void validate_axis(const AxisSpec& a, const char* what) {
  const std::string name = std::string(what) + " " + to_string(a.axis);
  if (a.values.empty()) throw std::invalid_argument(name + ": empty value list");
  for (double v : a.values) {
    if (!std::isfinite(v)) throw std::invalid_argument(name + ": non-finite value");
  }
  if (a.values.size() > 1) {
    const bool up = a.values[1] > a.values[0];
    for (std::size_t i = 1; i < a.values.size(); ++i) {
      const bool ok = up ? a.values[i] > a.values[i - 1] : a.values[i] < a.values[i - 1];
      if (!ok) throw std::invalid_argument(name + ": values must be strictly monotone");
    }
  }
  for (double v : a.values) {
    switch (a.axis) {
      case SweepAxis::Lambda:
        if (v < 0.0) throw std::invalid_argument(name + ": lambda must be >= 0");
        break;
      case SweepAxis::N:
        if (v < 1.0 || v != std::floor(v)) throw std::invalid_argument(name + ": N must be a positive integer");
        break;
      case SweepAxis::Eta:
        if (v < 0.0) throw std::invalid_argument(name + ": eta must be >= 0");
        break;
      case SweepAxis::OmegaP:
        break;
    }
  }
}

}  // namespace

void SweepSpec::validate() const {
  model.validate();
  ancilla.validate();
  dissipation.validate();
  if (!(drive.Omega_p >= 0.0)) throw std::invalid_argument("drive: Omega_p must be >= 0");
  validate_axis(axis, "axis");
  if (series) {
    validate_axis(*series, "series");
    if (series->axis == axis.axis) throw std::invalid_argument("series and axis must differ");
  }
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (numerics.n_max < 1) throw std::invalid_argument("numerics.n_max must be >= 1");
  if (numerics.K < 2) throw std::invalid_argument("numerics.K must be >= 2");
  if (numerics.harmonics < 1) throw std::invalid_argument("numerics.harmonics must be >= 1");
  if (numerics.levels < 0) throw std::invalid_argument("numerics.levels must be >= 0");
  if (!(numerics.truncation_tol > 0.0 && numerics.shift_tol > 0.0)) {
    throw std::invalid_argument("numerics: truncation tolerances must be > 0");
  }
  if (!numerics.omega_p_relative && axis.axis == SweepAxis::OmegaP) {
    for (double v : axis.values) {
      if (v <= 0.0) throw std::invalid_argument("axis omega_p: absolute drive frequencies must be > 0");
    }
  }
}

std::vector<Quantity> SweepSpec::effective_outputs() const {
  if (!outputs.empty()) return outputs;
  if (axis.axis == SweepAxis::OmegaP || axis.axis == SweepAxis::Eta) {
    return {Quantity::NUp, Quantity::FidelityF};
  }
  return {Quantity::ShiftNumeric, Quantity::ShiftAnalytic, Quantity::FidelityG, Quantity::NPhot, Quantity::Anomalous};
}

std::size_t SweepResult::fatal_count() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.fatal(); }));
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min<std::size_t>(std::max(workers, 1), std::max<std::size_t>(count, 1));
  if (n_threads <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

struct Point {
  std::size_t series = 0;
  double series_value = 0.0;
  double axis_value = 0.0;
  ModelSpec model;
  DissipationSpec dissipation;
  double drive_frequency = 0.0;  // offset when omega_p_relative
};

void apply_axis(SweepAxis axis, double v, ModelSpec& model, DissipationSpec& diss, double& drive_frequency) {
  switch (axis) {
    case SweepAxis::Lambda:
      model.lambda = v;
      break;
    case SweepAxis::N:
      model.N = static_cast<int>(v);
      break;
    case SweepAxis::Eta:
      diss.gamma_c = v * diss.gamma_M;
      diss.gamma_0 = v * diss.gamma_M;
      break;
    case SweepAxis::OmegaP:
      drive_frequency = v;
      break;
  }
}

// Everything a row needs from the eigensolver, without the eigenvectors.
struct SpectralData {
  NumericShift numeric;
  double shift_analytic = 0.0;
  double fidelity_G = 1.0;
  double n_phot = 0.0;
  double anomalous = 0.0;
  std::vector<double> energies;
  std::vector<double> weights;
};

SpectralData spectral_data(const ProbeSolution& p, int levels) {
  SpectralData d;
  d.numeric = p.numeric;
  d.shift_analytic = p.shift_analytic;
  d.fidelity_G = p.fidelity_G;
  d.n_phot = p.expectations.n_phot;
  d.anomalous = p.expectations.anomalous;
  const Index top = std::min<Index>(levels, p.full.size() - 1);
  for (Index l = 1; l <= top; ++l) {
    d.energies.push_back(p.full.energies(l) - p.full.energies(0));
    d.weights.push_back(p.weights(l));
  }
  return d;
}

void fill_spectral(SweepRow& row, const SpectralData& d) {
  row.shift_numeric = d.numeric.shift;
  row.shift_analytic = d.shift_analytic;
  row.fidelity_G = d.fidelity_G;
  row.n_phot = d.n_phot;
  row.anomalous = d.anomalous;
  row.energies = d.energies;
  row.weights = d.weights;
  row.avoided_crossing = d.numeric.avoided_crossing;
}

double absolute_drive(const SweepSpec& spec, const AncillaSpec& ancilla, const SpectralData& d, double frequency) {
  return spec.numerics.omega_p_relative ? ancilla.omega_M + d.shift_analytic + frequency : frequency;
}

void fill_dynamics(SweepRow& row, const SweepSpec& spec, const DressedFrame& frame, const Generator& generator,
                   const HarmonicSteadyState* solver) {
  const DriveSpec drive{row.omega_p, spec.drive.Omega_p};
  DensityMatrix rho = spec.numerics.method == SteadyStateMethod::Harmonic
                          ? (solver ? solver->solve(drive, spec.numerics.harmonics)
                                    : steady_state(generator, frame.sigma_x, drive, spec.numerics.harmonics))
                          : propagate(generator, frame, drive, DensityMatrix::ground(frame.K()),
                                      spec.numerics.propagation)
                                .rho;
  row.n_up = ancilla_population(rho, frame);
  row.fidelity_F = measurement_fidelity(rho, frame);
}

std::string error_text(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  openblas_set_num_threads(1);
  const auto t0 = std::chrono::steady_clock::now();

  SweepResult result;
  result.spec = spec;
  const std::vector<Quantity> outputs = spec.effective_outputs();
  const bool need_dynamics = std::any_of(outputs.begin(), outputs.end(), is_dynamic);

  const std::vector<double> series_values = spec.series ? spec.series->values : std::vector<double>{0.0};
  std::vector<Point> points;
  for (std::size_t s = 0; s < series_values.size(); ++s) {
    for (double v : spec.axis.values) {
      Point p;
      p.series = s;
      p.series_value = series_values[s];
      p.axis_value = v;
      p.model = spec.model;
      p.dissipation = spec.dissipation;
      p.drive_frequency = spec.drive.omega_p;
      if (spec.series) apply_axis(spec.series->axis, series_values[s], p.model, p.dissipation, p.drive_frequency);
      apply_axis(spec.axis.axis, v, p.model, p.dissipation, p.drive_frequency);
      points.push_back(p);
    }
  }

  // Truncation: once per series, at its largest coupling and atom number.
  result.truncation.resize(series_values.size());
  std::vector<std::string> series_error(series_values.size());
  parallel_for(series_values.size(), spec.workers, [&](std::size_t s) {
    SeriesTruncation& t = result.truncation[s];
    t.series_value = series_values[s];
    t.n_max = spec.numerics.n_max;
    if (!spec.numerics.validate_truncation) return;
    ModelSpec worst;
    bool first = true;
    for (const Point& p : points) {
      if (p.series != s) continue;
      if (first) worst = p.model;
      worst.lambda = std::max(worst.lambda, p.model.lambda);
      worst.N = std::max(worst.N, p.model.N);
      first = false;
    }
    try {
      SpaceSpec space{spec.numerics.n_max, worst.N, true};
      t.report = validate_truncation(worst, spec.ancilla, space, spec.numerics.truncation_tol,
                                     spec.numerics.shift_tol, spec.numerics.max_n_max);
      t.validated = true;
      if (t.report.converged) {
        t.n_max = t.report.recommended_n_max;
      } else {
        series_error[s] = "truncation not converged up to n_max=" + std::to_string(spec.numerics.max_n_max);
      }
    } catch (...) {
      series_error[s] = "truncation check failed: " + error_text(std::current_exception());
    }
  });

  result.rows.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    SweepRow& row = result.rows[i];
    const Point& p = points[i];
    row.index = i;
    row.series_value = p.series_value;
    row.axis_value = p.axis_value;
    row.lambda = p.model.lambda;
    row.N = p.model.N;
    row.eta = p.dissipation.gamma_M > 0.0 ? p.dissipation.gamma_c / p.dissipation.gamma_M : 0.0;
    row.n_max = result.truncation[p.series].n_max;
    row.K = need_dynamics ? spec.numerics.K : 0;
    row.error = series_error[p.series];
  }

  auto space_for = [&](const Point& p) { return SpaceSpec{result.truncation[p.series].n_max, p.model.N, true}; };

  const bool shared_probe = spec.axis.axis == SweepAxis::OmegaP || spec.axis.axis == SweepAxis::Eta;
  if (shared_probe) {
    // One eigenproblem per series; the axis only changes the drive or rates.
    struct Context {
      SpectralData data;
      DressedFrame frame;
      std::string error;
    };
    std::vector<Context> contexts(series_values.size());
    std::vector<std::size_t> first_point(series_values.size());
    for (std::size_t i = points.size(); i-- > 0;) first_point[points[i].series] = i;
    parallel_for(series_values.size(), spec.workers, [&](std::size_t s) {
      if (!series_error[s].empty()) return;
      const Point& p = points[first_point[s]];
      try {
        const ProbeSolution probe = solve_probe(p.model, spec.ancilla, space_for(p), spec.numerics.convention);
        contexts[s].data = spectral_data(probe, spec.numerics.levels);
        if (need_dynamics) contexts[s].frame = make_frame(probe, spec.numerics.K);
      } catch (...) {
        contexts[s].error = error_text(std::current_exception());
      }
    });

    // The omega_p axis shares one generator per series.
    std::vector<std::unique_ptr<Generator>> generators(series_values.size());
    std::vector<std::unique_ptr<HarmonicSteadyState>> solvers(series_values.size());
    if (need_dynamics && spec.axis.axis == SweepAxis::OmegaP) {
      parallel_for(series_values.size(), spec.workers, [&](std::size_t s) {
        if (!series_error[s].empty() || !contexts[s].error.empty()) return;
        try {
          const Point& p = points[first_point[s]];
          generators[s] = std::make_unique<Generator>(contexts[s].frame, p.dissipation, spec.numerics.degeneracy_tol);
          if (spec.numerics.method == SteadyStateMethod::Harmonic) {
            solvers[s] = std::make_unique<HarmonicSteadyState>(*generators[s], contexts[s].frame.sigma_x);
          }
        } catch (...) {
          contexts[s].error = error_text(std::current_exception());
        }
      });
    }

    parallel_for(points.size(), spec.workers, [&](std::size_t i) {
      SweepRow& row = result.rows[i];
      if (row.fatal()) return;
      const Point& p = points[i];
      const Context& ctx = contexts[p.series];
      if (!ctx.error.empty()) {
        row.error = ctx.error;
        return;
      }
      try {
        fill_spectral(row, ctx.data);
        row.omega_p = absolute_drive(spec, spec.ancilla, ctx.data, p.drive_frequency);
        if (spec.axis.axis == SweepAxis::OmegaP) row.axis_value = row.omega_p;
        if (!need_dynamics) return;
        if (generators[p.series]) {
          fill_dynamics(row, spec, ctx.frame, *generators[p.series], solvers[p.series].get());
        } else {
          const Generator generator(ctx.frame, p.dissipation, spec.numerics.degeneracy_tol);
          fill_dynamics(row, spec, ctx.frame, generator, nullptr);
        }
      } catch (...) {
        row.error = error_text(std::current_exception());
      }
    });
  } else {
    parallel_for(points.size(), spec.workers, [&](std::size_t i) {
      SweepRow& row = result.rows[i];
      if (row.fatal()) return;
      const Point& p = points[i];
      try {
        const ProbeSolution probe = solve_probe(p.model, spec.ancilla, space_for(p), spec.numerics.convention);
        const SpectralData data = spectral_data(probe, spec.numerics.levels);
        fill_spectral(row, data);
        row.omega_p = absolute_drive(spec, spec.ancilla, data, p.drive_frequency);
        if (!need_dynamics) return;
        const DressedFrame frame = make_frame(probe, spec.numerics.K);
        const Generator generator(frame, p.dissipation, spec.numerics.degeneracy_tol);
        fill_dynamics(row, spec, frame, generator, nullptr);
      } catch (...) {
        row.error = error_text(std::current_exception());
      }
    });
  }

  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += fmt(v[i]);
  }
  return out;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string cell(const SweepRow& row, Quantity q) {
  switch (q) {
    case Quantity::ShiftNumeric: return fmt(row.shift_numeric);
    case Quantity::ShiftAnalytic: return fmt(row.shift_analytic);
    case Quantity::FidelityG: return fmt(row.fidelity_G);
    case Quantity::NUp: return fmt(row.n_up);
    case Quantity::FidelityF: return fmt(row.fidelity_F);
    case Quantity::Energies: return join(row.energies);
    case Quantity::Weights: return join(row.weights);
    case Quantity::NPhot: return fmt(row.n_phot);
    case Quantity::Anomalous: return fmt(row.anomalous);
  }
  return "";
}

}  // namespace

void write_csv(std::ostream& out, const SweepResult& result) {
  const SweepSpec& spec = result.spec;
  const std::vector<Quantity> outputs = spec.effective_outputs();
  if (spec.series) out << to_string(spec.series->axis) << ',';
  out << to_string(spec.axis.axis);
  for (Quantity q : outputs) out << ',' << to_string(q);
  out << ",n_max,K,avoided_crossing,error\n";
  for (const SweepRow& row : result.rows) {
    if (spec.series) out << fmt(row.series_value) << ',';
    out << fmt(row.axis_value);
    for (Quantity q : outputs) out << ',' << (row.fatal() ? "" : cell(row, q));
    out << ',' << row.n_max << ',' << row.K << ',' << (row.avoided_crossing ? 1 : 0) << ',' << quote(row.error)
        << '\n';
  }
}

std::string csv_string(const SweepResult& result) {
  std::ostringstream s;
  write_csv(s, result);
  return s.str();
}

namespace {

SweepSpec base_preset(ModelKind kind, double omega_M) {
  SweepSpec s;
  s.model.kind = kind;
  s.model.omega_c = 1.0;
  s.model.omega_0 = 1.0;
  s.model.N = 3;
  s.ancilla.omega_M = omega_M;
  s.ancilla.g_M = 0.1;
  s.dissipation = {0.01, 0.01, 0.01, JumpMode::Dressed};
  s.drive = {0.0, 0.5 * 0.01};
  return s;
}

SweepSpec lambda_preset(const std::string& name, ModelKind kind, double omega_M) {
  SweepSpec s = base_preset(kind, omega_M);
  s.name = name;
  s.axis = {SweepAxis::Lambda, linspace(0.0, 2.0, 60)};
  return s;
}

SweepSpec n_preset(const std::string& name, ModelKind kind, double omega_M, double lambda_max) {
  SweepSpec s = base_preset(kind, omega_M);
  s.name = name;
  s.series = AxisSpec{SweepAxis::N, {1, 3, 10, 30}};
  s.axis = {SweepAxis::Lambda, linspace(0.0, lambda_max, 21)};
  return s;
}

SweepSpec spectroscopy_preset(const std::string& name, ModelKind kind, double Omega_over_gamma) {
  SweepSpec s = base_preset(kind, 2.75);
  s.name = name;
  s.drive.Omega_p = Omega_over_gamma * s.dissipation.gamma_M;
  s.series = AxisSpec{SweepAxis::Lambda, linspace(0.0, 1.0, 11)};
  s.axis = {SweepAxis::OmegaP, linspace(-0.05, 0.05, 201)};
  s.numerics.omega_p_relative = true;
  return s;
}

}  // namespace

const std::map<std::string, SweepSpec>& figure_presets() {
  static const std::map<std::string, SweepSpec> presets = [] {
    std::map<std::string, SweepSpec> m;
    m["fig2_dicke"] = lambda_preset("fig2_dicke", ModelKind::Dicke, 2.75);
    m["fig2_tc"] = lambda_preset("fig2_tc", ModelKind::TavisCummings, 2.75);
    m["fig2_hopfield"] = lambda_preset("fig2_hopfield", ModelKind::Hopfield, 6.75);
    m["fig3_dicke"] = n_preset("fig3_dicke", ModelKind::Dicke, 2.75, 1.0);
    m["fig3_hopfield"] = n_preset("fig3_hopfield", ModelKind::Hopfield, 6.75, 2.0);
    m["fig4_dicke"] = spectroscopy_preset("fig4_dicke", ModelKind::Dicke, 0.5);
    m["fig4_tc"] = spectroscopy_preset("fig4_tc", ModelKind::TavisCummings, 0.2);

    SweepSpec f5 = spectroscopy_preset("fig5_dicke", ModelKind::Dicke, 0.5);
    f5.model.lambda = 0.5;
    f5.series = AxisSpec{SweepAxis::Eta, {0.0, 1.0, 10.0}};
    m["fig5_dicke"] = f5;
    return m;
  }();
  return presets;
}

const SweepSpec& find_preset(const std::string& name) {
  const auto& presets = figure_presets();
  auto it = presets.find(name);
  if (it == presets.end()) {
    std::string known;
    for (const auto& [k, v] : presets) known += (known.empty() ? "" : ", ") + k;
    throw std::invalid_argument("unknown preset '" + name + "' (known: " + known + ")");
  }
  return it->second;
}

}  // namespace vprobe
