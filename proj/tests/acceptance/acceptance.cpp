// Acceptance runner: `acceptance [N ...] [--full]` prints one line per criterion.
#include "oracles.hpp"
#include "vprobe/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace vprobe;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

bool g_full = false;

std::string num(double v, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

ModelSpec make(ModelKind kind, double lambda, int N) {
  ModelSpec m;
  m.kind = kind;
  m.lambda = lambda;
  m.N = N;
  return m;
}

double probe_frequency(ModelKind kind) { return kind == ModelKind::Hopfield ? 6.75 : 2.75; }

int converged_n_max(const ModelSpec& m, const AncillaSpec& a, int start = 8) {
  const TruncationReport r = validate_truncation(m, a, SpaceSpec{start, m.N, true});
  if (!r.converged) throw std::runtime_error("truncation did not converge for " + to_string(m.kind));
  return r.recommended_n_max;
}

std::vector<const SweepRow*> series_rows(const SweepResult& r, double series_value) {
  std::vector<const SweepRow*> out;
  for (const SweepRow& row : r.rows)
    if (row.series_value == series_value) out.push_back(&row);
  return out;
}

std::string first_error(const SweepResult& r) {
  for (const SweepRow& row : r.rows)
    if (row.fatal()) return row.error;
  return "";
}

// 1: bare-vacuum shift
Outcome criterion1() {
  Outcome o{true, ""};
  const std::vector<std::pair<ModelKind, double>> cases = {
      {ModelKind::Dicke, 0.00838095}, {ModelKind::TavisCummings, 0.00838095}, {ModelKind::Hopfield, 0.00302945}};
  for (auto [kind, target] : cases) {
    const ModelSpec m = make(kind, 0.0, 3);
    const AncillaSpec a{probe_frequency(kind), 0.1};
    const ProbeSolution p = solve_probe(m, a, SpaceSpec{converged_n_max(m, a, 4), 3, true});
    const double dev = std::abs(p.numeric.shift - target);
    o.pass = o.pass && dev < 1e-4;
    o.detail += to_string(kind) + "=" + num(p.numeric.shift, 7) + " (|d|=" + num(dev, 2) + ") ";
  }
  return o;
}

// 2: numeric vs analytic shift across couplings
Outcome criterion2() {
  Outcome o{true, ""};
  const std::vector<double> grid = linspace(0.0, 1.5, 16);
  for (double g : {0.1, 0.02}) {
    const double limit = g == 0.1 ? 0.10 : 0.01;
    for (auto kind : {ModelKind::Dicke, ModelKind::TavisCummings, ModelKind::Hopfield}) {
      const AncillaSpec a{probe_frequency(kind), g};
      const int n_max = converged_n_max(make(kind, 1.5, 3), a);
      double worst = 0.0, worst_printed = 0.0, worst_at = 0.0;
      int skipped = 0;
      for (double lam : grid) {
        const ModelSpec m = make(kind, lam, 3);
        const SpaceSpec s{n_max, 3, true};
        const ProbeSolution p = solve_probe(m, a, s, DickeVConvention::InteractionTerm);
        if (p.numeric.avoided_crossing) {
          ++skipped;
          continue;
        }
        const double dev = std::abs(p.shift_analytic - p.numeric.shift) / std::abs(p.numeric.shift);
        if (dev > worst) {
          worst = dev;
          worst_at = lam;
        }
        const double printed =
            lamb_shift_analytic(m, a, ground_expectations(m, s.system_only(), p.system, DickeVConvention::Printed));
        worst_printed = std::max(worst_printed, std::abs(printed - p.numeric.shift) / std::abs(p.numeric.shift));
      }
      const bool ok = worst < limit;
      o.pass = o.pass && ok;
      o.detail += "g=" + num(g) + " " + to_string(kind) + ":" + num(100 * worst, 3) + "%@" + num(worst_at, 2) +
                  (ok ? "" : "!") + " [printed V " + num(100 * worst_printed, 3) + "%]" +
                  (skipped ? " skip" + std::to_string(skipped) : "") + "; ";
    }
  }
  o.detail += "limits 10%/1%";
  return o;
}

// 3: shapes of the coupling scans
Outcome criterion3() {
  Outcome o{true, ""};
  {
    const SweepResult r = run_sweep(find_preset("fig2_dicke"));
    if (r.fatal_count()) return {false, "fig2_dicke: " + first_error(r)};
    bool increasing = true;
    for (std::size_t i = 1; i < r.rows.size(); ++i)
      increasing = increasing && r.rows[i].shift_numeric > r.rows[i - 1].shift_numeric;
    bool above = true;
    for (std::size_t i = 1; i < r.rows.size(); ++i) above = above && r.rows[i].shift_numeric > r.rows[0].shift_numeric;
    o.pass = o.pass && increasing && above;
    o.detail += std::string("dicke increasing=") + (increasing ? "yes" : "NO") + " above_vacuum=" +
                (above ? "yes" : "NO") + "; ";
  }
  {
    const SweepSpec spec = find_preset("fig2_tc");
    const SweepResult r = run_sweep(spec);
    if (r.fatal_count()) return {false, "fig2_tc: " + first_error(r)};
    std::vector<double> exc;
    for (const SweepRow& row : r.rows) {
      const ProbeSolution p = solve_probe(make(ModelKind::TavisCummings, row.lambda, spec.model.N), spec.ancilla,
                                          SpaceSpec{row.n_max, spec.model.N, true});
      exc.push_back(p.expectations.excitations);
    }
    bool integer = true;
    for (double e : exc) integer = integer && std::abs(e - std::round(e)) < 1e-8;
    std::vector<std::size_t> jump_intervals;  // interval i spans rows i..i+1
    for (std::size_t i = 0; i + 1 < exc.size(); ++i)
      if (exc[i + 1] - exc[i] > 0.5) jump_intervals.push_back(i);
    std::vector<std::pair<double, std::size_t>> steps;
    for (std::size_t i = 0; i + 1 < r.rows.size(); ++i)
      steps.push_back({std::abs(r.rows[i + 1].shift_numeric - r.rows[i].shift_numeric), i});
    std::sort(steps.rbegin(), steps.rend());
    bool colocated = !jump_intervals.empty();
    for (std::size_t k = 0; k < jump_intervals.size() && k < steps.size(); ++k) {
      const std::size_t i = steps[k].second;
      const bool near = std::any_of(jump_intervals.begin(), jump_intervals.end(), [&](std::size_t j) {
        return (i > j ? i - j : j - i) <= 1;
      });
      colocated = colocated && near;
    }
    o.pass = o.pass && integer && colocated;
    o.detail += "tc excitation jumps=" + std::to_string(jump_intervals.size()) +
                " largest shift steps co-located=" + (colocated ? "yes" : "NO") + "; ";
  }
  {
    const SweepResult r = run_sweep(find_preset("fig2_hopfield"));
    if (r.fatal_count()) return {false, "fig2_hopfield: " + first_error(r)};
    bool decreasing = true;
    for (std::size_t i = 1; i < r.rows.size(); ++i)
      decreasing = decreasing && r.rows[i].shift_numeric < r.rows[i - 1].shift_numeric;
    o.pass = o.pass && decreasing;
    o.detail += std::string("hopfield decreasing=") + (decreasing ? "yes" : "NO");
  }
  return o;
}

// 4: atom-number dependence
Outcome criterion4() {
  Outcome o{true, ""};
  SweepSpec dicke = find_preset("fig3_dicke");
  dicke.series->values = {30};
  dicke.outputs = {Quantity::ShiftNumeric, Quantity::FidelityG, Quantity::Energies};
  const SweepResult rd = run_sweep(dicke);
  if (rd.fatal_count()) return {false, "fig3_dicke N=30: " + first_error(rd)};
  const auto& rows = rd.rows;

  double onset = NAN;
  for (const SweepRow& row : rows) {
    if (row.energies.at(0) < 1e-3) {
      onset = row.lambda;
      break;
    }
  }
  const bool doublet = std::isfinite(onset) && onset >= 0.45 && onset <= 0.65;

  std::size_t jump = 0;
  std::vector<double> sub;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double d = rows[i + 1].shift_numeric - rows[i].shift_numeric;
    if (d > rows[jump + 1].shift_numeric - rows[jump].shift_numeric) jump = i;
    if (rows[i + 1].lambda < 0.45) sub.push_back(std::abs(d));
  }
  std::nth_element(sub.begin(), sub.begin() + sub.size() / 2, sub.end());
  const double median = sub.empty() ? 0.0 : sub[sub.size() / 2];
  const double step = rows[jump + 1].shift_numeric - rows[jump].shift_numeric;
  const bool jump_ok = rows[jump].lambda >= 0.45 && rows[jump + 1].lambda <= 0.65 && step > 10 * median;

  double below = 0.0;
  for (std::size_t i = 0; i <= jump; ++i) below = std::max(below, rows[i].fidelity_G);
  const double f_end = rows.back().fidelity_G;
  const bool dicke_drop = f_end < below - 0.05;

  const SweepResult rh = run_sweep(find_preset("fig3_hopfield"));
  if (rh.fatal_count()) return {false, "fig3_hopfield: " + first_error(rh)};
  double hop_min = 1.0;
  for (const SweepRow& row : rh.rows) hop_min = std::min(hop_min, row.fidelity_G);
  const bool hop_ok = hop_min > 0.9;

  o.pass = doublet && jump_ok && dicke_drop && hop_ok;
  o.detail = "doublet gap<1e-3 from lambda=" + num(onset, 3) + (doublet ? "" : "!") + "; largest shift step " +
             num(step, 3) + " on [" + num(rows[jump].lambda, 3) + "," + num(rows[jump + 1].lambda, 3) +
             "] vs subcritical median " + num(median, 2) + (jump_ok ? "" : "!") + "; Dicke F_G " + num(below, 5) +
             " -> " + num(f_end, 4) + (dicke_drop ? "" : "!") + "; Hopfield min F_G " + num(hop_min, 5) +
             (hop_ok ? "" : "!") + " (n_max N=30 Dicke " + std::to_string(rows.front().n_max) + ")";
  return o;
}

// 5: Jaynes-Cummings ladder
Outcome criterion5() {
  double worst = 0.0;
  const int n_max = 10;
  for (double lam : {0.1, 0.2, 0.5}) {
    const SpaceSpec s{n_max, 1, false};
    const Vector e = diagonalize(build_system_hamiltonian(make(ModelKind::TavisCummings, lam, 1), s)).energies;
    std::vector<double> exact = {-0.5, n_max + 0.5};
    for (int n = 1; n <= n_max; ++n) {
      exact.push_back(oracle::jc_energy(n, +1, 1.0, 1.0, lam));
      exact.push_back(oracle::jc_energy(n, -1, 1.0, 1.0, lam));
    }
    std::sort(exact.begin(), exact.end());
    for (Index i = 0; i < e.size(); ++i) {
      if (exact[i] > 5.0 + 1.0) continue;  // ladder rungs n <= 5
      worst = std::max(worst, std::abs(e(i) - exact[i]));
    }
  }
  return {worst < 1e-10, "max |E - E_JC| = " + num(worst, 3) + " (n<=5, lambda 0.1/0.2/0.5)"};
}

// 6: Bogoliubov vacuum
Outcome criterion6() {
  Outcome o{true, ""};
  for (double D : {0.1, 0.25}) {
    ModelSpec m = make(ModelKind::Hopfield, 0.0, 1);
    m.D_override = D;
    const TruncationReport t = validate_truncation(m, AncillaSpec{2.75, 0.0}, SpaceSpec{8, 1, true}, 1e-14);
    const SpaceSpec s{t.recommended_n_max, 1, false};
    const GroundExpectations ex = ground_expectations(m, s, diagonalize(build_system_hamiltonian(m, s)));
    const double dev = std::abs(ex.quad - oracle::bogoliubov_quad(1.0, D));
    o.pass = o.pass && t.converged && dev < 1e-6;
    o.detail += "D=" + num(D) + ": |d|=" + num(dev, 2) + " (n_max " + std::to_string(s.n_max) + ") ";
  }
  return o;
}

// 7: dissipative stability of the interacting vacuum
Outcome criterion7() {
  Outcome o{true, ""};
  const DissipationSpec rates{0.01, 0.01, 0.01, JumpMode::Dressed};
  double worst = 0.0;
  for (auto kind : {ModelKind::Dicke, ModelKind::TavisCummings, ModelKind::Hopfield}) {
    const AncillaSpec a{probe_frequency(kind), 0.1};
    const int n_max = converged_n_max(make(kind, 1.0, 3), a);
    for (double lam : {0.0, 0.5, 1.0}) {
      const ProbeSolution p = solve_probe(make(kind, lam, 3), a, SpaceSpec{n_max, 3, true});
      const DressedFrame f = make_frame(p, 24);
      const DensityMatrix rho = steady_state(Generator(f, rates), f.sigma_x, DriveSpec{0.0, 0.0});
      worst = std::max(worst, rho.trace_distance(DensityMatrix::ground(f.K())));
    }
  }
  const AncillaSpec a{2.75, 0.1};
  const ProbeSolution p = solve_probe(make(ModelKind::Dicke, 1.0, 3), a,
                                      SpaceSpec{converged_n_max(make(ModelKind::Dicke, 1.0, 3), a), 3, true});
  const DressedFrame f = make_frame(p, 24);
  DissipationSpec bare = rates;
  bare.mode = JumpMode::Bare;
  const DensityMatrix rho = steady_state(Generator(f, bare), f.sigma_x, DriveSpec{0.0, 0.0});
  const double excited = 1.0 - rho.entries(0, 0).real();
  o.pass = worst < 1e-8 && excited > 1e-3;
  o.detail = "dressed max trace distance " + num(worst, 3) + "; bare Dicke lambda=1 excited population " +
             num(excited, 3);
  return o;
}

struct ResonanceCheck {
  double peak = 0.0;
  double width = 0.0;
  double target = 0.0;
  double analytic = 0.0;
  double slope = 0.0;
};

// 8: driven spectroscopy
Outcome criterion8() {
  Outcome o{true, ""};
  const std::vector<double> smoke = {0.0, 0.5, 1.0};
  for (const char* name : {"fig4_dicke", "fig4_tc"}) {
    SweepSpec spec = find_preset(name);
    if (!g_full) spec.series->values = smoke;
    spec.outputs = {Quantity::NUp, Quantity::ShiftNumeric, Quantity::ShiftAnalytic};
    const SweepResult r = run_sweep(spec);
    if (r.fatal_count()) return {false, std::string(name) + ": " + first_error(r)};
    int pos_fail = 0, slope_fail = 0, overlay_fail = 0;
    std::string failures;
    for (double lam : spec.series->values) {
      const auto rows = series_rows(r, lam);
      std::vector<SpectroscopyPoint> pts;
      for (const SweepRow* row : rows) pts.push_back({row->omega_p, row->n_up, row->fidelity_F});
      const PeakInfo peak = peak_extract(pts);
      const double target = spec.ancilla.omega_M + rows.front()->shift_numeric;
      const double shift = peak.peak_frequency - spec.ancilla.omega_M;
      const double analytic = rows.front()->shift_analytic;
      const bool pos_ok = std::abs(peak.peak_frequency - target) < 0.2 * peak.linewidth;
      const bool overlay_ok = std::abs(analytic - shift) < 0.1 * std::abs(shift);

      // drive-strength scaling at the resonance
      const ModelSpec m = make(spec.model.kind, lam, spec.model.N);
      const ProbeSolution p = solve_probe(m, spec.ancilla, SpaceSpec{rows.front()->n_max, spec.model.N, true});
      const DressedFrame f = make_frame(p, spec.numerics.K);
      const Generator gen(f, spec.dissipation);
      const HarmonicSteadyState solver(gen, f.sigma_x);
      // peak height above the undriven population of the dressed vacuum
      const double base = ancilla_population(solver.solve({target, 0.0}), f);
      std::vector<double> heights;
      const double gM = spec.dissipation.gamma_M;
      for (double w : {0.05, 0.1, 0.2})
        heights.push_back(ancilla_population(solver.solve({target, w * gM}, spec.numerics.harmonics), f) - base);
      bool slope_ok = true;
      double slope_worst = 2.0;
      for (std::size_t i = 0; i + 1 < heights.size(); ++i) {
        const double slope = std::log(heights[i + 1] / heights[i]) / std::log(2.0);
        if (std::abs(slope - 2.0) > std::abs(slope_worst - 2.0)) slope_worst = slope;
        slope_ok = slope_ok && std::abs(slope - 2.0) < 0.1;
      }
      pos_fail += !pos_ok;
      slope_fail += !slope_ok;
      overlay_fail += !overlay_ok;
      if (!pos_ok || !slope_ok || !overlay_ok) {
        failures += " l=" + num(lam, 2) + "[";
        if (!pos_ok) failures += "pos " + num(std::abs(peak.peak_frequency - target) / peak.linewidth, 2) + "fw ";
        if (!slope_ok) failures += "slope " + num(slope_worst, 4) + " ";
        if (!overlay_ok) failures += "overlay " + num(100 * std::abs(analytic - shift) / std::abs(shift), 3) + "%";
        failures += "]";
      }
    }
    const bool ok = pos_fail == 0 && slope_fail == 0 && overlay_fail == 0;
    o.pass = o.pass && ok;
    o.detail += std::string(name) + " (" + std::to_string(spec.series->values.size()) + " lambda): " +
                (ok ? "ok" : "fail" + failures) + "; ";
  }
  o.detail += g_full ? "full grid" : "smoke subset";
  return o;
}

// 9: fidelity dip ordering
Outcome criterion9() {
  SweepSpec spec = find_preset("fig5_dicke");
  spec.outputs = {Quantity::NUp, Quantity::FidelityF, Quantity::FidelityG};
  const SweepResult r = run_sweep(spec);
  if (r.fatal_count()) return {false, "fig5_dicke: " + first_error(r)};
  std::vector<double> depths;
  double off_worst = 0.0;
  for (double eta : spec.series->values) {
    const auto rows = series_rows(r, eta);
    double fmin = 1.0;
    for (const SweepRow* row : rows) fmin = std::min(fmin, row->fidelity_F);
    const double fg = rows.front()->fidelity_G;
    depths.push_back(fg - fmin);
    off_worst = std::max({off_worst, std::abs(rows.front()->fidelity_F - fg), std::abs(rows.back()->fidelity_F - fg)});
  }
  bool ordered = true;
  for (std::size_t i = 1; i < depths.size(); ++i) ordered = ordered && depths[i] < depths[i - 1];

  // dip at the resonance for weaker drives, eta = 1
  const double gM = spec.dissipation.gamma_M;
  DissipationSpec d = spec.dissipation;
  d.gamma_c = d.gamma_0 = gM;
  const SweepRow& any = r.rows.front();
  const ProbeSolution p = solve_probe(make(ModelKind::Dicke, spec.model.lambda, spec.model.N), spec.ancilla,
                                      SpaceSpec{any.n_max, spec.model.N, true});
  const DressedFrame f = make_frame(p, spec.numerics.K);
  const Generator gen(f, d);
  const HarmonicSteadyState solver(gen, f.sigma_x);
  const double wp = spec.ancilla.omega_M + p.numeric.shift;
  std::vector<double> weak;
  for (double w : {0.5, 0.1, 0.02})
    weak.push_back(p.fidelity_G - measurement_fidelity(solver.solve({wp, w * gM}, spec.numerics.harmonics), f));
  const bool vanishing = weak[1] < weak[0] && weak[2] < weak[1] && weak[2] < 1e-2 * weak[0];

  Outcome o;
  o.pass = ordered && off_worst < 1e-3 && vanishing;
  o.detail = "dip depth eta=0/1/10: " + num(depths[0], 4) + " / " + num(depths[1], 4) + " / " + num(depths[2], 4) +
             (ordered ? "" : "!") + "; off-resonance |F-F_G| " + num(off_worst, 2) + "; depth vs Omega_p " +
             num(weak[0], 3) + " -> " + num(weak[1], 3) + " -> " + num(weak[2], 3) + (vanishing ? "" : "!");
  return o;
}

// 10: determinism across worker counts
Outcome criterion10() {
  Outcome o{true, ""};
  std::vector<SweepSpec> specs = {find_preset("fig2_dicke"), find_preset("fig4_dicke")};
  specs[1].series->values = {0.5};
  for (SweepSpec spec : specs) {
    spec.workers = 1;
    const std::string one = csv_string(run_sweep(spec));
    spec.workers = 8;
    const std::string eight = csv_string(run_sweep(spec));
    const bool same = one == eight;
    o.pass = o.pass && same;
    o.detail += spec.name + (same ? " identical" : " DIFFERENT") + " (" + std::to_string(one.size()) + " bytes); ";
  }
  return o;
}

struct Criterion {
  std::function<Outcome()> run;
  double budget_seconds;
};

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, Criterion> criteria = {
      {1, {criterion1, 1}},    {2, {criterion2, 60}},    {3, {criterion3, 120}}, {4, {criterion4, 600}},
      {5, {criterion5, 1}},    {6, {criterion6, 1}},     {7, {criterion7, 300}}, {8, {criterion8, 120}},
      {9, {criterion9, 1200}}, {10, {criterion10, 600}},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--full") {
      g_full = true;
    } else {
      const int n = std::atoi(arg.c_str());
      if (!criteria.count(n)) {
        std::cerr << "usage: acceptance [1-10 ...] [--full]\n";
        return 2;
      }
      selected.push_back(n);
    }
  }
  if (selected.empty())
    for (const auto& [n, c] : criteria) selected.push_back(n);

  int failures = 0;
  for (int n : selected) {
    Criterion c = criteria.at(n);
    if (n == 8 && g_full) c.budget_seconds = 1800;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = out.pass && in_time;
    failures += !pass;
    std::cout << "criterion " << n << ": " << (pass ? "PASS" : "FAIL") << "  " << out.detail << "  (" << num(secs, 3)
              << " s" << (in_time ? "" : ", over budget " + num(c.budget_seconds) + " s") << ")" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
