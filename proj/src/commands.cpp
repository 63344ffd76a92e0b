#include "cqs/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cqs/doqs.hpp"
#include "cqs/effective_hamiltonian.hpp"
#include "cqs/errors.hpp"
#include "cqs/floquet.hpp"
#include "cqs/io.hpp"
#include "cqs/landscape.hpp"
#include "cqs/protocol.hpp"

namespace cqs {

namespace {

namespace fs = std::filesystem;

fs::path prepare_dir(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

template <typename Writer>
fs::path emit(CommandReport& rep, const fs::path& dir, const std::string& name, Writer&& w) {
  std::ostringstream os;
  w(os);
  const fs::path p = dir / name;
  write_file(p, os.str());
  rep.files.push_back(p);
  return p;
}

void emit_json(CommandReport& rep, const fs::path& dir, const std::string& name, const nlohmann::json& j) {
  emit(rep, dir, name, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

EffectiveOptions eh_options(const ExperimentConfig& cfg) {
  EffectiveOptions o;
  o.max_ht = cfg.eh_max_ht;
  o.max_k = cfg.eh_max_k;
  return o;
}

CriticalPointOptions cp_options(const ExperimentConfig& cfg) {
  CriticalPointOptions o;
  o.grid = cfg.grid;
  return o;
}

// Sup-norm gap between two curves on a common grid, away from the listed phases, over the median.
double relative_gap(const DoqsCurve& exact, const DoqsCurve& semi, const std::vector<double>& phases, double radius) {
  std::vector<double> med(exact.values.data(), exact.values.data() + exact.values.size());
  std::nth_element(med.begin(), med.begin() + static_cast<long>(med.size() / 2), med.end());
  const double median = med[med.size() / 2];
  double worst = 0.0;
  for (Index i = 0; i < exact.grid.size(); ++i) {
    bool far = true;
    for (double p : phases)
      if (std::abs(fold(exact.grid(i) - p)) <= radius) far = false;
    if (far) worst = std::max(worst, std::abs(exact.values(i) - semi.values(i)));
  }
  return worst / median;
}

}  // namespace

CommandReport cmd_spectrum(const ExperimentConfig& cfg) {
  const fs::path dir = prepare_dir(cfg);
  const SpinSystem sys = build_spin_system(cfg.j);
  const DriveConfig drive = drive_of(cfg);
  const CMatrix f = floquet_operator(sys, drive, cfg.steps);
  const FloquetSpectrum spec = diagonalize_floquet(f);
  const EffectiveHamiltonian heff = effective_hamiltonian(sys, drive, eh_options(cfg));
  const UnfoldedSpectrum unf = unfolded_spectrum(heff);
  const PhaseMatch match = match_phases(unf.energies, spec.phases);

  CommandReport rep;
  emit(rep, dir, "spectrum.csv", [&](std::ostream& os) { write_spectrum_csv(os, spec); });
  emit(rep, dir, "unfolded.csv", [&](std::ostream& os) { write_unfolded_csv(os, unf.energies, match); });
  if (cfg.dump_matrix) {
    const fs::path p = dir / "floquet.cqsm";
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + p.string());
    write_matrix_binary(os, f);
    rep.files.push_back(p);
  }
  rep.summary = {{"dimension", sys.dim},
                 {"unitarity_defect", unitarity_defect(f)},
                 {"max_residual", spec.residuals.maxCoeff()},
                 {"max_match_distance", match.max_distance},
                 {"singular_distance", heff.validity.singular_distance}};
  emit_json(rep, dir, "spectrum_report.json", rep.summary);
  return rep;
}

CommandReport cmd_doqs(const ExperimentConfig& cfg) {
  const fs::path dir = prepare_dir(cfg);
  const SpinSystem sys = build_spin_system(cfg.j);
  const DriveConfig drive = drive_of(cfg);
  const FloquetSpectrum spec = diagonalize_floquet(floquet_operator(sys, drive, cfg.steps));
  const auto traces = floquet_traces(spec.phases, cfg.n_max);

  const DoqsCurve exact = exact_doqs(spec.phases, cfg.bins);
  const DoqsCurve trace = trace_doqs(traces, sys.dim, cfg.n_max, cfg.damping, cfg.doqs_grid);
  const Landscape land = Landscape::from_drive(drive);
  const CriticalPointSet cps = find_critical_points(land, sys.j, cp_options(cfg));
  const DoqsCurve semi = semiclassical_doqs(cps.points, sys.dim, 1, zone_grid(cfg.doqs_grid));
  const DoqsCurve semi_smooth = smoothed_semiclassical_doqs(cps.points, sys.dim, 1, cfg.n_max, cfg.damping, cfg.doqs_grid);
  const DoqsCurve integrated = integrated_doqs(exact);

  CommandReport rep;
  emit(rep, dir, "doqs_exact.csv", [&](std::ostream& os) { write_doqs_csv(os, exact); });
  emit(rep, dir, "doqs_trace.csv", [&](std::ostream& os) { write_doqs_csv(os, trace); });
  emit(rep, dir, "doqs_semiclassical.csv", [&](std::ostream& os) { write_doqs_csv(os, semi); });
  emit(rep, dir, "doqs_integrated.csv", [&](std::ostream& os) { write_doqs_csv(os, integrated); });
  emit_json(rep, dir, "critical_points.json", critical_points_json(cps.points));

  nlohmann::json markers = nlohmann::json::array();
  nlohmann::json criteria = nlohmann::json::array();
  std::vector<double> phases;
  for (const auto& c : cps.points) {
    phases.push_back(c.phase);
    const DivergenceCriterion dc = divergence_criterion(1, c.beta);
    criteria.push_back({{"kind", to_string(c.kind)}, {"phi_c", c.phase}, {"beta", c.beta},
                        {"diverges", dc.diverges}, {"k", dc.k}});
    const bool marked = std::any_of(markers.begin(), markers.end(), [&](const nlohmann::json& m) {
      return std::abs(fold(m["phi"].get<double>() - c.phase)) <= 1e-9;
    });
    if (dc.diverges && !marked) {
      markers.push_back({{"phi", c.phase},
                         {"rho_minus", semiclassical_density(cps.points, sys.dim, 1, c.phase - 1e-3)},
                         {"rho_plus", semiclassical_density(cps.points, sys.dim, 1, c.phase + 1e-3)}});
    }
  }
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : cps.failures)
    failures.push_back({{"seed", {f.seed_q, f.seed_p}}, {"at", {f.q, f.p}}, {"reason", f.reason}});

  rep.summary = {{"normalization",
                  {{"exact-histogram", exact.normalization},
                   {"trace-sum", trace.normalization},
                   {"semiclassical", semi.normalization}}},
                 {"divergence_markers", markers},
                 {"divergence_criteria", criteria},
                 {"newton_failures", failures},
                 {"agreement",
                  {{"smoothing", cfg.damping},
                   {"excluded_radius", 0.3},
                   {"sup_error_over_median", relative_gap(trace, semi_smooth, phases, 0.3)}}}};
  emit_json(rep, dir, "doqs_report.json", rep.summary);
  return rep;
}

CommandReport cmd_protocol(const ExperimentConfig& cfg) {
  const fs::path dir = prepare_dir(cfg);
  const SpinSystem sys = build_spin_system(cfg.j);
  const DriveConfig drive = drive_of(cfg);
  const CMatrix f = floquet_operator(sys, drive, cfg.steps);
  const FloquetSpectrum spec = diagonalize_floquet(f);
  const EffectiveHamiltonian heff = effective_hamiltonian(sys, drive, eh_options(cfg));
  const auto modes = mode_magnetization(spec, heff, sys);
  const Envelope env = upper_envelope(modes, std::max(3, static_cast<int>(std::lround(sys.j))));
  const auto cusp = detect_cusp(env);

  CommandReport rep;
  emit(rep, dir, "modes.csv", [&](std::ostream& os) { write_modes_csv(os, modes); });

  nlohmann::json report;
  report["envelope_spacing"] = env.spacing;
  report["cusp"] = cusp ? nlohmann::json{{"E_T", cusp->energy}, {"strength", cusp->strength}} : nlohmann::json(nullptr);

  const Landscape land = Landscape::from_drive(drive);
  const CriticalPointSet cps = find_critical_points(land, sys.j, cp_options(cfg));
  std::vector<ProtocolRecord> records;
  try {
    const double sep = separatrix_energies(cps.points).front();
    const CriticalPoint* saddle = nullptr;
    const CriticalPoint* top = nullptr;
    const CriticalPoint* bottom = nullptr;
    for (const auto& c : cps.points) {
      if (c.kind == CriticalKind::saddle && !saddle && std::abs(c.energy - sep) <= 1e-9) saddle = &c;
      if (c.kind == CriticalKind::maximum && (!top || c.energy > top->energy)) top = &c;
    }
    for (const auto& c : cps.points) {
      if (c.kind != CriticalKind::minimum || c.energy >= saddle->energy) continue;
      if (!bottom || c.energy > bottom->energy + 1e-12) bottom = &c;
    }
    report["separatrix_E_G_T"] = sep;
    report["separatrix_E_T"] = sys.j * sep;
    std::vector<ProtocolPath> paths;
    PathOptions po;
    po.raster = cfg.raster;
    if (bottom)
      paths.push_back({Branch::min_to_saddle, minimal_velocity_path(land, *bottom, *saddle, cfg.path_points, po)});
    if (top) paths.push_back({Branch::saddle_to_max, minimal_velocity_path(land, *saddle, *top, cfg.path_points, po)});
    const ProtocolResult res = run_protocol(sys, f, heff, cfg.periods, paths);
    records = res.records;
    const auto lower = mirror_records(res.records);
    records.insert(records.end(), lower.begin(), lower.end());
    double worst = 0.0;
    for (const auto& r : res.records)
      worst = std::max(worst, std::abs(r.jx_avg - mode_curve_value(modes, r.energy, r.jx_avg)));
    report["max_mode_deviation"] = worst;
    nlohmann::json fails = nlohmann::json::array();
    for (const auto& e : res.failures) fails.push_back({{"branch", to_string(e.branch)}, {"index", e.index}, {"reason", e.reason}});
    report["failures"] = fails;
  } catch (const NoSaddle&) {
    report["separatrix"] = "no separatrix";
  }
  emit(rep, dir, "protocol.csv", [&](std::ostream& os) { write_protocol_csv(os, records); });
  rep.summary = report;
  emit_json(rep, dir, "cusp.json", report);
  return rep;
}

CommandReport cmd_landscape(const ExperimentConfig& cfg) {
  const fs::path dir = prepare_dir(cfg);
  const DriveConfig drive = drive_of(cfg);
  validate_drive(drive);
  const Landscape land = Landscape::from_drive(drive);
  const CriticalPointSet cps = find_critical_points(land, cfg.j, cp_options(cfg));
  CommandReport rep;
  emit(rep, dir, "landscape.csv", [&](std::ostream& os) { write_raster_csv(os, landscape_raster(land, cfg.raster)); });
  emit_json(rep, dir, "critical_points.json", critical_points_json(cps.points));
  rep.summary = {{"maxima", cps.count(CriticalKind::maximum)},
                 {"saddles", cps.count(CriticalKind::saddle)},
                 {"minima", cps.count(CriticalKind::minimum)}};
  return rep;
}

}  // namespace cqs
