#ifndef WAVECAL_SCENARIO_HPP
#define WAVECAL_SCENARIO_HPP

#include "wavecal/invert.hpp"
#include "wavecal/pairing.hpp"
#include "wavecal/parallel.hpp"

namespace wavecal {

/// Knobs of one reconstruction study. The defaults match the desk-scale
/// budget; partial-data scenarios probe an arc of directions around omega0
/// so the observation patch covers every illuminated face they use.
struct ScenarioConfig {
  Scenario scenario = Scenario::C0;
  double lambda = 32.0;
  int omega_count = 16;
  double xi_max = 8.0;
  double oversample = 0.0;  // 0 picks a per-scenario default
  double eps = 0.0;
  int v_margin_cells = 1;
  double omega0_angle = 0.0;
  double arc_halfwidth = 0.0;  // 0 picks the default for the scenario
  int samples_per_bin = 0;  // 0 unlimited; 1 thins to one probe per bin
  RemainderOptions remainder = sweep_remainder_defaults();
  int threads = 0;

  int effective_samples_per_bin() const {
    if (samples_per_bin > 0) return samples_per_bin;
    bool expensive = scenario == Scenario::CTV || scenario == Scenario::C0TV;
    return expensive ? 1 : 0;
  }

  // the direction/frequency sweep tolerates a looser remainder fit than the
  // single-probe studies; the residual still sits far below the sample noise
  static RemainderOptions sweep_remainder_defaults() {
    RemainderOptions r;
    r.tolerance = 1e-4;
    return r;
  }

  double effective_oversample() const {
    if (oversample > 0) return oversample;
    return scenario == Scenario::CT ? 1.25 : 2.0;
  }
  double effective_arc() const {
    if (arc_halfwidth > 0) return arc_halfwidth;
    bool partial = scenario == Scenario::CTV || scenario == Scenario::C0TV;
    return partial ? 0.45 * kPi : kPi;
  }
};

/// Synthesis product handed to the inversion side: masked records plus the
/// plan bookkeeping. Everything the unknown potential contributes lives in
/// the records.
struct ScenarioData {
  Scenario scenario = Scenario::C0;
  double lambda = 0.0;
  std::vector<DataRecord> records;
  std::vector<int> record_of_entry;  // plan entry -> record index
  std::vector<PlanEntry> entries;
  std::optional<BoundaryMask> mask;
};

struct SampleRow {
  int omega_index = 0;
  Freq xi;
  cplx sample{};
  cplx oracle{};
  bool has_oracle = false;
};

struct ReconstructionReport {
  Scenario scenario = Scenario::C0;
  double lambda = 0.0;
  RealField q_est;
  FourierSliceSet slices;
  double coverage = 0.0;
  std::int64_t records_used = 0;
  double imag_residue = 0.0;
  bool imag_warning = false;
  // filled by attach_truth_metrics when the truth is available
  double rel_l2_error = -1.0;
  double floor_fraction = -1.0;
  std::vector<SampleRow> rows;
};

namespace scen {

inline void check_preconditions(const Grid& g, const ScenarioConfig& cfg,
                                const SamplingPlan& plan, const BoundaryMask* mask) {
  if (cfg.scenario == Scenario::C0T && !(g.T > g.diameter()))
    throw Error("cutoff scenario requires T > Diam(Omega)");
  if (scenario_restricts_neumann(cfg.scenario)) {
    if (!mask) throw Error("partial-data scenario needs an observation mask");
    for (const Direction& w : plan.omegas)
      if (!mask_covers_illuminated(*mask, w, cfg.eps))
        throw Error(
            "partial-data scenario requires the observation patch to cover the "
            "illuminated boundary for every probing direction");
  }
}

/// Data-side probe for one record. Oscillating scenarios anchor the
/// remainder at t = 0 so the prescribed traces are the principal part's;
/// lateral-data scenarios use the exponentially growing family.
inline GOProbe data_probe(const PotentialField& q_true, const Grid& g,
                          const ScenarioConfig& cfg, const Direction& omega, const Freq& xi) {
  switch (cfg.scenario) {
    case Scenario::C0:
      return build_oscillating_probe(q_true, omega, cfg.lambda, Freq{},
                                     osc_spec_two_const(g, omega, TimeAnchor::T0, +1),
                                     TimeAnchor::T0);
    case Scenario::CT:
      return build_oscillating_probe(q_true, omega, cfg.lambda, xi,
                                     osc_spec_plane(g, omega, xi, +1), TimeAnchor::T0);
    case Scenario::C0T:
      return build_oscillating_probe(
          q_true, omega, cfg.lambda, Freq{},
          osc_spec_cutoff_pair(g, omega, Freq{}, TimeAnchor::T0, +1, false), TimeAnchor::T0);
    case Scenario::CTV:
      return build_growing_probe(q_true, omega, cfg.lambda, false, 8.0, cfg.remainder);
    case Scenario::C0TV:
      return build_growing_probe(q_true, omega, cfg.lambda, true, 8.0, cfg.remainder);
    default:
      throw Error("run_scenario: unsupported scenario");
  }
}

/// Background-side probe carrying the slice frequency.
inline GOProbe out_probe(const PotentialField& q1, const Grid& g, const ScenarioConfig& cfg,
                         const Direction& omega, const Freq& xi) {
  switch (cfg.scenario) {
    case Scenario::C0:
      return build_oscillating_probe(q1, omega, cfg.lambda, xi,
                                     osc_spec_plane(g, omega, xi, -1), TimeAnchor::TT);
    case Scenario::CT:
      return build_oscillating_probe(q1, omega, cfg.lambda, Freq{},
                                     osc_spec_two_const(g, omega, TimeAnchor::TT, -1),
                                     TimeAnchor::TT);
    case Scenario::C0T:
      return build_oscillating_probe(
          q1, omega, cfg.lambda, xi,
          osc_spec_cutoff_pair(g, omega, xi, TimeAnchor::TT, -1, true), TimeAnchor::TT);
    case Scenario::CTV:
    case Scenario::C0TV:
      return build_decaying_probe(q1, omega, cfg.lambda, xi, 8.0, cfg.remainder);
    default:
      throw Error("run_scenario: unsupported scenario");
  }
}

inline bool record_per_entry(Scenario s) { return s == Scenario::CT; }

/// Node a sample estimates once grid dispersion of the carriers is taken
/// into account: the probe-pair product oscillates at the difference of the
/// matched carrier rates rather than exactly at omega.xi_x.
inline Freq effective_xi(const Grid& g, const ScenarioConfig& cfg, const Direction& omega,
                         const Freq& xi) {
  Freq eff = xi;
  auto plus = [&](double sgn) {
    std::array<double, kMaxDim> X{};
    for (int a = 0; a < g.n; ++a) X[a] = cfg.lambda * omega[a] + sgn * xi.x[a];
    return matched_oscillating_rate(g, X);
  };
  std::array<double, kMaxDim> Xc{};
  for (int a = 0; a < g.n; ++a) Xc[a] = cfg.lambda * omega[a];
  const double m0 = matched_oscillating_rate(g, Xc);
  switch (cfg.scenario) {
    case Scenario::C0:
    case Scenario::C0T:
      eff.t = plus(+1.0) - m0;
      break;
    case Scenario::CT:
      eff.t = m0 - plus(-1.0);
      break;
    case Scenario::CTV:
    case Scenario::C0TV: {
      double rate_t = matched_exponential_rate(g, omega, cfg.lambda);
      eff.t = expdetail::matched_envelope_freq(g, omega, cfg.lambda, rate_t, xi);
      break;
    }
    default:
      break;
  }
  return eff;
}

}  // namespace scen

/// Builds the masked records for (a subset of) the plan. The unknown
/// potential is only ever touched here.
inline ScenarioData synthesize_scenario(const PotentialField& q_true, const Grid& g,
                                        const ScenarioConfig& cfg, const SamplingPlan& plan,
                                        std::size_t entry_begin, std::size_t entry_end) {
  ScenarioData data;
  data.scenario = cfg.scenario;
  data.lambda = cfg.lambda;
  std::optional<BoundaryMask> mask;
  if (scenario_restricts_neumann(cfg.scenario))
    mask = boundary_partition(g, angle_direction(cfg.omega0_angle), cfg.eps,
                              cfg.v_margin_cells);
  scen::check_preconditions(g, cfg, plan, mask ? &*mask : nullptr);
  data.mask = mask;

  data.entries.assign(plan.entries.begin() + entry_begin, plan.entries.begin() + entry_end);
  if (scen::record_per_entry(cfg.scenario)) {
    data.records.resize(data.entries.size());
    data.record_of_entry.resize(data.entries.size());
    parallel_for(
        data.entries.size(),
        [&](std::size_t i) {
          const PlanEntry& e = data.entries[i];
          GOProbe probe = scen::data_probe(q_true, g, cfg, e.omega, e.xi);
          data.records[i] = synthesize_data(q_true, probe_tau0(probe), cfg.scenario,
                                            mask ? &*mask : nullptr);
          data.record_of_entry[i] = static_cast<int>(i);
        },
        cfg.threads);
  } else {
    // one record per direction index, shared across its slice frequencies
    std::map<int, int> slot;
    for (const PlanEntry& e : data.entries)
      if (!slot.count(e.omega_index))
        slot.emplace(e.omega_index, static_cast<int>(slot.size()));
    std::vector<Direction> omegas(slot.size());
    for (const PlanEntry& e : data.entries) omegas[slot[e.omega_index]] = e.omega;
    data.records.resize(slot.size());
    parallel_for(
        slot.size(),
        [&](std::size_t i) {
          GOProbe probe = scen::data_probe(q_true, g, cfg, omegas[i], Freq{});
          data.records[i] = synthesize_data(q_true, probe_tau0(probe), cfg.scenario,
                                            mask ? &*mask : nullptr);
        },
        cfg.threads);
    data.record_of_entry.resize(data.entries.size());
    for (std::size_t i = 0; i < data.entries.size(); ++i)
      data.record_of_entry[i] = slot[data.entries[i].omega_index];
  }
  return data;
}

/// Inverts one batch of records into slice samples. Reads nothing of the
/// unknown side beyond the records.
inline void reconstruct_samples(const ScenarioData& data, const PotentialField& q1,
                                const Grid& g, const ScenarioConfig& cfg,
                                FourierSliceSet& out) {
  std::vector<BackgroundTraces> bg(data.records.size());
  parallel_for(
      data.records.size(),
      [&](std::size_t i) { bg[i] = background_solve(q1, data.records[i]); }, cfg.threads);

  std::vector<SliceSample> samples(data.entries.size());
  parallel_for(
      data.entries.size(),
      [&](std::size_t i) {
        const PlanEntry& e = data.entries[i];
        const DataRecord& rec = data.records[data.record_of_entry[i]];
        GOProbe probe = scen::out_probe(q1, g, cfg, e.omega, e.xi);
        PairingResult pr =
            green_pairing(rec, rec.prescribed, probe, bg[data.record_of_entry[i]]);
        samples[i].xi = e.xi;
        samples[i].xi_eff = scen::effective_xi(g, cfg, e.omega, e.xi);
        samples[i].value = fourier_sample(pr, cfg.scenario);
        samples[i].lambda = cfg.lambda;
        samples[i].omega_index = e.omega_index;
      },
      cfg.threads);
  for (auto& s : samples) out.samples.push_back(s);
}

/// End to end: plan, synthesize records in direction-sized batches, pair,
/// sample, invert. The truth enters synthesis only; error metrics against
/// it are attached separately.
/// Keeps at most `cap` entries per frequency bin, preferring the sample
/// whose effective node lands nearest the bin center. Probe-hungry
/// scenarios run one probe per reachable bin; the inversion's conjugate
/// completion supplies the mirrors.
inline void thin_plan_per_bin(SamplingPlan& plan, const Grid& g, const ScenarioConfig& cfg,
                              int cap) {
  if (cap <= 0) return;
  auto steps = plandetail::dual_steps(g);
  struct Slot {
    std::vector<std::size_t> picks;
    std::vector<double> dist;
  };
  std::map<std::tuple<long, long, long>, Slot> bins;
  for (std::size_t i = 0; i < plan.entries.size(); ++i) {
    Freq eff = scen::effective_xi(g, cfg, plan.entries[i].omega, plan.entries[i].xi);
    long kt = std::lround(eff.t / steps[0]);
    long k1 = std::lround(eff.x[0] / steps[1]);
    long k2 = std::lround(eff.x[1] / steps[1]);
    double d = std::hypot(eff.t - kt * steps[0],
                          std::hypot(eff.x[0] - k1 * steps[1], eff.x[1] - k2 * steps[1]));
    Slot& slot = bins[{kt, k1, k2}];
    if (static_cast<int>(slot.picks.size()) < cap) {
      slot.picks.push_back(i);
      slot.dist.push_back(d);
    } else {
      std::size_t worst = 0;
      for (std::size_t j = 1; j < slot.dist.size(); ++j)
        if (slot.dist[j] > slot.dist[worst]) worst = j;
      if (d < slot.dist[worst]) {
        slot.picks[worst] = i;
        slot.dist[worst] = d;
      }
    }
  }
  std::vector<char> keep(plan.entries.size(), 0);
  for (const auto& kv : bins)
    for (std::size_t i : kv.second.picks) keep[i] = 1;
  std::vector<PlanEntry> kept;
  for (std::size_t i = 0; i < plan.entries.size(); ++i)
    if (keep[i]) kept.push_back(plan.entries[i]);
  // keep direction-major ordering so record batching stays per-direction
  std::stable_sort(kept.begin(), kept.end(),
                   [](const PlanEntry& a, const PlanEntry& b) {
                     return a.omega_index < b.omega_index;
                   });
  plan.entries = std::move(kept);
}

inline ReconstructionReport run_scenario(const PotentialField& q_true,
                                         const PotentialField& q1, const Grid& g,
                                         const ScenarioConfig& cfg) {
  SamplingPlan plan = sampling_plan(g, cfg.omega_count, cfg.xi_max, cfg.omega0_angle,
                                    cfg.effective_arc(), cfg.effective_oversample());
  thin_plan_per_bin(plan, g, cfg, cfg.effective_samples_per_bin());
  ReconstructionReport rep;
  rep.scenario = cfg.scenario;
  rep.lambda = cfg.lambda;
  rep.coverage = plan.coverage;
  rep.slices.xi_max = cfg.xi_max;

  // group entries by direction so record batches stay small
  std::size_t begin = 0;
  while (begin < plan.entries.size()) {
    std::size_t end = begin;
    int wi = plan.entries[begin].omega_index;
    while (end < plan.entries.size() && plan.entries[end].omega_index == wi) ++end;
    ScenarioData data = synthesize_scenario(q_true, g, cfg, plan, begin, end);
    rep.records_used += static_cast<std::int64_t>(data.records.size());
    reconstruct_samples(data, q1, g, cfg, rep.slices);
    begin = end;
  }

  InvertResult inv = invert(rep.slices, g);
  rep.q_est = inv.q_est;
  rep.imag_residue = inv.imag_residue;
  rep.imag_warning = inv.imag_warning;
  return rep;
}

/// Error metrics against the known truth; reporting only.
inline void attach_truth_metrics(ReconstructionReport& rep, const PotentialField& q_true,
                                 const PotentialField& q1, double xi_max) {
  const Grid& g = q_true.grid();
  RealField diff = q_true.q;
  diff -= q1.q;
  PotentialField pf_diff(diff, 2.0, 2.0);
  double dnorm = l2q_norm_trap(diff);
  if (dnorm > 0) {
    RealField err = rep.q_est;
    err -= diff;
    rep.rel_l2_error = l2q_norm_trap(err) / dnorm;
    RealField proj = cone_band_project(diff, xi_max);
    RealField missed = diff;
    missed -= proj;
    rep.floor_fraction = l2q_norm_trap(missed) / dnorm;
  } else {
    rep.rel_l2_error = l2q_norm_trap(rep.q_est);
    rep.floor_fraction = 0.0;
  }
  rep.rows.clear();
  for (const SliceSample& s : rep.slices.samples) {
    SampleRow row;
    row.omega_index = s.omega_index;
    row.xi = s.xi;
    row.sample = s.value;
    row.oracle = fourier_oracle(pf_diff, s.xi_eff);
    row.has_oracle = true;
    rep.rows.push_back(row);
  }
}

}  // namespace wavecal

#endif
