#include "etpsim/etpsim.h"

#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bell.hpp"
#include "dataset_io.hpp"
#include "errors.hpp"
#include "estimator.hpp"
#include "measurement.hpp"
#include "montecarlo.hpp"
#include "states.hpp"
#include "validation.hpp"

struct etpsim_mixture {
  etpsim::MixtureModel model;
};

struct etpsim_plan {
  etpsim::ExperimentPlan plan;
};

struct etpsim_dataset {
  etpsim::CoincidenceDataset data;
};

struct etpsim_fit {
  etpsim::FitResult result;
};

struct etpsim_bell_report {
  etpsim::BellReport report;
};

struct etpsim_validation {
  std::vector<etpsim::CheckResult> checks;
};

namespace {

using namespace etpsim;

thread_local std::string last_error;

struct BufferTooSmall {
  std::size_t needed;
};

etpsim_status fail(etpsim_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <class F>
etpsim_status guarded(F&& body) noexcept {
  try {
    body();
    return ETPSIM_OK;
  } catch (const BufferTooSmall& e) {
    return fail(ETPSIM_ERR_BUFFER,
                "buffer too small: " + std::to_string(e.needed) + " elements needed");
  } catch (const ParseError& e) {
    return fail(ETPSIM_ERR_PARSE, e.what());
  } catch (const InputError& e) {
    return fail(ETPSIM_ERR_INPUT, e.what());
  } catch (const IoError& e) {
    return fail(ETPSIM_ERR_IO, e.what());
  } catch (const InfeasibleError& e) {
    return fail(ETPSIM_ERR_INFEASIBLE, e.what());
  } catch (const DegeneracyError& e) {
    return fail(ETPSIM_ERR_DEGENERATE, e.what());
  } catch (const FitError& e) {
    std::string msg = e.what();
    if (!e.last_iterate().empty()) {
      msg += "; last iterate:";
      for (double x : e.last_iterate()) msg += " " + format_double(x);
    }
    return fail(ETPSIM_ERR_FIT, msg);
  } catch (const std::bad_alloc&) {
    return fail(ETPSIM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ETPSIM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(ETPSIM_ERR_INTERNAL, "unknown failure");
  }
}

template <class T>
const T& need(const T* p, const char* what) {
  if (p == nullptr) throw InputError(std::string(what) + " is NULL");
  return *p;
}

std::string text(const char* p, const char* what) {
  if (p == nullptr) throw InputError(std::string(what) + " is NULL");
  return p;
}

template <class T>
T& need_out(T* p, const char* what) {
  if (p == nullptr) throw InputError(std::string(what) + " is NULL");
  return *p;
}

template <class T>
void copy_out(const std::vector<T>& src, T* buffer, std::size_t capacity, std::size_t* needed) {
  need_out(needed, "needed");
  *needed = src.size();
  if (buffer == nullptr) return;
  if (capacity < src.size()) throw BufferTooSmall{src.size()};
  std::copy(src.begin(), src.end(), buffer);
}

Scan to_core(etpsim_scan s) {
  switch (s) {
    case ETPSIM_SCAN_FIG2A: return Scan::fig2a;
    case ETPSIM_SCAN_FIG2B: return Scan::fig2b;
    case ETPSIM_SCAN_FIG2C: return Scan::fig2c;
  }
  throw InputError("unknown scan value");
}

etpsim_scan to_c(Scan s) {
  switch (s) {
    case Scan::fig2a: return ETPSIM_SCAN_FIG2A;
    case Scan::fig2b: return ETPSIM_SCAN_FIG2B;
    case Scan::fig2c: return ETPSIM_SCAN_FIG2C;
  }
  throw InternalError("unknown scan");
}

AnalyzerSetting to_core(const etpsim_analyzer& a) {
  return {a.qwp_present != 0, a.qwp_angle_rad, a.hwp_present != 0, a.hwp_angle_rad};
}

etpsim_analyzer to_c(const AnalyzerSetting& a) {
  return {a.qwp_present ? 1 : 0, a.qwp_angle, a.hwp_present ? 1 : 0, a.hwp_angle};
}

FitModel to_core(etpsim_fit_model m) {
  switch (m) {
    case ETPSIM_FIT_MIXTURE_FREE_GAMMA: return FitModel::mixture_free_gamma;
    case ETPSIM_FIT_MIXTURE_GAMMA_FIXED: return FitModel::mixture_gamma_fixed;
    case ETPSIM_FIT_SINUSOID: return FitModel::sinusoid;
  }
  throw InputError("unknown fit model value");
}

etpsim_fit_model to_c(FitModel m) {
  switch (m) {
    case FitModel::mixture_free_gamma: return ETPSIM_FIT_MIXTURE_FREE_GAMMA;
    case FitModel::mixture_gamma_fixed: return ETPSIM_FIT_MIXTURE_GAMMA_FIXED;
    case FitModel::sinusoid: return ETPSIM_FIT_SINUSOID;
  }
  throw InternalError("unknown fit model");
}

ObservableFamily to_core(etpsim_bell_family f) {
  switch (f) {
    case ETPSIM_BELL_UNRESTRICTED: return ObservableFamily::unrestricted;
    case ETPSIM_BELL_ANALYZER: return ObservableFamily::analyzer;
  }
  throw InputError("unknown observable family value");
}

SearchStrategy to_core(etpsim_bell_strategy s) {
  switch (s) {
    case ETPSIM_BELL_COARSE_GRID_THEN_LOCAL: return SearchStrategy::coarse_grid_then_local;
    case ETPSIM_BELL_MULTISTART_LOCAL: return SearchStrategy::multistart_local;
  }
  throw InputError("unknown search strategy value");
}

Fault to_core(etpsim_fault f) {
  switch (f) {
    case ETPSIM_FAULT_NONE: return Fault::none;
    case ETPSIM_FAULT_PERTURBED_LIFT: return Fault::perturbed_lift;
  }
  throw InputError("unknown fault value");
}

BipartiteState bell_state(etpsim_source s) {
  switch (s) {
    case ETPSIM_SOURCE_ETP: return as_bipartite(make_etp());
    case ETPSIM_SOURCE_DOUBLE_EOP: return as_bipartite(make_double_eop());
    case ETPSIM_SOURCE_SEPARABLE: return separable_pair_state();
  }
  throw InputError("unknown source value");
}

template <class Stream>
Stream open_stream(const char* path) {
  const std::string p = text(path, "path");
  Stream f(p, std::ios::binary);
  if (!f) throw IoError("cannot open '" + p + "'");
  return f;
}

void write_file(const char* path, const std::string& content) {
  save_text(text(path, "path"), content);
}

nlohmann::json matrix_json(const Eigen::MatrixXcd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

extern "C" {

const char* etpsim_version(void) { return "1.0.0"; }

const char* etpsim_status_string(etpsim_status status) {
  switch (status) {
    case ETPSIM_OK: return "ok";
    case ETPSIM_ERR_INPUT: return "input error";
    case ETPSIM_ERR_PARSE: return "parse error";
    case ETPSIM_ERR_IO: return "I/O error";
    case ETPSIM_ERR_INFEASIBLE: return "infeasible";
    case ETPSIM_ERR_FIT: return "fit failure";
    case ETPSIM_ERR_DEGENERATE: return "degenerate fit";
    case ETPSIM_ERR_BUFFER: return "buffer too small";
    case ETPSIM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* etpsim_last_error(void) { return last_error.c_str(); }

etpsim_status etpsim_scan_parse(const char* name, etpsim_scan* out) {
  return guarded([&] { need_out(out, "out") = to_c(parse_scan(text(name, "name"))); });
}

const char* etpsim_scan_name(etpsim_scan scan) {
  switch (scan) {
    case ETPSIM_SCAN_FIG2A: return "fig2a";
    case ETPSIM_SCAN_FIG2B: return "fig2b";
    case ETPSIM_SCAN_FIG2C: return "fig2c";
  }
  return nullptr;
}

etpsim_status etpsim_mixture_create(double c0, double alpha, double beta, double gamma,
                                    etpsim_mixture** out) {
  return guarded([&] {
    need_out(out, "out") = nullptr;
    *out = new etpsim_mixture{MixtureModel(c0, alpha, beta, gamma)};
  });
}

void etpsim_mixture_destroy(etpsim_mixture* m) { delete m; }

etpsim_status etpsim_mixture_get(const etpsim_mixture* m, double* c0, double* alpha,
                                 double* beta, double* gamma) {
  return guarded([&] {
    const MixtureModel& mm = need(m, "mixture").model;
    if (c0) *c0 = mm.c0();
    if (alpha) *alpha = mm.alpha();
    if (beta) *beta = mm.beta();
    if (gamma) *gamma = mm.gamma();
  });
}

etpsim_status etpsim_fringe_rate(const etpsim_mixture* m, etpsim_scan scan, double angle_rad,
                                 double* out) {
  return guarded([&] {
    need_out(out, "out") = fringe_rate(need(m, "mixture").model, to_core(scan), angle_rad);
  });
}

etpsim_status etpsim_fringe_shape(etpsim_scan scan, double angle_rad, double* out) {
  return guarded([&] { need_out(out, "out") = fringe_shape(to_core(scan), angle_rad); });
}

etpsim_status etpsim_ratio_r_analytic(const etpsim_mixture* m, double* out) {
  return guarded([&] { need_out(out, "out") = ratio_r_analytic(need(m, "mixture").model); });
}

etpsim_status etpsim_analyzer_named(etpsim_basis basis, etpsim_analyzer* out) {
  return guarded([&] {
    NamedBasis b;
    switch (basis) {
      case ETPSIM_BASIS_HV: b = NamedBasis::hv; break;
      case ETPSIM_BASIS_RL: b = NamedBasis::rl; break;
      case ETPSIM_BASIS_PM: b = NamedBasis::pm; break;
      default: throw InputError("unknown basis value");
    }
    need_out(out, "out") = to_c(AnalyzerSetting::named(b));
  });
}

etpsim_status etpsim_scan_settings(etpsim_scan scan, double angle_rad, etpsim_analyzer* a,
                                   etpsim_analyzer* b) {
  return guarded([&] {
    const ScanSettings s = scan_settings(to_core(scan), angle_rad);
    need_out(a, "a") = to_c(s.a);
    need_out(b, "b") = to_c(s.b);
  });
}

etpsim_status etpsim_fourfold_probability(etpsim_source source, const etpsim_analyzer* a,
                                          const etpsim_analyzer* b, double* out) {
  return guarded([&] {
    const AnalyzerSetting sa = to_core(need(a, "a")), sb = to_core(need(b, "b"));
    double& result = need_out(out, "out");
    switch (source) {
      case ETPSIM_SOURCE_ETP: result = fourfold_probability_etp(make_etp(), sa, sb); break;
      case ETPSIM_SOURCE_DOUBLE_EOP:
        result = fourfold_probability_eop2(make_double_eop(), sa, sb);
        break;
      default: throw InputError("four-fold probabilities need an ETP or double-EOP source");
    }
  });
}

etpsim_status etpsim_twofold_fringe(double noise, double hwp_angle_rad, int pair, double* out) {
  return guarded([&] {
    if (pair < 0 || pair > 3) throw InputError("detector pair must be 0..3");
    need_out(out, "out") = twofold_fringe(EopState::singlet(noise), hwp_angle_rad,
                                          static_cast<DetectorPair>(pair));
  });
}

etpsim_status etpsim_visibility(const double* angles_rad, const double* counts, size_t n,
                                double frequency, etpsim_visibility_result* out) {
  return guarded([&] {
    need(angles_rad, "angles");
    need(counts, "counts");
    const VisibilityResult v = visibility(std::vector<double>(angles_rad, angles_rad + n),
                                          std::vector<double>(counts, counts + n), frequency);
    need_out(out, "out") = {v.visibility, v.sigma, v.degenerate ? 1 : 0};
  });
}

etpsim_status etpsim_grid_deg(double start_deg, double stop_deg, double step_deg,
                              double* buffer, size_t capacity, size_t* needed) {
  return guarded([&] {
    copy_out(ExperimentPlan::grid_deg(start_deg, stop_deg, step_deg), buffer, capacity, needed);
  });
}

etpsim_status etpsim_plan_create(etpsim_scan scan, const double* angles_deg, size_t n_angles,
                                 double window_s, double rate_scale, int repetitions,
                                 uint64_t seed, etpsim_plan** out) {
  return guarded([&] {
    need_out(out, "out") = nullptr;
    if (n_angles > 0) need(angles_deg, "angles_deg");
    ExperimentPlan p;
    p.scan = to_core(scan);
    p.angles_deg.assign(angles_deg, angles_deg + n_angles);
    p.window_s = window_s;
    p.rate_scale = rate_scale;
    p.repetitions = repetitions;
    p.seed = seed;
    p.validate();
    *out = new etpsim_plan{std::move(p)};
  });
}

void etpsim_plan_destroy(etpsim_plan* plan) { delete plan; }

etpsim_status etpsim_run_scan(const etpsim_mixture* m, const etpsim_plan* plan,
                              etpsim_dataset** out) {
  return guarded([&] {
    need_out(out, "out") = nullptr;
    *out = new etpsim_dataset{run_scan(need(m, "mixture").model, need(plan, "plan").plan)};
  });
}

etpsim_status etpsim_expected_counts(const etpsim_mixture* m, const etpsim_plan* plan,
                                     double angle_deg, double* out) {
  return guarded([&] {
    need_out(out, "out") = expected_counts(need(m, "mixture").model, need(plan, "plan").plan,
                                           deg_to_rad(angle_deg));
  });
}

void etpsim_dataset_destroy(etpsim_dataset* d) { delete d; }

etpsim_status etpsim_dataset_size(const etpsim_dataset* d, size_t* out) {
  return guarded([&] { need_out(out, "out") = need(d, "dataset").data.records.size(); });
}

etpsim_status etpsim_dataset_record(const etpsim_dataset* d, size_t index, etpsim_record* out) {
  return guarded([&] {
    const auto& recs = need(d, "dataset").data.records;
    if (index >= recs.size()) throw InputError("record index out of range");
    const CountRecord& r = recs[index];
    need_out(out, "out") = {r.repetition, r.grid_index, r.angle_deg, r.counts, r.sigma()};
  });
}

etpsim_status etpsim_dataset_scan(const etpsim_dataset* d, etpsim_scan* out) {
  return guarded([&] { need_out(out, "out") = to_c(need(d, "dataset").data.plan.scan); });
}

etpsim_status etpsim_dataset_repetitions(const etpsim_dataset* d, int* out) {
  return guarded([&] { need_out(out, "out") = need(d, "dataset").data.plan.repetitions; });
}

etpsim_status etpsim_dataset_write_csv(const etpsim_dataset* d, const char* path) {
  return guarded([&] {
    std::ostringstream ss;
    write_dataset_csv(ss, need(d, "dataset").data);
    write_file(path, ss.str());
  });
}

etpsim_status etpsim_dataset_write_json(const etpsim_dataset* d, const char* path) {
  return guarded([&] {
    std::ostringstream ss;
    write_dataset_json(ss, need(d, "dataset").data);
    write_file(path, ss.str());
  });
}

etpsim_status etpsim_dataset_read_csv(const char* path, etpsim_scan scan, etpsim_dataset** out) {
  return guarded([&] {
    need_out(out, "out") = nullptr;
    const Scan s = to_core(scan);
    auto in = open_stream<std::ifstream>(path);
    *out = new etpsim_dataset{read_dataset_csv(in, s)};
  });
}

etpsim_status etpsim_model_write_csv(const etpsim_mixture* m, const etpsim_dataset* d,
                                     const char* path) {
  return guarded([&] {
    std::ostringstream ss;
    write_model_csv(ss, model_curve(need(m, "mixture").model, need(d, "dataset").data.plan));
    write_file(path, ss.str());
  });
}

etpsim_status etpsim_model_write_json(const etpsim_mixture* m, const etpsim_dataset* d,
                                      const char* path) {
  return guarded([&] {
    const ExperimentPlan& plan = need(d, "dataset").data.plan;
    std::ostringstream ss;
    write_model_json(ss, plan.scan, model_curve(need(m, "mixture").model, plan));
    write_file(path, ss.str());
  });
}

etpsim_status etpsim_summaries_from_extrema(const etpsim_dataset* d, etpsim_summary* buffer,
                                            size_t capacity, size_t* needed) {
  return guarded([&] {
    std::vector<etpsim_summary> out;
    for (const auto& s : summaries_from_extrema(need(d, "dataset").data)) {
      out.push_back({s.c_parallel, s.c_perpendicular, s.sigma_parallel, s.sigma_perpendicular});
    }
    copy_out(out, buffer, capacity, needed);
  });
}

etpsim_status etpsim_estimate_r(const etpsim_summary* summaries, size_t n, etpsim_ratio* out) {
  return guarded([&] {
    if (n > 0) need(summaries, "summaries");
    std::vector<CoincidenceSummary> s;
    for (size_t i = 0; i < n; ++i) {
      s.push_back({summaries[i].c_parallel, summaries[i].c_perpendicular,
                   summaries[i].sigma_parallel, summaries[i].sigma_perpendicular});
    }
    const RatioEstimate r = estimate_r(s);
    need_out(out, "out") = {r.r, r.sigma_r, r.n_experiments};
  });
}

etpsim_status etpsim_criterion(const etpsim_ratio* r, int* etp_indicated, int* conservative) {
  return guarded([&] {
    const etpsim_ratio& in = need(r, "ratio");
    const CriterionResult c = etp_criterion({in.r, in.sigma_r, in.n_experiments});
    need_out(etp_indicated, "etp_indicated") = c.verdict == Verdict::etp_indicated ? 1 : 0;
    if (conservative) *conservative = c.conservative ? 1 : 0;
  });
}

etpsim_status etpsim_alpha_from_r(double r, double* alpha, int* out_of_model) {
  return guarded([&] {
    const AlphaFromR a = alpha_from_r(r);
    need_out(alpha, "alpha") = a.alpha;
    if (out_of_model) *out_of_model = a.out_of_model ? 1 : 0;
  });
}

etpsim_status etpsim_alpha_sigma_from_r(double r, double sigma_r, double* out) {
  return guarded([&] { need_out(out, "out") = alpha_sigma_from_r(r, sigma_r); });
}

etpsim_status etpsim_feasible_r_range(double gamma, double* r_min, double* r_max) {
  return guarded([&] {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw InputError("gamma must lie in [0, 1)");
    const auto [lo, hi] = feasible_r_range(gamma);
    need_out(r_min, "r_min") = lo;
    need_out(r_max, "r_max") = hi;
  });
}

etpsim_status etpsim_alpha_beta_with_noise(double r, double gamma, double sigma_r,
                                           etpsim_fractions* out) {
  return guarded([&] {
    const FractionEstimate f = alpha_beta_with_noise(r, gamma, sigma_r);
    need_out(out, "out") = {f.alpha, f.beta, f.gamma, f.sigma_alpha};
  });
}

void etpsim_fit_spec_default(etpsim_fit_spec* out) {
  if (out == nullptr) return;
  const FitSpec d;
  *out = {to_c(d.model), d.gamma_fixed, d.frequency, d.max_iterations};
}

etpsim_status etpsim_fit_model_parse(const char* name, etpsim_fit_model* out) {
  return guarded([&] { need_out(out, "out") = to_c(parse_fit_model(text(name, "name"))); });
}

const char* etpsim_fit_model_name(etpsim_fit_model model) {
  switch (model) {
    case ETPSIM_FIT_MIXTURE_FREE_GAMMA: return "mixture_free_gamma";
    case ETPSIM_FIT_MIXTURE_GAMMA_FIXED: return "mixture_gamma_fixed";
    case ETPSIM_FIT_SINUSOID: return "sinusoid";
  }
  return nullptr;
}

etpsim_status etpsim_fit_dataset(const etpsim_dataset* d, const etpsim_fit_spec* spec,
                                 etpsim_fit** out) {
  return guarded([&] {
    need_out(out, "out") = nullptr;
    const etpsim_fit_spec& s = need(spec, "spec");
    FitSpec fs;
    fs.model = to_core(s.model);
    fs.gamma_fixed = s.gamma_fixed;
    fs.frequency = s.frequency;
    fs.max_iterations = s.max_iterations;
    *out = new etpsim_fit{fit_fringe(need(d, "dataset").data, fs)};
  });
}

void etpsim_fit_destroy(etpsim_fit* fit) { delete fit; }

etpsim_status etpsim_fit_get_summary(const etpsim_fit* fit, etpsim_fit_summary* out) {
  return guarded([&] {
    const FitResult& f = need(fit, "fit").result;
    need_out(out, "out") = {f.chi2, f.dof, f.reduced_chi2, f.iterations, f.r, f.sigma_r};
  });
}

etpsim_status etpsim_fit_param_count(const etpsim_fit* fit, size_t* out) {
  return guarded([&] { need_out(out, "out") = need(fit, "fit").result.names.size(); });
}

etpsim_status etpsim_fit_param(const etpsim_fit* fit, size_t index, const char** name,
                               double* value, double* std_error) {
  return guarded([&] {
    const FitResult& f = need(fit, "fit").result;
    if (index >= f.names.size()) throw InputError("parameter index out of range");
    const auto i = static_cast<Eigen::Index>(index);
    if (name) *name = f.names[index].c_str();
    if (value) *value = f.params(i);
    if (std_error) *std_error = f.std_errors(i);
  });
}

etpsim_status etpsim_fit_covariance(const etpsim_fit* fit, size_t i, size_t j, double* out) {
  return guarded([&] {
    const FitResult& f = need(fit, "fit").result;
    if (i >= f.names.size() || j >= f.names.size()) {
      throw InputError("parameter index out of range");
    }
    need_out(out, "out") = f.covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  });
}

etpsim_status etpsim_fit_evaluate(const etpsim_fit* fit, etpsim_scan scan, double angle_rad,
                                  double* out) {
  return guarded([&] {
    need_out(out, "out") = need(fit, "fit").result.evaluate(to_core(scan), angle_rad);
  });
}

void etpsim_bell_options_default(etpsim_bell_options* out) {
  if (out == nullptr) return;
  const BellOptions d;
  *out = {ETPSIM_BELL_UNRESTRICTED,
          ETPSIM_BELL_COARSE_GRID_THEN_LOCAL,
          d.restarts,
          d.coarse_samples,
          d.max_evaluations,
          d.seed,
          d.parallel ? 1 : 0};
}

etpsim_status etpsim_bell_family_parse(const char* name, etpsim_bell_family* out) {
  return guarded([&] {
    const ObservableFamily f = parse_family(text(name, "name"));
    need_out(out, "out") =
        f == ObservableFamily::analyzer ? ETPSIM_BELL_ANALYZER : ETPSIM_BELL_UNRESTRICTED;
  });
}

etpsim_status etpsim_bell_strategy_parse(const char* name, etpsim_bell_strategy* out) {
  return guarded([&] {
    const SearchStrategy s = parse_strategy(text(name, "name"));
    need_out(out, "out") = s == SearchStrategy::multistart_local
                               ? ETPSIM_BELL_MULTISTART_LOCAL
                               : ETPSIM_BELL_COARSE_GRID_THEN_LOCAL;
  });
}

const char* etpsim_bell_family_name(etpsim_bell_family family) {
  switch (family) {
    case ETPSIM_BELL_UNRESTRICTED: return "unrestricted";
    case ETPSIM_BELL_ANALYZER: return "analyzer";
  }
  return nullptr;
}

const char* etpsim_bell_strategy_name(etpsim_bell_strategy strategy) {
  switch (strategy) {
    case ETPSIM_BELL_COARSE_GRID_THEN_LOCAL: return "coarse_grid_then_local";
    case ETPSIM_BELL_MULTISTART_LOCAL: return "multistart_local";
  }
  return nullptr;
}

etpsim_status etpsim_bell_optimize(etpsim_source source, const etpsim_bell_options* options,
                                   etpsim_bell_report** out) {
  return guarded([&] {
    need_out(out, "out") = nullptr;
    const etpsim_bell_options& o = need(options, "options");
    BellOptions bo;
    bo.family = to_core(o.family);
    bo.strategy = to_core(o.strategy);
    bo.restarts = o.restarts;
    bo.coarse_samples = o.coarse_samples;
    bo.max_evaluations = o.max_evaluations;
    bo.seed = o.seed;
    bo.parallel = o.parallel != 0;
    *out = new etpsim_bell_report{optimize_chsh(bell_state(source), bo)};
  });
}

void etpsim_bell_report_destroy(etpsim_bell_report* report) { delete report; }

etpsim_status etpsim_bell_report_summary(const etpsim_bell_report* report,
                                         etpsim_bell_summary* out) {
  return guarded([&] {
    const BellReport& r = need(report, "report").report;
    need_out(out, "out") = {r.best_value,  r.best_restart,           r.spread,
                            r.evaluations, r.beats_classical ? 1 : 0,
                            static_cast<int>(r.local_optima.size())};
  });
}

etpsim_status etpsim_bell_report_optima(const etpsim_bell_report* report, double* buffer,
                                        size_t capacity, size_t* needed) {
  return guarded(
      [&] { copy_out(need(report, "report").report.local_optima, buffer, capacity, needed); });
}

etpsim_status etpsim_bell_report_settings_json(const etpsim_bell_report* report, char* buffer,
                                               size_t capacity, size_t* needed) {
  return guarded([&] {
    const BellSettings& s = need(report, "report").report.best_settings;
    nlohmann::ordered_json j;
    j["a"] = matrix_json(s.a.op);
    j["a_prime"] = matrix_json(s.a_prime.op);
    j["b"] = matrix_json(s.b.op);
    j["b_prime"] = matrix_json(s.b_prime.op);
    const std::string text = j.dump();
    need_out(needed, "needed") = text.size() + 1;
    if (buffer == nullptr) return;
    if (capacity < text.size() + 1) throw BufferTooSmall{text.size() + 1};
    std::memcpy(buffer, text.c_str(), text.size() + 1);
  });
}

etpsim_status etpsim_bell_classical_max(etpsim_source source, double* out) {
  return guarded([&] { need_out(out, "out") = max_classical_chsh(bell_state(source)); });
}

void etpsim_validation_options_default(etpsim_validation_options* out) {
  if (out == nullptr) return;
  const ValidationOptions d;
  *out = {0, 0.0, ETPSIM_FAULT_NONE, d.random_cases, d.seed};
}

etpsim_status etpsim_fault_parse(const char* name, etpsim_fault* out) {
  return guarded([&] {
    const Fault f = parse_fault(text(name, "name"));
    need_out(out, "out") = f == Fault::perturbed_lift ? ETPSIM_FAULT_PERTURBED_LIFT
                                                      : ETPSIM_FAULT_NONE;
  });
}

etpsim_status etpsim_validate(const etpsim_validation_options* options, etpsim_validation** out) {
  return guarded([&] {
    need_out(out, "out") = nullptr;
    const etpsim_validation_options& o = need(options, "options");
    ValidationOptions vo;
    if (o.override_tolerance) {
      if (!(o.tolerance >= 0.0)) throw InputError("tolerance must be non-negative");
      vo.tolerance = o.tolerance;
    }
    vo.fault = to_core(o.fault);
    vo.random_cases = o.random_cases;
    vo.seed = o.seed;
    *out = new etpsim_validation{run_validation(vo)};
  });
}

void etpsim_validation_destroy(etpsim_validation* v) { delete v; }

etpsim_status etpsim_validation_count(const etpsim_validation* v, size_t* out) {
  return guarded([&] { need_out(out, "out") = need(v, "validation").checks.size(); });
}

etpsim_status etpsim_validation_check(const etpsim_validation* v, size_t index,
                                      const char** name, double* deviation, double* tolerance,
                                      int* passed) {
  return guarded([&] {
    const auto& checks = need(v, "validation").checks;
    if (index >= checks.size()) throw InputError("check index out of range");
    const CheckResult& c = checks[index];
    if (name) *name = c.name.c_str();
    if (deviation) *deviation = c.deviation;
    if (tolerance) *tolerance = c.tolerance;
    if (passed) *passed = c.passed ? 1 : 0;
  });
}

}  // extern "C"
